"""Hypothesis-side value objects: probes, thresholds, measurements, faults."""

from __future__ import annotations

import math
import re
from collections.abc import Iterable
from typing import Self
from urllib.parse import urlsplit

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator

from .enums import FAULT_SUBTYPES
from .enums import Aggregation
from .enums import Comparator
from .enums import FaultKind
from .enums import FaultSubtype
from .enums import ProbeTool
from .enums import Quantity
from .enums import SelectorMode
from .enums import Unit
from .exceptions import InvariantViolation

DNS_LABEL = re.compile(r"^[a-z0-9]([-a-z0-9]*[a-z0-9])?$")


class ValueModel(BaseModel):
    """Immutable value object; mutation happens by constructing new values."""

    model_config = ConfigDict(frozen=True, extra="forbid")


def format_selector(labels: dict[str, str]) -> str:
    return ",".join(f"{key}={value}" for key, value in sorted(labels.items()))


def service_host(url: str) -> tuple[str, str | None]:
    """Service name and namespace addressed by an in-cluster URL."""
    host = urlsplit(url if "://" in url else f"http://{url}").hostname or ""
    parts = host.split(".")
    namespace = parts[1] if len(parts) > 1 and parts[1] != "svc" else None
    return parts[0], namespace


def p95(values: Iterable[float]) -> float:
    # nearest-rank percentile, identical to k6's p(95)
    return float(np.percentile(np.asarray(list(values), dtype=float), 95, method="inverted_cdf"))


def aggregate_samples(quantity: Quantity, aggregation: Aggregation, values: list[float]) -> float:
    if not values:
        raise InvariantViolation("cannot aggregate an empty sample series")
    match aggregation:
        case Aggregation.FINAL_SAMPLE:
            return float(values[-1])
        case Aggregation.P95:
            return p95(values)
        case Aggregation.EVERY_SAMPLE:
            return float(min(values) if quantity.higher_is_better else max(values))


class ProbeSpec(ValueModel):
    tool: ProbeTool
    quantity: Quantity
    namespace: str = "default"
    selector: dict[str, str] = Field(default_factory=dict)
    url: str = ""
    virtual_users: int = 1
    sample_interval_s: int = 1
    duration_s: int = 10

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.quantity.tool != self.tool:
            raise InvariantViolation(f"{self.quantity} cannot be measured with {self.tool}")
        if self.sample_interval_s <= 0:
            raise InvariantViolation("sample_interval_s must be positive")
        if self.duration_s < self.sample_interval_s:
            raise InvariantViolation("duration_s must be at least sample_interval_s")
        if self.tool == ProbeTool.CLUSTER_API:
            if not self.selector or any(not key for key in self.selector):
                raise InvariantViolation("ClusterApi probes need a non-empty label selector")
        else:
            if not self.url:
                raise InvariantViolation("HttpLoad probes need a URL")
            if self.virtual_users < 1:
                raise InvariantViolation("virtual_users must be at least 1")
        return self

    @property
    def target_key(self) -> tuple[str, ...]:
        if self.tool == ProbeTool.CLUSTER_API:
            return (self.tool, self.quantity, self.namespace, format_selector(self.selector))
        return (self.tool, self.quantity, self.url)

    def describe_target(self) -> str:
        if self.tool == ProbeTool.CLUSTER_API:
            return f"{self.namespace}/{format_selector(self.selector)}"
        return self.url

    def with_duration(self, duration_s: int) -> ProbeSpec:
        interval = min(self.sample_interval_s, duration_s)
        return self.model_copy(update={"duration_s": duration_s, "sample_interval_s": interval})


class Threshold(ValueModel):
    comparator: Comparator
    value: float
    aggregation: Aggregation
    unit: Unit

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.unit == Unit.RATIO and not 0 <= self.value <= 1:
            raise InvariantViolation(f"ratio threshold {self.value} outside [0, 1]")
        if self.unit == Unit.COUNT and (self.value < 0 or not float(self.value).is_integer()):
            raise InvariantViolation(f"count threshold {self.value} must be a non-negative integer")
        if self.unit == Unit.MILLISECONDS and self.value < 0:
            raise InvariantViolation("latency threshold must be non-negative")
        return self

    def check_quantity(self, quantity: Quantity) -> None:
        if quantity.unit != self.unit:
            msg = f"threshold unit {self.unit} does not match {quantity} ({quantity.unit})"
            raise InvariantViolation(msg)

    def evaluate(self, measurement: Measurement) -> bool:
        if self.aggregation == Aggregation.EVERY_SAMPLE:
            return all(self.comparator.holds(value, self.value) for _, value in measurement.samples)
        return self.comparator.holds(measurement.reaggregate(self.aggregation), self.value)

    def first_violation(self, measurement: Measurement) -> tuple[int, float] | None:
        for offset, value in measurement.samples:
            if not self.comparator.holds(value, self.value):
                return offset, value
        return None

    def describe(self, quantity: Quantity | None = None) -> str:
        subject = quantity.value if quantity else "value"
        value = int(self.value) if self.unit == Unit.COUNT else self.value
        return f"{subject} {self.comparator.symbol} {value} ({self.aggregation})"


class Measurement(ValueModel):
    quantity: Quantity
    aggregation: Aggregation
    samples: tuple[tuple[int, float], ...]
    aggregate: float

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not self.samples:
            raise InvariantViolation("a measurement needs at least one sample")
        offsets = [offset for offset, _ in self.samples]
        if any(later <= earlier for earlier, later in zip(offsets, offsets[1:], strict=False)):
            raise InvariantViolation("sample offsets must be strictly increasing")
        expected = aggregate_samples(self.quantity, self.aggregation, self.values)
        if not math.isclose(expected, self.aggregate, rel_tol=1e-9, abs_tol=1e-9):
            msg = f"aggregate {self.aggregate} disagrees with recomputed {expected}"
            raise InvariantViolation(msg)
        return self

    @classmethod
    def from_samples(
        cls,
        quantity: Quantity,
        aggregation: Aggregation,
        samples: Iterable[tuple[int, float]],
    ) -> Measurement:
        samples = tuple((int(offset), float(value)) for offset, value in samples)
        values = [value for _, value in samples]
        return cls(
            quantity=quantity,
            aggregation=aggregation,
            samples=samples,
            aggregate=aggregate_samples(quantity, aggregation, values) if values else 0.0,
        )

    @property
    def values(self) -> list[float]:
        return [value for _, value in self.samples]

    def reaggregate(self, aggregation: Aggregation) -> float:
        return aggregate_samples(self.quantity, aggregation, self.values)


class VaCSpec(ValueModel):
    """Validation-as-code check: a probe plus the threshold its samples must meet."""

    steady_state_name: str
    probe: ProbeSpec
    threshold: Threshold
    script_text: str = ""

    @model_validator(mode="after")
    def _check(self) -> Self:
        self.threshold.check_quantity(self.probe.quantity)
        return self

    def evaluate(self, measurement: Measurement) -> bool:
        return self.threshold.evaluate(measurement)


class SteadyState(ValueModel):
    name: str
    description: str
    probe: ProbeSpec
    baseline: Measurement
    threshold: Threshold
    vac: VaCSpec

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not self.name:
            raise InvariantViolation("steady states need a name")
        self.threshold.check_quantity(self.probe.quantity)
        if self.vac.steady_state_name != self.name:
            raise InvariantViolation(f"VaC {self.vac.steady_state_name} does not belong to {self.name}")
        if self.vac.probe != self.probe or self.vac.threshold != self.threshold:
            raise InvariantViolation(f"VaC of {self.name} must mirror its probe and threshold")
        if not self.threshold.evaluate(self.baseline):
            msg = f"threshold of {self.name} does not hold on its own baseline"
            raise InvariantViolation(msg)
        return self


class FaultSelector(ValueModel):
    namespace: str = "default"
    labels: dict[str, str]
    mode: SelectorMode = SelectorMode.ONE
    count: int | None = None

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not self.labels or any(not key for key in self.labels):
            raise InvariantViolation("fault selectors need non-empty label keys")
        if self.mode == SelectorMode.FIXED_COUNT and (self.count is None or self.count < 1):
            raise InvariantViolation("FixedCount selectors need count >= 1")
        if self.mode != SelectorMode.FIXED_COUNT and self.count is not None:
            raise InvariantViolation(f"{self.mode} selectors take no count")
        return self

    def describe(self) -> str:
        return f"{self.namespace}/{format_selector(self.labels)}"


# subtype -> {param: (minimum, maximum, required)}
FAULT_PARAMS: dict[FaultSubtype, dict[str, tuple[float, float, bool]]] = {
    FaultSubtype.POD_KILL: {"kill_grace_s": (0, 300, False)},
    FaultSubtype.POD_FAILURE: {},
    FaultSubtype.DELAY: {"delay_ms": (1, 60_000, True)},
    FaultSubtype.LOSS: {"loss_pct": (0, 100, True)},
    FaultSubtype.CPU: {"cpu_workers": (1, 64, True)},
}


class FaultSpec(ValueModel):
    name: str
    kind: FaultKind
    subtype: FaultSubtype
    selector: FaultSelector
    params: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not DNS_LABEL.match(self.name):
            raise InvariantViolation(f"fault name {self.name!r} is not a DNS label")
        if self.subtype not in FAULT_SUBTYPES[self.kind]:
            raise InvariantViolation(f"{self.subtype} is not a {self.kind} subtype")
        ranges = FAULT_PARAMS[self.subtype]
        for key, value in self.params.items():
            if key not in ranges:
                raise InvariantViolation(f"{self.subtype} takes no parameter {key}")
            low, high, _ = ranges[key]
            if not low <= value <= high:
                raise InvariantViolation(f"{key}={value} outside [{low}, {high}]")
        for key, (_, _, required) in ranges.items():
            if required and key not in self.params:
                raise InvariantViolation(f"{self.subtype} requires {key}")
        return self

    def param(self, key: str, default: float = 0) -> float:
        return self.params.get(key, default)


class FailureScenario(ValueModel):
    narrative: str
    faults: tuple[FaultSpec, ...]

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not self.faults:
            raise InvariantViolation("a failure scenario needs at least one fault")
        names = [fault.name for fault in self.faults]
        if len(names) != len(set(names)):
            raise InvariantViolation("fault names must be unique within a scenario")
        return self

    def fault(self, name: str) -> FaultSpec:
        for fault in self.faults:
            if fault.name == name:
                return fault
        raise KeyError(name)


class Hypothesis(ValueModel):
    steady_states: tuple[SteadyState, ...]
    scenario: FailureScenario
    statement: str

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not self.steady_states:
            raise InvariantViolation("a hypothesis needs at least one steady state")
        names = [state.name for state in self.steady_states]
        if len(names) != len(set(names)):
            raise InvariantViolation("steady state names must be unique")
        targets = [state.probe.target_key for state in self.steady_states]
        if len(targets) != len(set(targets)):
            raise InvariantViolation("two steady states measure the same target")
        missing = [name for name in names if name not in self.statement]
        if missing:
            raise InvariantViolation(f"hypothesis statement omits {', '.join(missing)}")
        return self

    @property
    def vacs(self) -> tuple[VaCSpec, ...]:
        return tuple(state.vac for state in self.steady_states)

    def steady_state(self, name: str) -> SteadyState:
        for state in self.steady_states:
            if state.name == name:
                return state
        raise KeyError(name)
