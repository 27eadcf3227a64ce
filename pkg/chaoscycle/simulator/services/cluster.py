"""Cluster backends.

``SimulatedCluster`` owns one logical clock and the event log of a single
simulated cluster. A real-cluster adapter would satisfy ``ClusterBackend``
with kubectl/Chaos Mesh/k6 calls instead.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Callable
from collections.abc import Iterator
from pathlib import Path
from typing import Protocol

from chaoscycle.core.enums import Aggregation
from chaoscycle.core.enums import ResourceKind
from chaoscycle.core.exceptions import DeployFailed
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.values import FaultSpec
from chaoscycle.core.values import Measurement
from chaoscycle.core.values import ProbeSpec
from chaoscycle.simulator.services import engine
from chaoscycle.simulator.services.probes import run_probe
from chaoscycle.simulator.services.probes import sample_probe
from chaoscycle.simulator.state import ClusterEvent
from chaoscycle.simulator.state import ClusterState
from chaoscycle.simulator.state import EventKind
from chaoscycle.simulator.state import PodPhase
from chaoscycle.simulator.state import SimTiming

logger = logging.getLogger(__name__)

SETTLE_LIMIT_S = 600


class ClusterBackend(Protocol):
    @property
    def clock_s(self) -> int: ...

    def deploy(self, manifest_set: ManifestSet) -> None: ...

    def settle(self) -> None: ...

    def advance(self, seconds: int = 1) -> None: ...

    def inject_fault(self, fault: FaultSpec, duration_s: int) -> list[ClusterEvent]: ...

    def sample(self, probe: ProbeSpec) -> float: ...

    def measure(self, probe: ProbeSpec, aggregation: Aggregation | None = None) -> Measurement: ...


class SimulatedCluster:
    """Mutable, single-owner wrapper around the pure simulation engine."""

    def __init__(self, timing: SimTiming | None = None, seed: int = 0) -> None:
        self.timing = timing or SimTiming()
        self.seed = seed
        self._state: ClusterState | None = None
        self.events: list[ClusterEvent] = []

    @property
    def state(self) -> ClusterState:
        if self._state is None:
            msg = "cluster has not been deployed"
            raise DeployFailed(msg)
        return self._state

    @property
    def clock_s(self) -> int:
        return self.state.clock_s

    def _record(self, events: list[ClusterEvent]) -> None:
        for event in events:
            if event.kind in (EventKind.WARNING, EventKind.POD_KILLED, EventKind.FAULT_STARTED):
                logger.info("[t=%ss] %s %s", event.at_s, event.kind, event.detail)
            else:
                logger.debug("[t=%ss] %s %s", event.at_s, event.kind, event.detail)
        self.events.extend(events)

    def deploy(self, manifest_set: ManifestSet) -> None:
        if self._state is not None:
            msg = "cluster already runs a deployment; use a fresh cluster"
            raise DeployFailed(msg)
        if not any(r.kind in (ResourceKind.POD, ResourceKind.DEPLOYMENT) for r in manifest_set.resources):
            msg = "manifests define no Pod or Deployment to run"
            raise DeployFailed(msg)
        self._state, events = engine.deploy(manifest_set, self.seed, self.timing)
        self._record(events)
        logger.info("Deployed %d resources, %d pods scheduled", len(manifest_set.resources), len(self.state.pods))

    def settle(self) -> None:
        """Advance until no pod is Pending."""
        waited = 0
        while any(pod.phase == PodPhase.PENDING for pod in self.state.pods):
            if waited >= SETTLE_LIMIT_S:
                msg = f"pods still pending after {SETTLE_LIMIT_S}s"
                raise DeployFailed(msg)
            self.advance(1)
            waited += 1

    def advance(self, seconds: int = 1) -> None:
        self._state, events = engine.step(self.state, seconds)
        self._record(events)

    def inject_fault(self, fault: FaultSpec, duration_s: int) -> list[ClusterEvent]:
        self._state, events = engine.inject_fault(self.state, fault, duration_s)
        self._record(events)
        return events

    def _record_sample(self, probe: ProbeSpec, value: float) -> None:
        detail = {"target": probe.describe_target(), "quantity": probe.quantity.value, "value": f"{value:g}"}
        self._record([ClusterEvent(self.clock_s, EventKind.PROBE_SAMPLE, detail)])

    def sample(self, probe: ProbeSpec) -> float:
        value = sample_probe(self.state, probe)
        self._record_sample(probe, value)
        return value

    def _live_trajectory(self, duration_s: int) -> Iterator[ClusterState]:
        for _ in range(duration_s):
            yield self.state
            self.advance(1)

    def measure(self, probe: ProbeSpec, aggregation: Aggregation | None = None) -> Measurement:
        """Run the probe for its full duration starting now; the clock moves on by ``duration_s``."""
        return run_probe(
            self._live_trajectory(probe.duration_s),
            probe,
            aggregation,
            on_sample=lambda _, value: self._record_sample(probe, value),
        )

    def export_events(self, path: Path) -> None:
        with Path(path).open("w", encoding="utf-8") as handle:
            for event in self.events:
                handle.write(json.dumps(event.as_dict(), sort_keys=True) + "\n")


def simulated_cluster_factory(timing: SimTiming | None = None, seed: int = 0) -> Callable[[], SimulatedCluster]:
    """A factory producing fresh, independent simulated clusters."""

    def factory() -> SimulatedCluster:
        return SimulatedCluster(timing=timing, seed=seed)

    return factory
