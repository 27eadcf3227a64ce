"""Per-run cycle configuration.

Values are layered: Django settings (``CHAOS_*``, read from the environment)
< a YAML configuration file < command-line overrides.
"""

from __future__ import annotations

from collections.abc import Mapping
from decimal import Decimal
from pathlib import Path
from typing import Any
from typing import Literal
from typing import Self

import yaml
from django.conf import settings
from pydantic import Field
from pydantic import ValidationError
from pydantic import model_validator

from chaoscycle.agents.ledger import Pricing
from chaoscycle.core.exceptions import ConfigurationError
from chaoscycle.core.values import ValueModel
from chaoscycle.simulator.state import SimTiming


class SimSettings(ValueModel):
    restart_delay_s: int = Field(default=5, ge=0)
    pod_startup_delay_s: int = Field(default=2, ge=0)
    base_latency_ms: float = Field(default=50.0, gt=0)
    stress_latency_factor: float = Field(default=4.0, ge=1)
    request_timeout_ms: float = Field(default=10_000.0, gt=0)


class CycleConfig(ValueModel):
    backend: Literal["http", "replay"] = "http"
    api_base: str = ""
    api_key_env: str = "OPENAI_API_KEY"
    model: str = ""
    price_in: Decimal = Field(default=Decimal(0), ge=0)
    price_out: Decimal = Field(default=Decimal(0), ge=0)
    max_loops: int = Field(default=3, ge=1)
    max_steady_states: int = Field(default=4, ge=1)
    max_attempts: int = Field(default=3, ge=1)
    max_experiment_s: int | None = Field(default=None, ge=3)
    seed: int = 0
    transcript: Path | None = None
    record_transcript: Path | None = None
    sim: SimSettings = Field(default_factory=SimSettings)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.backend == "replay":
            if self.transcript is None:
                raise ConfigurationError("The replay backend needs a transcript.")
            if not self.transcript.is_file():
                raise ConfigurationError(f"Transcript {self.transcript} does not exist.")
        return self

    @property
    def timing(self) -> SimTiming:
        return SimTiming(**self.sim.model_dump())

    @property
    def pricing(self) -> Pricing:
        return Pricing(price_in=self.price_in, price_out=self.price_out)


def settings_defaults() -> dict[str, Any]:
    return {
        "backend": settings.CHAOS_LLM_BACKEND,
        "api_base": settings.CHAOS_LLM_API_BASE,
        "api_key_env": settings.CHAOS_LLM_API_KEY_ENV,
        "model": settings.CHAOS_LLM_MODEL,
        "price_in": settings.CHAOS_PRICE_IN,
        "price_out": settings.CHAOS_PRICE_OUT,
        "max_loops": settings.CHAOS_MAX_LOOPS,
        "max_steady_states": settings.CHAOS_MAX_STEADY_STATES,
        "max_attempts": settings.CHAOS_MAX_ATTEMPTS,
        "seed": settings.CHAOS_SEED,
        "sim": {
            "restart_delay_s": settings.CHAOS_SIM_RESTART_DELAY_S,
            "pod_startup_delay_s": settings.CHAOS_SIM_POD_STARTUP_DELAY_S,
            "base_latency_ms": settings.CHAOS_SIM_BASE_LATENCY_MS,
            "stress_latency_factor": settings.CHAOS_SIM_STRESS_LATENCY_FACTOR,
            "request_timeout_ms": settings.CHAOS_SIM_REQUEST_TIMEOUT_MS,
        },
    }


def read_config_file(path: Path) -> dict[str, Any]:
    """Parse a YAML configuration file; relative transcript paths resolve against its folder."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except OSError as exc:
        msg = f"Cannot read configuration file {path}: {exc}"
        raise ConfigurationError(msg) from exc
    except yaml.YAMLError as exc:
        msg = f"Configuration file {path} is not valid YAML: {exc}"
        raise ConfigurationError(msg) from exc
    if not isinstance(data, dict):
        msg = f"Configuration file {path} must hold a mapping"
        raise ConfigurationError(msg)
    for key in ("transcript", "record_transcript"):
        if data.get(key):
            data[key] = str(path.parent / data[key])
    return data


def _merge(base: dict[str, Any], layer: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in layer.items():
        if value is None:
            continue
        if key == "sim" and isinstance(value, Mapping) and isinstance(merged.get("sim"), dict):
            merged["sim"] = {**merged["sim"], **value}
        else:
            merged[key] = value
    return merged


def load_cycle_config(path: Path | None = None, overrides: Mapping[str, Any] | None = None) -> CycleConfig:
    data = settings_defaults()
    if path is not None:
        data = _merge(data, read_config_file(path))
    data = _merge(data, overrides or {})
    try:
        return CycleConfig.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in exc.errors())
        msg = f"Invalid cycle configuration: {problems}"
        raise ConfigurationError(msg) from exc
