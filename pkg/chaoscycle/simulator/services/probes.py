from __future__ import annotations

import random
from collections.abc import Callable
from collections.abc import Iterable

from chaoscycle.core.enums import Aggregation
from chaoscycle.core.enums import FaultSubtype
from chaoscycle.core.enums import Quantity
from chaoscycle.core.exceptions import UnknownService
from chaoscycle.core.values import Measurement
from chaoscycle.core.values import ProbeSpec
from chaoscycle.core.values import p95
from chaoscycle.core.values import service_host
from chaoscycle.simulator.state import ClusterState
from chaoscycle.simulator.state import PodState


def default_aggregation(quantity: Quantity) -> Aggregation:
    return Aggregation.P95 if quantity == Quantity.LATENCY_P95_MS else Aggregation.EVERY_SAMPLE


def _request_latency(state: ClusterState, pod: PodState) -> float:
    faults = state.faults_on(pod.id)
    latency = state.timing.base_latency_ms
    if any(active.subtype == FaultSubtype.CPU for active in faults):
        latency *= state.timing.stress_latency_factor
    return latency + sum(active.fault.param("delay_ms") for active in faults if active.subtype == FaultSubtype.DELAY)


def _loss_pct(state: ClusterState, pod: PodState) -> float:
    return max(
        (active.fault.param("loss_pct") for active in state.faults_on(pod.id) if active.subtype == FaultSubtype.LOSS),
        default=0.0,
    )


def http_load(state: ClusterState, probe: ProbeSpec) -> tuple[int, list[float]]:
    """Issue ``virtual_users`` requests; returns (issued, latencies of served requests)."""
    name, namespace = service_host(probe.url)
    service = state.service(name, namespace)
    if service is None:
        raise UnknownService(probe.url)

    backends = state.running_pods(service.namespace, service.selector)
    rng = random.Random(f"{state.rng_seed}:{state.clock_s}:{probe.url}")  # noqa: S311
    latencies = []
    for request in range(probe.virtual_users):
        if not backends:
            continue
        pod = backends[(state.clock_s + request) % len(backends)]
        loss = _loss_pct(state, pod)
        if loss and rng.random() * 100 < loss:
            continue
        latencies.append(_request_latency(state, pod))
    return probe.virtual_users, latencies


def sample_probe(state: ClusterState, probe: ProbeSpec) -> float:
    """One sample of the probe's quantity at the state's clock."""
    match probe.quantity:
        case Quantity.POD_COUNT:
            return float(len(state.running_pods(probe.namespace, probe.selector)))
        case Quantity.READY_REPLICA_COUNT:
            pods = state.running_pods(probe.namespace, probe.selector)
            return float(sum(1 for pod in pods if pod.owner is not None))
        case Quantity.SUCCESS_RATE:
            issued, latencies = http_load(state, probe)
            return len(latencies) / issued
        case Quantity.LATENCY_P95_MS:
            _, latencies = http_load(state, probe)
            return p95(latencies) if latencies else state.timing.request_timeout_ms


def run_probe(
    trajectory: Iterable[ClusterState],
    probe: ProbeSpec,
    aggregation: Aggregation | None = None,
    on_sample: Callable[[ClusterState, float], None] | None = None,
) -> Measurement:
    """Sample every ``sample_interval_s`` ticks of a one-state-per-second trajectory.

    The trajectory may be lazy: a cluster backend yields its live state and
    advances its clock between items.
    """
    samples = []
    for offset, state in enumerate(trajectory):
        if offset % probe.sample_interval_s:
            continue
        value = sample_probe(state, probe)
        if on_sample is not None:
            on_sample(state, value)
        samples.append((offset, value))
    return Measurement.from_samples(probe.quantity, aggregation or default_aggregation(probe.quantity), samples)
