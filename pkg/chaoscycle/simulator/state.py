"""Immutable state of the simulated cluster.

States are plain frozen dataclasses; the engine never mutates one, it builds
the next state with ``dataclasses.replace``.
"""

from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field
from enum import StrEnum

from chaoscycle.core.enums import FaultSubtype
from chaoscycle.core.enums import RestartPolicy
from chaoscycle.core.values import FaultSpec


@dataclass(frozen=True)
class SimTiming:
    restart_delay_s: int = 5
    pod_startup_delay_s: int = 2
    base_latency_ms: float = 50.0
    stress_latency_factor: float = 4.0
    request_timeout_ms: float = 10_000.0


class PodPhase(StrEnum):
    PENDING = "Pending"
    RUNNING = "Running"
    FAILED = "Failed"
    TERMINATED = "Terminated"


class EventKind(StrEnum):
    POD_KILLED = "PodKilled"
    POD_RESTARTED = "PodRestarted"
    POD_SCHEDULED = "PodScheduled"
    POD_READY = "PodReady"
    FAULT_STARTED = "FaultStarted"
    FAULT_ENDED = "FaultEnded"
    PROBE_SAMPLE = "ProbeSample"
    WARNING = "Warning"


@dataclass(frozen=True)
class PodState:
    id: str
    name: str
    namespace: str
    labels: dict[str, str]
    phase: PodPhase
    owner: str | None = None
    restart_policy: RestartPolicy = RestartPolicy.ALWAYS
    pending_until_s: int | None = None
    down_since_s: int | None = None
    restarts: int = 0

    def matches(self, namespace: str, selector: dict[str, str]) -> bool:
        return (
            bool(selector)
            and self.namespace == namespace
            and all(self.labels.get(key) == value for key, value in selector.items())
        )

    @property
    def alive(self) -> bool:
        return self.phase in (PodPhase.RUNNING, PodPhase.PENDING)


@dataclass(frozen=True)
class DeploymentState:
    id: str
    name: str
    namespace: str
    desired_replicas: int
    template_labels: dict[str, str]
    next_index: int = 0


@dataclass(frozen=True)
class ServiceState:
    id: str
    name: str
    namespace: str
    selector: dict[str, str]
    port: int


@dataclass(frozen=True)
class ActiveFault:
    fault: FaultSpec
    started_s: int
    end_s: int
    pod_ids: tuple[str, ...]

    @property
    def subtype(self) -> FaultSubtype:
        return self.fault.subtype


@dataclass(frozen=True)
class ClusterEvent:
    at_s: int
    kind: EventKind
    detail: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict[str, object]:
        return {"at_s": self.at_s, "kind": self.kind.value, "detail": self.detail}


@dataclass(frozen=True)
class ClusterState:
    clock_s: int
    pods: tuple[PodState, ...]
    deployments: tuple[DeploymentState, ...]
    services: tuple[ServiceState, ...]
    active_faults: tuple[ActiveFault, ...]
    rng_seed: int
    timing: SimTiming = field(default_factory=SimTiming)

    def pod(self, pod_id: str) -> PodState | None:
        return next((pod for pod in self.pods if pod.id == pod_id), None)

    def owned_pods(self, deployment_id: str) -> list[PodState]:
        return [pod for pod in self.pods if pod.owner == deployment_id]

    def matching_pods(self, namespace: str, selector: dict[str, str]) -> list[PodState]:
        return sorted((pod for pod in self.pods if pod.matches(namespace, selector)), key=lambda pod: pod.id)

    def running_pods(self, namespace: str, selector: dict[str, str]) -> list[PodState]:
        return [pod for pod in self.matching_pods(namespace, selector) if pod.phase == PodPhase.RUNNING]

    def held_pod_ids(self) -> set[str]:
        """Pods kept down by an active pod-failure fault."""
        return {
            pod_id
            for active in self.active_faults
            if active.subtype == FaultSubtype.POD_FAILURE
            for pod_id in active.pod_ids
        }

    def faults_on(self, pod_id: str) -> list[ActiveFault]:
        return [active for active in self.active_faults if pod_id in active.pod_ids]

    def service(self, name: str, namespace: str | None = None) -> ServiceState | None:
        for service in self.services:
            if service.name == name and (namespace is None or service.namespace == namespace):
                return service
        return None

    @property
    def all_running(self) -> bool:
        return all(pod.phase == PodPhase.RUNNING for pod in self.pods if pod.phase != PodPhase.TERMINATED)
