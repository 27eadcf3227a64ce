"""Discrete-event engine: deploy, advance the clock, inject faults.

Every function is pure: it takes a ClusterState and returns the next one
together with the events emitted on the way.
"""

from __future__ import annotations

import random
from dataclasses import replace

from chaoscycle.core.enums import FaultSubtype
from chaoscycle.core.enums import ResourceKind
from chaoscycle.core.enums import RestartPolicy
from chaoscycle.core.enums import SelectorMode
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import SelectorMatchesNothing
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.values import FaultSpec
from chaoscycle.core.values import format_selector
from chaoscycle.simulator.state import ActiveFault
from chaoscycle.simulator.state import ClusterEvent
from chaoscycle.simulator.state import ClusterState
from chaoscycle.simulator.state import DeploymentState
from chaoscycle.simulator.state import EventKind
from chaoscycle.simulator.state import PodPhase
from chaoscycle.simulator.state import PodState
from chaoscycle.simulator.state import ServiceState
from chaoscycle.simulator.state import SimTiming

Events = list[ClusterEvent]


def _new_pod(deployment: DeploymentState, index: int, ready_at: int) -> PodState:
    name = f"{deployment.name}-{index}"
    return PodState(
        id=f"{deployment.namespace}/{name}",
        name=name,
        namespace=deployment.namespace,
        labels=dict(deployment.template_labels),
        phase=PodPhase.PENDING,
        owner=deployment.id,
        pending_until_s=ready_at,
    )


def deploy(manifest_set: ManifestSet, seed: int = 0, timing: SimTiming | None = None) -> tuple[ClusterState, Events]:
    """Schedule every workload of the set at clock 0; pods start Pending."""
    timing = timing or SimTiming()
    ready_at = timing.pod_startup_delay_s
    pods: list[PodState] = []
    deployments: list[DeploymentState] = []
    services: list[ServiceState] = []
    events: Events = []

    for resource in manifest_set.resources:
        if resource.kind == ResourceKind.POD:
            pods.append(
                PodState(
                    id=f"{resource.namespace}/{resource.name}",
                    name=resource.name,
                    namespace=resource.namespace,
                    labels=dict(resource.labels),
                    phase=PodPhase.PENDING,
                    restart_policy=resource.restart_policy or RestartPolicy.ALWAYS,
                    pending_until_s=ready_at,
                ),
            )
            events.append(ClusterEvent(0, EventKind.POD_SCHEDULED, {"pod": pods[-1].id}))
        elif resource.kind == ResourceKind.DEPLOYMENT:
            replicas = resource.replicas or 1
            deployment = DeploymentState(
                id=resource.id,
                name=resource.name,
                namespace=resource.namespace,
                desired_replicas=replicas,
                template_labels=dict(resource.pod_template_labels),
                next_index=replicas,
            )
            deployments.append(deployment)
            for index in range(replicas):
                pods.append(_new_pod(deployment, index, ready_at))
                events.append(ClusterEvent(0, EventKind.POD_SCHEDULED, {"pod": pods[-1].id, "owner": deployment.id}))
        elif resource.kind == ResourceKind.SERVICE:
            services.append(
                ServiceState(
                    id=resource.id,
                    name=resource.name,
                    namespace=resource.namespace,
                    selector=dict(resource.selector),
                    port=resource.port or 80,
                ),
            )

    for service in services:
        if not any(pod.matches(service.namespace, service.selector) for pod in pods):
            detail = {
                "reason": "UnsatisfiableService",
                "service": service.id,
                "selector": format_selector(service.selector),
            }
            events.append(ClusterEvent(0, EventKind.WARNING, detail))

    state = ClusterState(
        clock_s=0,
        pods=tuple(pods),
        deployments=tuple(deployments),
        services=tuple(services),
        active_faults=(),
        rng_seed=seed,
        timing=timing,
    )
    return state, events


def _expire_faults(state: ClusterState, clock: int, events: Events) -> ClusterState:
    remaining = []
    released: set[str] = set()
    for active in state.active_faults:
        if active.end_s > clock:
            remaining.append(active)
            continue
        events.append(ClusterEvent(clock, EventKind.FAULT_ENDED, {"fault": active.fault.name}))
        if active.subtype == FaultSubtype.POD_FAILURE:
            released.update(active.pod_ids)
    state = replace(state, active_faults=tuple(remaining))
    if not released:
        return state
    still_held = state.held_pod_ids()
    pods = tuple(
        replace(pod, down_since_s=clock)
        if pod.id in released and pod.id not in still_held and pod.phase == PodPhase.FAILED
        else pod
        for pod in state.pods
    )
    return replace(state, pods=pods)


def _reconcile(state: ClusterState, clock: int, events: Events) -> ClusterState:
    held = state.held_pod_ids()
    pods = list(state.pods)
    deployments = []
    restart_delay = state.timing.restart_delay_s

    for deployment in state.deployments:
        next_index = deployment.next_index
        for pod in [p for p in pods if p.owner == deployment.id]:
            if pod.alive or pod.id in held:
                continue
            down_since = pod.down_since_s if pod.down_since_s is not None else clock
            replacement = _new_pod(deployment, next_index, max(down_since + restart_delay, clock))
            next_index += 1
            pods[pods.index(pod)] = replacement
            events.append(
                ClusterEvent(clock, EventKind.POD_SCHEDULED, {"pod": replacement.id, "replaces": pod.id}),
            )

        owned = [p for p in pods if p.owner == deployment.id and (p.alive or p.id in held)]
        for _ in range(deployment.desired_replicas - len(owned)):
            pod = _new_pod(deployment, next_index, clock + state.timing.pod_startup_delay_s)
            next_index += 1
            pods.append(pod)
            events.append(ClusterEvent(clock, EventKind.POD_SCHEDULED, {"pod": pod.id, "owner": deployment.id}))
        deployments.append(replace(deployment, next_index=next_index))

    return replace(state, pods=tuple(pods), deployments=tuple(deployments))


def _promote_pending(state: ClusterState, clock: int, events: Events) -> ClusterState:
    pods = []
    for pod in state.pods:
        if pod.phase == PodPhase.PENDING and (pod.pending_until_s or 0) <= clock:
            promoted = replace(pod, phase=PodPhase.RUNNING, pending_until_s=None)
            events.append(ClusterEvent(clock, EventKind.POD_READY, {"pod": pod.id}))
            pods.append(promoted)
        else:
            pods.append(pod)
    return replace(state, pods=tuple(pods))


def _restart_standalone(state: ClusterState, clock: int, events: Events) -> ClusterState:
    held = state.held_pod_ids()
    restart_delay = state.timing.restart_delay_s
    pods = []
    for pod in state.pods:
        if (
            pod.owner is None
            and pod.phase == PodPhase.FAILED
            and pod.id not in held
            and pod.restart_policy != RestartPolicy.NEVER
            and (pod.down_since_s or 0) + restart_delay <= clock
        ):
            restarted = replace(pod, phase=PodPhase.RUNNING, down_since_s=None, restarts=pod.restarts + 1)
            detail = {"pod": pod.id, "restarts": str(restarted.restarts)}
            events.append(ClusterEvent(clock, EventKind.POD_RESTARTED, detail))
            pods.append(restarted)
        else:
            pods.append(pod)
    return replace(state, pods=tuple(pods))


def _tick(state: ClusterState) -> tuple[ClusterState, Events]:
    clock = state.clock_s + 1
    events: Events = []
    state = replace(state, clock_s=clock)
    state = _expire_faults(state, clock, events)
    state = _reconcile(state, clock, events)
    state = _promote_pending(state, clock, events)
    state = _restart_standalone(state, clock, events)
    return state, events


def step(state: ClusterState, dt_s: int = 1) -> tuple[ClusterState, Events]:
    """Advance the clock by ``dt_s`` one-second ticks."""
    if dt_s < 1:
        msg = f"cannot step by {dt_s}s"
        raise InvariantViolation(msg)
    events: Events = []
    for _ in range(dt_s):
        state, tick_events = _tick(state)
        events.extend(tick_events)
    return state, events


def select_pods(state: ClusterState, fault: FaultSpec) -> list[PodState]:
    selector = fault.selector
    candidates = [pod for pod in state.matching_pods(selector.namespace, selector.labels) if pod.alive]
    if not candidates:
        raise SelectorMatchesNothing(selector.describe())
    rng = random.Random(f"{state.rng_seed}:{state.clock_s}:{fault.name}")  # noqa: S311
    match selector.mode:
        case SelectorMode.ALL:
            return candidates
        case SelectorMode.ONE:
            return [rng.choice(candidates)]
        case SelectorMode.FIXED_COUNT:
            chosen = rng.sample(candidates, min(selector.count or 1, len(candidates)))
            return sorted(chosen, key=lambda pod: pod.id)


def inject_fault(state: ClusterState, fault: FaultSpec, duration_s: int) -> tuple[ClusterState, Events]:
    """Start ``fault`` at the current clock; pod faults take effect immediately."""
    if duration_s < 1:
        msg = f"fault {fault.name} needs a positive duration"
        raise InvariantViolation(msg)
    clock = state.clock_s
    chosen = select_pods(state, fault)
    chosen_ids = tuple(pod.id for pod in chosen)
    events = [
        ClusterEvent(
            clock,
            EventKind.FAULT_STARTED,
            {
                "fault": fault.name,
                "subtype": fault.subtype.value,
                "pods": ",".join(chosen_ids),
                "until": str(clock + duration_s),
            },
        ),
    ]

    pods = state.pods
    if fault.subtype in (FaultSubtype.POD_KILL, FaultSubtype.POD_FAILURE):
        pods = tuple(
            replace(pod, phase=PodPhase.FAILED, pending_until_s=None, down_since_s=clock)
            if pod.id in chosen_ids
            else pod
            for pod in pods
        )
        events.extend(
            ClusterEvent(clock, EventKind.POD_KILLED, {"pod": pod_id, "fault": fault.name}) for pod_id in chosen_ids
        )

    active = ActiveFault(fault=fault, started_s=clock, end_s=clock + duration_s, pod_ids=chosen_ids)
    return replace(state, pods=pods, active_faults=(*state.active_faults, active)), events
