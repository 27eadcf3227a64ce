"""Steady-state definition: draft, inspect, threshold, VaC, sufficiency."""

from __future__ import annotations

import logging
from typing import Any

from chaoscycle.agents.checks import construct
from chaoscycle.agents.context import as_json
from chaoscycle.agents.context import render_context
from chaoscycle.agents.context import render_manifests
from chaoscycle.agents.context import render_steady_states
from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.enums import Phase
from chaoscycle.core.enums import ProbeTool
from chaoscycle.core.exceptions import DuplicateStateExhausted
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import OutputViolation
from chaoscycle.core.exceptions import SelectorUnresolvableExhausted
from chaoscycle.core.exceptions import ThresholdInconsistent
from chaoscycle.core.records import ProcessedContext
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.values import Measurement
from chaoscycle.core.values import ProbeSpec
from chaoscycle.core.values import SteadyState
from chaoscycle.core.values import Threshold
from chaoscycle.core.values import VaCSpec
from chaoscycle.core.values import format_selector
from chaoscycle.hypothesis.drafts import SteadyStateDraft
from chaoscycle.hypothesis.drafts import SufficiencyDecision
from chaoscycle.simulator.services.cluster import ClusterBackend
from chaoscycle.simulator.services.probes import default_aggregation

logger = logging.getLogger(__name__)

BASELINE_MAX_S = 10
DEFAULT_MAX_STEADY_STATES = 4
# one retry after a name collision; schema failures keep the default budget
NAME_COLLISION_REJECTIONS = 2


def check_probe_target(probe: ProbeSpec, manifest_set: ManifestSet) -> None:
    """The probe must point at something the manifests deploy."""
    if probe.tool == ProbeTool.CLUSTER_API:
        if not manifest_set.selector_matches(probe.namespace, probe.selector):
            msg = f"selector {probe.namespace}/{format_selector(probe.selector)} matches no pod in the manifests"
            raise OutputViolation(msg, exhausted=SelectorUnresolvableExhausted)
    elif manifest_set.service_for_url(probe.url) is None:
        msg = f"URL {probe.url} does not address a Service of the manifests"
        raise OutputViolation(msg, exhausted=SelectorUnresolvableExhausted)


def draft_steady_state(
    ctx: ProcessedContext,
    manifest_set: ManifestSet,
    existing: list[SteadyState],
    gateway: AgentGateway,
) -> SteadyStateDraft:
    if ctx.rejection is not None:
        msg = "cannot define steady states for rejected instructions"
        raise InvariantViolation(msg)
    taken = {state.name for state in existing}
    measured = {state.probe.target_key for state in existing}
    context = {
        "system": render_context(ctx),
        "manifests": render_manifests(manifest_set),
        "existing_steady_states": render_steady_states(existing),
    }

    def check_name(parsed: dict[str, Any]) -> None:
        if parsed["name"] in taken:
            msg = f"steady state {parsed['name']} already exists; existing names are {sorted(taken)}"
            raise OutputViolation(msg)

    named = gateway.complete_structured(
        AgentCall(role=AgentRole.STATE_DRAFTER, prompt_context=context),
        Phase.HYP,
        check=check_name,
        exhausted=DuplicateStateExhausted,
        max_rejections=NAME_COLLISION_REJECTIONS,
    ).parsed

    def check_probe(parsed: dict[str, Any]) -> None:
        probe = construct(ProbeSpec, parsed)
        check_probe_target(probe, manifest_set)
        if probe.target_key in measured:
            msg = f"another steady state already measures {probe.quantity} on {probe.describe_target()}"
            raise OutputViolation(msg, exhausted=DuplicateStateExhausted)

    probe_reply = gateway.complete_structured(
        AgentCall(
            role=AgentRole.PROBE_WRITER,
            prompt_context={**context, "steady_state": as_json(named)},
        ),
        Phase.HYP,
        check=check_probe,
        exhausted=SelectorUnresolvableExhausted,
    )
    draft = SteadyStateDraft(
        name=named["name"],
        description=named["description"],
        probe=ProbeSpec.model_validate(probe_reply.parsed),
    )
    logger.info("Drafted steady state %s measuring %s", draft.name, draft.probe.describe_target())
    return draft


def inspect_baseline(draft: SteadyStateDraft, cluster: ClusterBackend) -> Measurement:
    """Measure the current value with a shortened probe run."""
    probe = draft.probe.with_duration(min(BASELINE_MAX_S, draft.probe.duration_s))
    baseline = cluster.measure(probe, default_aggregation(probe.quantity))
    logger.info("Baseline of %s: %s = %g", draft.name, probe.quantity, baseline.aggregate)
    return baseline


def define_threshold(draft: SteadyStateDraft, baseline: Measurement, gateway: AgentGateway) -> Threshold:
    unit = draft.probe.quantity.unit

    def check_threshold(parsed: dict[str, Any]) -> None:
        threshold = construct(Threshold, {**parsed, "unit": unit})
        if not threshold.evaluate(baseline):
            msg = (
                f"threshold {threshold.describe(draft.probe.quantity)} fails on the baseline "
                f"samples {baseline.values}"
            )
            raise OutputViolation(msg)

    reply = gateway.complete_structured(
        AgentCall(
            role=AgentRole.THRESHOLD_SETTER,
            prompt_context={
                "steady_state": as_json({"name": draft.name, "description": draft.description}),
                "probe": as_json(draft.probe.model_dump(mode="json")),
                "baseline": as_json(baseline.model_dump(mode="json")),
            },
        ),
        Phase.HYP,
        check=check_threshold,
        exhausted=ThresholdInconsistent,
    )
    return Threshold.model_validate({**reply.parsed, "unit": unit})


def build_vac(draft: SteadyStateDraft, threshold: Threshold, gateway: AgentGateway | None = None) -> VaCSpec:
    script_text = ""
    if gateway is not None:
        reply = gateway.complete_structured(
            AgentCall(
                role=AgentRole.VAC_BUILDER,
                prompt_context={
                    "probe": as_json(draft.probe.model_dump(mode="json")),
                    "threshold": threshold.describe(draft.probe.quantity),
                },
            ),
            Phase.HYP,
        )
        script_text = reply.parsed["script_text"]
    return VaCSpec(steady_state_name=draft.name, probe=draft.probe, threshold=threshold, script_text=script_text)


def steady_states_sufficient(
    states: list[SteadyState],
    ctx: ProcessedContext,
    gateway: AgentGateway,
    max_steady_states: int = DEFAULT_MAX_STEADY_STATES,
) -> SufficiencyDecision:
    if not states:
        msg = "sufficiency is judged on at least one steady state"
        raise InvariantViolation(msg)
    if len(states) >= max_steady_states:
        return SufficiencyDecision(enough=True, reason=f"reached the cap of {max_steady_states} steady states")
    reply = gateway.complete_structured(
        AgentCall(
            role=AgentRole.SUFFICIENCY_JUDGE,
            prompt_context={"system": render_context(ctx), "steady_states": render_steady_states(states)},
        ),
        Phase.HYP,
    )
    return SufficiencyDecision.model_validate(reply.parsed)


def define_steady_state(
    ctx: ProcessedContext,
    manifest_set: ManifestSet,
    existing: list[SteadyState],
    cluster: ClusterBackend,
    gateway: AgentGateway,
) -> SteadyState:
    draft = draft_steady_state(ctx, manifest_set, existing, gateway)
    baseline = inspect_baseline(draft, cluster)
    threshold = define_threshold(draft, baseline, gateway)
    vac = build_vac(draft, threshold, gateway)
    return SteadyState(
        name=draft.name,
        description=draft.description,
        probe=draft.probe,
        baseline=baseline,
        threshold=threshold,
        vac=vac,
    )
