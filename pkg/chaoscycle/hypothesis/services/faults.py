"""Failure definition: draft a scenario, then refine each fault in turn."""

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
from chaoscycle.core.enums import FAULT_SUBTYPES
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.enums import FaultKind
from chaoscycle.core.enums import FaultSubtype
from chaoscycle.core.enums import Phase
from chaoscycle.core.exceptions import OutputViolation
from chaoscycle.core.exceptions import SelectorUnresolvableExhausted
from chaoscycle.core.records import ProcessedContext
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.values import FailureScenario
from chaoscycle.core.values import FaultSelector
from chaoscycle.core.values import FaultSpec
from chaoscycle.core.values import SteadyState
from chaoscycle.hypothesis.drafts import FaultDraft
from chaoscycle.hypothesis.drafts import ScenarioDraft

logger = logging.getLogger(__name__)


def check_fault_target(fault: FaultSpec, manifest_set: ManifestSet) -> None:
    selector = fault.selector
    if not manifest_set.selector_matches(selector.namespace, selector.labels):
        msg = f"selector {selector.describe()} of fault {fault.name} matches no pod in the manifests"
        raise OutputViolation(msg)


def define_failure_scenario(
    ctx: ProcessedContext,
    states: list[SteadyState],
    gateway: AgentGateway,
) -> ScenarioDraft:
    def check_scenario(parsed: dict[str, Any]) -> None:
        names = [fault["name"] for fault in parsed["faults"]]
        if len(names) != len(set(names)):
            msg = f"fault names must be unique, got {names}"
            raise OutputViolation(msg)
        for fault in parsed["faults"]:
            kind, subtype = FaultKind(fault["kind"]), FaultSubtype(fault["subtype"])
            if subtype not in FAULT_SUBTYPES[kind]:
                allowed = [s.value for s in FAULT_SUBTYPES[kind]]
                msg = f"{subtype} is not a {kind} subtype; choose one of {allowed}"
                raise OutputViolation(msg)

    reply = gateway.complete_structured(
        AgentCall(
            role=AgentRole.SCENARIO_DRAFTER,
            prompt_context={"system": render_context(ctx), "steady_states": render_steady_states(states)},
        ),
        Phase.HYP,
        check=check_scenario,
    )
    draft = ScenarioDraft(
        narrative=reply.parsed["narrative"],
        faults=tuple(FaultDraft.model_validate(fault) for fault in reply.parsed["faults"]),
    )
    logger.info("Failure scenario %r with %d faults", draft.narrative, len(draft.faults))
    return draft


def refine_fault(
    fault: FaultDraft,
    draft: ScenarioDraft,
    manifest_set: ManifestSet,
    gateway: AgentGateway,
) -> FaultSpec:
    def build(parsed: dict[str, Any]) -> FaultSpec:
        selector = construct(
            FaultSelector,
            {
                "namespace": parsed["namespace"],
                "labels": parsed["selector"],
                "mode": parsed["mode"],
                "count": parsed["count"],
            },
        )
        return construct(
            FaultSpec,
            {**fault.model_dump(), "selector": selector, "params": parsed["params"]},
        )

    def check_fault(parsed: dict[str, Any]) -> None:
        check_fault_target(build(parsed), manifest_set)

    reply = gateway.complete_structured(
        AgentCall(
            role=AgentRole.FAULT_REFINER,
            prompt_context={
                "scenario": draft.narrative,
                "fault": as_json(fault.model_dump(mode="json")),
                "manifests": render_manifests(manifest_set),
            },
        ),
        Phase.HYP,
        check=check_fault,
        exhausted=SelectorUnresolvableExhausted,
    )
    spec = build(reply.parsed)
    logger.info("Refined fault %s: %s on %s", spec.name, spec.subtype, spec.selector.describe())
    return spec


def refine_faults(draft: ScenarioDraft, manifest_set: ManifestSet, gateway: AgentGateway) -> FailureScenario:
    """One refinement call per fault, in draft order."""
    faults = tuple(refine_fault(fault, draft, manifest_set, gateway) for fault in draft.faults)
    return FailureScenario(narrative=draft.narrative, faults=faults)
