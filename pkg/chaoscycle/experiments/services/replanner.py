"""Retarget an experiment plan at reconfigured manifests without changing its intent."""

from __future__ import annotations

import logging
from typing import Any

from chaoscycle.agents.checks import construct
from chaoscycle.agents.context import as_json
from chaoscycle.agents.context import render_manifests
from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.enums import Phase
from chaoscycle.core.exceptions import IntentChanged
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import OutputViolation
from chaoscycle.core.exceptions import SelectorUnresolvableExhausted
from chaoscycle.core.plans import ExperimentPlan
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.values import FaultSelector
from chaoscycle.core.values import FaultSpec
from chaoscycle.core.values import ProbeSpec
from chaoscycle.core.values import VaCSpec
from chaoscycle.hypothesis.services.faults import check_fault_target
from chaoscycle.hypothesis.services.steady_states import check_probe_target
from chaoscycle.manifests.services.diff import describe_changes
from chaoscycle.manifests.services.diff import diff_manifest_sets

logger = logging.getLogger(__name__)


def _targets(plan: ExperimentPlan) -> dict[str, Any]:
    return {
        "probes": [
            {
                "steady_state": vac.steady_state_name,
                "namespace": vac.probe.namespace,
                "selector": vac.probe.selector,
                "url": vac.probe.url,
            }
            for vac in plan.vacs
        ],
        "faults": [
            {
                "name": fault.name,
                "kind": fault.kind.value,
                "subtype": fault.subtype.value,
                "namespace": fault.selector.namespace,
                "selector": fault.selector.labels,
            }
            for fault in plan.faults
        ],
    }


def _retarget_vac(vac: VaCSpec, target: dict[str, Any], new_set: ManifestSet) -> VaCSpec:
    probe = construct(
        ProbeSpec,
        {
            **vac.probe.model_dump(),
            "namespace": target["namespace"],
            "selector": target["selector"],
            "url": target["url"],
        },
        exhausted=SelectorUnresolvableExhausted,
    )
    check_probe_target(probe, new_set)
    return VaCSpec(
        steady_state_name=vac.steady_state_name,
        probe=probe,
        threshold=vac.threshold,
        script_text=vac.script_text,
    )


def _retarget_fault(fault: FaultSpec, target: dict[str, Any], new_set: ManifestSet) -> FaultSpec:
    if (target["kind"], target["subtype"]) != (fault.kind.value, fault.subtype.value):
        msg = f"fault {fault.name} changed from {fault.kind}/{fault.subtype} to {target['kind']}/{target['subtype']}"
        raise IntentChanged(msg)
    selector = construct(
        FaultSelector,
        {
            "namespace": target["namespace"],
            "labels": target["selector"],
            "mode": fault.selector.mode,
            "count": fault.selector.count,
        },
        exhausted=SelectorUnresolvableExhausted,
    )
    retargeted = fault.model_copy(update={"selector": selector})
    try:
        check_fault_target(retargeted, new_set)
    except OutputViolation as violation:
        raise OutputViolation(str(violation), exhausted=SelectorUnresolvableExhausted) from violation
    return retargeted


def retarget_plan(prev_plan: ExperimentPlan, parsed: dict[str, Any], new_set: ManifestSet) -> ExperimentPlan:
    """Rewrite probe targets and fault selectors; anything else changing raises IntentChanged."""
    probes = {target["steady_state"]: target for target in parsed["probes"]}
    faults = {target["name"]: target for target in parsed["faults"]}
    vac_names = {vac.steady_state_name for vac in prev_plan.vacs}
    fault_names = {fault.name for fault in prev_plan.faults}
    if set(probes) != vac_names or len(probes) != len(parsed["probes"]):
        msg = f"replan must retarget exactly the steady states {sorted(vac_names)}, got {sorted(probes)}"
        raise IntentChanged(msg)
    if set(faults) != fault_names or len(faults) != len(parsed["faults"]):
        msg = f"replan must retarget exactly the faults {sorted(fault_names)}, got {sorted(faults)}"
        raise IntentChanged(msg)

    plan = ExperimentPlan(
        pre_s=prev_plan.pre_s,
        fault_s=prev_plan.fault_s,
        post_s=prev_plan.post_s,
        items=prev_plan.items,
        timeline_summary=prev_plan.timeline_summary,
        vacs=tuple(_retarget_vac(vac, probes[vac.steady_state_name], new_set) for vac in prev_plan.vacs),
        faults=tuple(_retarget_fault(fault, faults[fault.name], new_set) for fault in prev_plan.faults),
    )
    if plan.intent() != prev_plan.intent():
        msg = "replanned experiment differs beyond probe targets and fault selectors"
        raise IntentChanged(msg)
    return plan


def replan_experiment(
    prev_plan: ExperimentPlan,
    old_set: ManifestSet,
    new_set: ManifestSet,
    gateway: AgentGateway,
) -> ExperimentPlan:
    changes = diff_manifest_sets(old_set, new_set)
    if changes.is_empty:
        msg = "replanning needs a manifest change"
        raise InvariantViolation(msg)

    def check_replan(parsed: dict[str, Any]) -> None:
        retarget_plan(prev_plan, parsed, new_set)

    reply = gateway.complete_structured(
        AgentCall(
            role=AgentRole.REPLANNER,
            prompt_context={
                "current_targets": as_json(_targets(prev_plan)),
                "changes": describe_changes(changes),
                "manifests": render_manifests(new_set),
            },
        ),
        Phase.EXPT,
        check=check_replan,
        exhausted=SelectorUnresolvableExhausted,
    )
    plan = retarget_plan(prev_plan, reply.parsed, new_set)
    touched = len(changes.added) + len(changes.removed) + len(changes.modified)
    logger.info("Replanned experiment against %d changed files", touched)
    return plan
