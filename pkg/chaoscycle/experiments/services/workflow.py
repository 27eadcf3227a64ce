"""Compile experiment plans into Chaos Mesh workflows and render them."""

from __future__ import annotations

from itertools import groupby
from typing import Any

import yaml

from chaoscycle.core.enums import FaultKind
from chaoscycle.core.enums import FaultSubtype
from chaoscycle.core.enums import SelectorMode
from chaoscycle.core.enums import Stage
from chaoscycle.core.enums import TaskType
from chaoscycle.core.enums import TemplateType
from chaoscycle.core.plans import STAGE_ORDER
from chaoscycle.core.plans import ExperimentPlan
from chaoscycle.core.plans import ScheduledItem
from chaoscycle.core.plans import WorkflowManifest
from chaoscycle.core.plans import WorkflowNode
from chaoscycle.core.values import FaultSpec

ENTRY = "chaos-experiment"
STAGE_NODES = {
    Stage.PRE: "pre-validation",
    Stage.FAULT: "fault-injection",
    Stage.POST: "post-validation",
}
FAULT_TEMPLATES = {
    FaultKind.POD_CHAOS: TemplateType.POD_CHAOS,
    FaultKind.NETWORK_CHAOS: TemplateType.NETWORK_CHAOS,
    FaultKind.STRESS_CHAOS: TemplateType.STRESS_CHAOS,
}
VAC_RUNNER_IMAGE = "chaoscycle/vac-runner:latest"


def _item_node(plan: ExperimentPlan, name: str, item: ScheduledItem) -> WorkflowNode:
    payload: dict[str, Any] = {"item": item.model_dump(mode="json")}
    if item.task == TaskType.RUN_VAC:
        template_type = TemplateType.TASK
        payload["vac"] = plan.vac(item.target).model_dump(mode="json")
    else:
        fault = plan.fault(item.target)
        template_type = FAULT_TEMPLATES[fault.kind]
        payload["fault"] = fault.model_dump(mode="json")
    return WorkflowNode(name=name, template_type=template_type, deadline_s=item.duration_s, payload=payload)


def _compile_stage(plan: ExperimentPlan, stage: Stage) -> list[WorkflowNode]:
    slug = stage.slug
    named = [(name, item) for name, item in plan.named_items() if item.stage == stage]
    nodes: list[WorkflowNode] = []
    groups: list[tuple[str, int]] = []  # (node name, end offset)

    ordered = sorted(named, key=lambda pair: pair[1].start_offset_s)
    for index, (offset, group) in enumerate(groupby(ordered, key=lambda pair: pair[1].start_offset_s)):
        members = list(group)
        span = max(item.duration_s for _, item in members)
        nodes.extend(_item_node(plan, name, item) for name, item in members)
        parallel = WorkflowNode(
            name=f"{slug}-parallel-{index}",
            template_type=TemplateType.PARALLEL,
            deadline_s=span,
            children=tuple(name for name, _ in members),
        )
        nodes.append(parallel)
        if offset == 0:
            groups.append((parallel.name, span))
            continue
        suspend = WorkflowNode(name=f"{slug}-suspend-{index}", template_type=TemplateType.SUSPEND, deadline_s=offset)
        branch = WorkflowNode(
            name=f"{slug}-branch-{index}",
            template_type=TemplateType.SERIAL,
            deadline_s=offset + span,
            children=(suspend.name, parallel.name),
        )
        nodes.extend((suspend, branch))
        groups.append((branch.name, offset + span))

    if len(groups) == 1:
        children: tuple[str, ...] = (groups[0][0],)
    else:
        offsets = WorkflowNode(
            name=f"{slug}-offsets",
            template_type=TemplateType.PARALLEL,
            deadline_s=max(end for _, end in groups),
            children=tuple(name for name, _ in groups),
        )
        nodes.append(offsets)
        children = (offsets.name,)
    stage_node = WorkflowNode(
        name=STAGE_NODES[stage],
        template_type=TemplateType.SERIAL,
        deadline_s=plan.stage_duration(stage),
        children=children,
    )
    return [stage_node, *nodes]


def compile_workflow(plan: ExperimentPlan, name: str = ENTRY) -> WorkflowManifest:
    """Entry Serial over three stage Serials; equal offsets share a Parallel, later ones wait in a Suspend."""
    entry = WorkflowNode(
        name=ENTRY,
        template_type=TemplateType.SERIAL,
        deadline_s=plan.total_s,
        children=tuple(STAGE_NODES[stage] for stage in STAGE_ORDER),
    )
    templates = [entry]
    for stage in STAGE_ORDER:
        templates.extend(_compile_stage(plan, stage))
    return WorkflowManifest(name=name, entry=ENTRY, templates=tuple(templates))


# Rendering
# ------------------------------------------------------------------------------


def _selector_block(fault: FaultSpec) -> dict[str, Any]:
    selector = fault.selector
    block: dict[str, Any] = {
        "mode": {SelectorMode.ONE: "one", SelectorMode.ALL: "all", SelectorMode.FIXED_COUNT: "fixed"}[selector.mode],
    }
    if selector.mode == SelectorMode.FIXED_COUNT:
        block["value"] = str(selector.count)
    block["selector"] = {
        "namespaces": [selector.namespace],
        "labelSelectors": dict(sorted(selector.labels.items())),
    }
    return block


def _fault_block(fault: FaultSpec, duration: str) -> tuple[str, dict[str, Any]]:
    match fault.subtype:
        case FaultSubtype.POD_KILL:
            return "podChaos", {
                "action": "pod-kill",
                **_selector_block(fault),
                "gracePeriod": int(fault.param("kill_grace_s")),
            }
        case FaultSubtype.POD_FAILURE:
            return "podChaos", {"action": "pod-failure", **_selector_block(fault), "duration": duration}
        case FaultSubtype.DELAY:
            return "networkChaos", {
                "action": "delay",
                **_selector_block(fault),
                "delay": {"latency": f"{fault.param('delay_ms'):g}ms"},
                "duration": duration,
            }
        case FaultSubtype.LOSS:
            return "networkChaos", {
                "action": "loss",
                **_selector_block(fault),
                "loss": {"loss": f"{fault.param('loss_pct'):g}"},
                "duration": duration,
            }
        case FaultSubtype.CPU:
            return "stressChaos", {
                **_selector_block(fault),
                "stressors": {"cpu": {"workers": int(fault.param("cpu_workers")), "load": 100}},
                "duration": duration,
            }


def _template(node: WorkflowNode) -> dict[str, Any]:
    template: dict[str, Any] = {"name": node.name, "templateType": node.template_type.value}
    if node.deadline is not None:
        template["deadline"] = node.deadline
    if node.children:
        template["children"] = list(node.children)
    if "fault" in node.payload:
        key, block = _fault_block(FaultSpec.model_validate(node.payload["fault"]), node.deadline or "")
        template[key] = block
    elif "vac" in node.payload:
        template["task"] = {
            "container": {
                "name": node.name,
                "image": VAC_RUNNER_IMAGE,
                "command": [
                    "vac-runner",
                    "--steady-state",
                    node.payload["vac"]["steady_state_name"],
                    "--duration",
                    node.deadline,
                ],
            },
        }
    return template


def to_document(workflow: WorkflowManifest) -> dict[str, Any]:
    return {
        "apiVersion": "chaos-mesh.org/v1alpha1",
        "kind": "Workflow",
        "metadata": {"name": workflow.name, "namespace": workflow.namespace},
        "spec": {
            "entry": workflow.entry,
            "templates": [_template(node) for node in workflow.templates],
        },
    }


def render_workflow_yaml(workflow: WorkflowManifest) -> str:
    return yaml.safe_dump(to_document(workflow), sort_keys=False, default_flow_style=False)
