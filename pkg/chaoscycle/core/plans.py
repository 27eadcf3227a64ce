"""Experiment plans and the workflow manifests they compile to."""

from __future__ import annotations

from collections import Counter
from typing import Any
from typing import Self

from pydantic import Field
from pydantic import model_validator

from .enums import Stage
from .enums import TaskType
from .enums import TemplateType
from .exceptions import InvariantViolation
from .exceptions import WorkflowUnsound
from .values import FaultSpec
from .values import ValueModel
from .values import VaCSpec

STAGE_ORDER = (Stage.PRE, Stage.FAULT, Stage.POST)


class ScheduledItem(ValueModel):
    stage: Stage
    task: TaskType
    target: str
    start_offset_s: int
    duration_s: int

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.duration_s <= 0:
            raise InvariantViolation(f"{self.describe()} needs a positive duration")
        if self.start_offset_s < 0:
            raise InvariantViolation(f"{self.describe()} starts before its stage")
        if not self.target:
            raise InvariantViolation("scheduled items need a target")
        return self

    @property
    def end_s(self) -> int:
        return self.start_offset_s + self.duration_s

    def describe(self) -> str:
        return f"{self.stage}:{self.task}({self.target})@{self.start_offset_s}+{self.duration_s}s"


class ExperimentPlan(ValueModel):
    """Three-stage schedule of VaC runs and fault injections."""

    pre_s: int
    fault_s: int
    post_s: int
    items: tuple[ScheduledItem, ...]
    timeline_summary: str
    vacs: tuple[VaCSpec, ...]
    faults: tuple[FaultSpec, ...]

    @model_validator(mode="after")
    def _check(self) -> Self:
        for stage in STAGE_ORDER:
            if self.stage_duration(stage) <= 0:
                raise InvariantViolation(f"{stage} stage needs a positive duration")
        if not self.timeline_summary.strip():
            raise InvariantViolation("plans need a timeline summary")

        vac_names = [vac.steady_state_name for vac in self.vacs]
        fault_names = [fault.name for fault in self.faults]
        if len(set(vac_names)) != len(vac_names) or len(set(fault_names)) != len(fault_names):
            raise InvariantViolation("plan references duplicate VaC or fault names")
        if len(set(self.items)) != len(self.items):
            raise InvariantViolation("plan schedules the same item twice")

        for item in self.items:
            known = vac_names if item.task == TaskType.RUN_VAC else fault_names
            if item.target not in known:
                raise InvariantViolation(f"{item.describe()} references an unknown target")
            if item.end_s > self.stage_duration(item.stage):
                raise InvariantViolation(f"{item.describe()} overruns its stage")
            if item.task == TaskType.INJECT_FAULT and item.stage != Stage.FAULT:
                raise InvariantViolation(f"{item.describe()} injects a fault outside the fault stage")

        for name in vac_names:
            for stage in (Stage.PRE, Stage.POST):
                if not any(i.stage == stage and i.task == TaskType.RUN_VAC and i.target == name for i in self.items):
                    raise InvariantViolation(f"steady state {name} is not validated in the {stage} stage")

        injected = Counter(i.target for i in self.items if i.task == TaskType.INJECT_FAULT)
        for name in fault_names:
            if injected[name] != 1:
                raise InvariantViolation(f"fault {name} is injected {injected[name]} times, expected once")
        return self

    def stage_duration(self, stage: Stage) -> int:
        return {Stage.PRE: self.pre_s, Stage.FAULT: self.fault_s, Stage.POST: self.post_s}[stage]

    @property
    def stage_durations(self) -> tuple[int, int, int]:
        return self.pre_s, self.fault_s, self.post_s

    @property
    def total_s(self) -> int:
        return self.pre_s + self.fault_s + self.post_s

    def vac(self, name: str) -> VaCSpec:
        for vac in self.vacs:
            if vac.steady_state_name == name:
                return vac
        raise KeyError(name)

    def fault(self, name: str) -> FaultSpec:
        for fault in self.faults:
            if fault.name == name:
                return fault
        raise KeyError(name)

    def stage_items(self, stage: Stage) -> list[ScheduledItem]:
        return [item for item in self.items if item.stage == stage]

    def item_name(self, item: ScheduledItem) -> str:
        """Deterministic node name: stage slug, task slug, index within the stage."""
        index = self.stage_items(item.stage).index(item)
        if item.task == TaskType.RUN_VAC:
            task = "vac"
        else:
            task = self.fault(item.target).kind.lower()
        return f"{item.stage.slug}-{task}-{index}"

    def named_items(self) -> list[tuple[str, ScheduledItem]]:
        return [(self.item_name(item), item) for stage in STAGE_ORDER for item in self.stage_items(stage)]

    def intent(self) -> dict[str, Any]:
        """Everything a replan must leave alone: schedule, checks and fault behaviour."""
        return {
            "stages": self.stage_durations,
            "items": [item.model_dump(mode="json") for item in self.items],
            "vacs": [
                (vac.steady_state_name, vac.probe.tool, vac.probe.quantity, vac.threshold.model_dump(mode="json"))
                for vac in self.vacs
            ],
            "faults": [
                (f.name, f.kind, f.subtype, f.selector.mode, f.selector.count, sorted(f.params.items()))
                for f in self.faults
            ],
        }


class WorkflowNode(ValueModel):
    name: str
    template_type: TemplateType
    deadline_s: int | None = None
    children: tuple[str, ...] = ()
    payload: dict[str, Any] = Field(default_factory=dict)

    @property
    def deadline(self) -> str | None:
        return None if self.deadline_s is None else f"{self.deadline_s}s"


class WorkflowManifest(ValueModel):
    """A compiled Chaos-Mesh-style workflow: an entry node plus a flat list of templates."""

    name: str
    namespace: str = "chaos-mesh"
    entry: str
    templates: tuple[WorkflowNode, ...]

    @model_validator(mode="after")
    def _check(self) -> Self:
        names = [node.name for node in self.templates]
        if len(names) != len(set(names)):
            raise WorkflowUnsound("workflow template names must be unique")
        if self.entry not in names:
            raise WorkflowUnsound(f"entry node {self.entry} does not exist")
        by_name = {node.name: node for node in self.templates}
        for node in self.templates:
            for child in node.children:
                if child not in by_name:
                    raise WorkflowUnsound(f"{node.name} references missing child {child}")

        # depth-first cycle check from every node
        state: dict[str, int] = {}

        def visit(name: str) -> None:
            if state.get(name) == 1:
                raise WorkflowUnsound(f"workflow contains a cycle through {name}")
            if state.get(name) == 2:  # noqa: PLR2004
                return
            state[name] = 1
            for child in by_name[name].children:
                visit(child)
            state[name] = 2

        for name in names:
            visit(name)
        return self

    def node(self, name: str) -> WorkflowNode:
        for node in self.templates:
            if node.name == name:
                return node
        raise WorkflowUnsound(f"no workflow node named {name}")

    @property
    def entry_node(self) -> WorkflowNode:
        return self.node(self.entry)
