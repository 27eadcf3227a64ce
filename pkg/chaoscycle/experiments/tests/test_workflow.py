import pytest
import yaml

from chaoscycle.conftest import GOLDEN
from chaoscycle.core.enums import FaultKind
from chaoscycle.core.enums import FaultSubtype
from chaoscycle.core.enums import SelectorMode
from chaoscycle.core.enums import Stage
from chaoscycle.core.enums import TaskType
from chaoscycle.core.enums import TemplateType
from chaoscycle.core.exceptions import WorkflowUnsound
from chaoscycle.core.plans import WorkflowManifest
from chaoscycle.core.plans import WorkflowNode
from chaoscycle.core.tests.factories import ExperimentPlanFactory
from chaoscycle.core.tests.factories import FaultSelectorFactory
from chaoscycle.core.tests.factories import FaultSpecFactory
from chaoscycle.core.tests.factories import ProbeSpecFactory
from chaoscycle.core.tests.factories import ScheduledItemFactory
from chaoscycle.core.tests.factories import VaCSpecFactory
from chaoscycle.experiments.services.executor import schedule
from chaoscycle.experiments.services.workflow import compile_workflow
from chaoscycle.experiments.services.workflow import render_workflow_yaml
from chaoscycle.experiments.services.workflow import to_document


@pytest.fixture
def staggered_plan():
    replicas = VaCSpecFactory(steady_state_name="replicas", probe=ProbeSpecFactory(selector={"app": "web"}))
    vacs = (VaCSpecFactory(steady_state_name="pods"), replicas)
    kill = {"stage": Stage.FAULT, "task": TaskType.INJECT_FAULT, "target": "cyberattack-pod-kill", "duration_s": 30}
    items = (
        ScheduledItemFactory(target="pods"),
        ScheduledItemFactory(target="replicas", start_offset_s=5, duration_s=10),
        ScheduledItemFactory(**kill),
        ScheduledItemFactory(stage=Stage.POST, target="pods"),
        ScheduledItemFactory(stage=Stage.POST, target="replicas"),
    )
    return ExperimentPlanFactory(vacs=vacs, items=items)


class TestCompileWorkflow:
    def test_matches_golden_document(self):
        golden = yaml.safe_load((GOLDEN / "nginx_workflow.yaml").read_text())
        assert to_document(compile_workflow(ExperimentPlanFactory())) == golden

    def test_compilation_is_deterministic(self):
        plan = ExperimentPlanFactory()
        assert render_workflow_yaml(compile_workflow(plan)) == render_workflow_yaml(compile_workflow(plan))

    def test_later_offsets_wait_in_a_suspend(self, staggered_plan):
        workflow = compile_workflow(staggered_plan)
        offsets = workflow.node("pre-offsets")
        assert offsets.children == ("pre-parallel-0", "pre-branch-1")
        assert workflow.node("pre-branch-1").children == ("pre-suspend-1", "pre-parallel-1")
        assert workflow.node("pre-suspend-1").deadline == "5s"
        assert workflow.node("pre-validation").children == ("pre-offsets",)
        post = workflow.node("post-parallel-0")
        assert post.children == ("post-vac-0", "post-vac-1")

    def test_network_fault_block(self):
        fault = FaultSpecFactory(
            name="lag",
            kind=FaultKind.NETWORK_CHAOS,
            subtype=FaultSubtype.DELAY,
            params={"delay_ms": 200},
            selector=FaultSelectorFactory(mode=SelectorMode.FIXED_COUNT, count=2),
        )
        document = to_document(compile_workflow(ExperimentPlanFactory(faults=(fault,))))
        [template] = [t for t in document["spec"]["templates"] if t["name"] == "fault-networkchaos-0"]
        assert template["templateType"] == TemplateType.NETWORK_CHAOS
        assert template["networkChaos"] == {
            "action": "delay",
            "mode": "fixed",
            "value": "2",
            "selector": {"namespaces": ["default"], "labelSelectors": {"app": "nginx"}},
            "delay": {"latency": "200ms"},
            "duration": "30s",
        }

    def test_stress_fault_block(self):
        fault = FaultSpecFactory(
            name="burn",
            kind=FaultKind.STRESS_CHAOS,
            subtype=FaultSubtype.CPU,
            params={"cpu_workers": 2},
            selector=FaultSelectorFactory(mode=SelectorMode.ALL),
        )
        document = to_document(compile_workflow(ExperimentPlanFactory(faults=(fault,))))
        [template] = [t for t in document["spec"]["templates"] if t["name"] == "fault-stresschaos-0"]
        assert template["stressChaos"]["stressors"] == {"cpu": {"workers": 2, "load": 100}}
        assert template["stressChaos"]["mode"] == "all"


class TestSchedule:
    def test_stage_offsets(self):
        total, timed = schedule(compile_workflow(ExperimentPlanFactory()))
        assert total == 60  # noqa: PLR2004
        assert [(t.node.name, t.start_s, t.duration_s) for t in timed] == [
            ("pre-vac-0", 0, 15),
            ("fault-podchaos-0", 15, 30),
            ("post-vac-0", 45, 15),
        ]

    def test_suspended_items_start_late(self, staggered_plan):
        _, timed = schedule(compile_workflow(staggered_plan))
        starts = {t.node.name: t.start_s for t in timed}
        assert starts["pre-vac-0"] == 0
        assert starts["pre-vac-1"] == 5  # noqa: PLR2004
        assert starts["post-vac-1"] == 45  # noqa: PLR2004

    def test_children_must_fit_the_deadline(self):
        workflow = WorkflowManifest(
            name="w",
            entry="root",
            templates=(
                WorkflowNode(name="root", template_type=TemplateType.SERIAL, deadline_s=5, children=("wait",)),
                WorkflowNode(name="wait", template_type=TemplateType.SUSPEND, deadline_s=10),
            ),
        )
        with pytest.raises(WorkflowUnsound, match="overrun"):
            schedule(workflow)

    def test_leaves_need_deadlines(self):
        workflow = WorkflowManifest(
            name="w",
            entry="root",
            templates=(
                WorkflowNode(name="root", template_type=TemplateType.SERIAL, children=("task",)),
                WorkflowNode(name="task", template_type=TemplateType.TASK),
            ),
        )
        with pytest.raises(WorkflowUnsound, match="needs a deadline"):
            schedule(workflow)
