import pytest

from chaoscycle.conftest import project_dir
from chaoscycle.core.exceptions import IntentChanged
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import OutputViolation
from chaoscycle.core.exceptions import SelectorUnresolvableExhausted
from chaoscycle.core.loaders import build_manifest_set
from chaoscycle.core.tests.factories import ExperimentPlanFactory
from chaoscycle.experiments.services.replanner import replan_experiment
from chaoscycle.experiments.services.replanner import retarget_plan


def targets(labels=None, kind="PodChaos", subtype="pod-kill"):
    labels = labels or {"app": "nginx"}
    return {
        "probes": [{"steady_state": "pod-availability", "namespace": "default", "selector": labels, "url": ""}],
        "faults": [
            {
                "name": "cyberattack-pod-kill",
                "kind": kind,
                "subtype": subtype,
                "namespace": "default",
                "selector": labels,
            },
        ],
    }


@pytest.fixture
def relabelled_set():
    text = (project_dir("nginx_resilient") / "Deployment.yml").read_text().replace("app: nginx", "app: web")
    return build_manifest_set([("Deployment.yml", text)], "")


class TestRetargetPlan:
    def test_unchanged_targets(self, resilient_set):
        plan = ExperimentPlanFactory()
        assert retarget_plan(plan, targets(), resilient_set) == plan

    def test_new_labels(self, relabelled_set):
        plan = ExperimentPlanFactory()
        replanned = retarget_plan(plan, targets({"app": "web"}), relabelled_set)
        assert replanned.vacs[0].probe.selector == {"app": "web"}
        assert replanned.faults[0].selector.labels == {"app": "web"}
        assert replanned.intent() == plan.intent()
        assert replanned.vacs[0].threshold == plan.vacs[0].threshold

    def test_fault_kind_is_fixed(self, resilient_set):
        with pytest.raises(IntentChanged, match="changed from PodChaos/pod-kill"):
            retarget_plan(ExperimentPlanFactory(), targets(subtype="pod-failure"), resilient_set)

    def test_every_fault_is_kept(self, resilient_set):
        parsed = {**targets(), "faults": []}
        with pytest.raises(IntentChanged, match="exactly the faults"):
            retarget_plan(ExperimentPlanFactory(), parsed, resilient_set)

    def test_every_state_is_kept(self, resilient_set):
        parsed = targets()
        parsed["probes"].append({**parsed["probes"][0], "steady_state": "latency"})
        with pytest.raises(IntentChanged, match="exactly the steady states"):
            retarget_plan(ExperimentPlanFactory(), parsed, resilient_set)

    def test_targets_must_resolve(self, relabelled_set):
        with pytest.raises(OutputViolation) as excinfo:
            retarget_plan(ExperimentPlanFactory(), targets(), relabelled_set)
        assert excinfo.value.exhausted is SelectorUnresolvableExhausted


class TestReplanExperiment:
    def test_from_transcript(self, nginx_set, resilient_set, replay_gateway):
        plan = ExperimentPlanFactory()
        assert replan_experiment(plan, nginx_set, resilient_set, replay_gateway("nginx")) == plan

    def test_needs_a_change(self, nginx_set, scripted_gateway):
        with pytest.raises(InvariantViolation):
            replan_experiment(ExperimentPlanFactory(), nginx_set, nginx_set, scripted_gateway())

    def test_intent_change_is_not_retried(self, nginx_set, resilient_set, scripted_gateway):
        gateway = scripted_gateway(targets(kind="NetworkChaos", subtype="delay"))
        with pytest.raises(IntentChanged):
            replan_experiment(ExperimentPlanFactory(), nginx_set, resilient_set, gateway)
        assert len(gateway.backend.calls) == 1

    def test_unresolvable_targets(self, nginx_set, relabelled_set, scripted_gateway):
        gateway = scripted_gateway(targets(), targets(), targets())
        with pytest.raises(SelectorUnresolvableExhausted):
            replan_experiment(ExperimentPlanFactory(), nginx_set, relabelled_set, gateway)
        assert "changes" in gateway.backend.calls[0][0].prompt_context
