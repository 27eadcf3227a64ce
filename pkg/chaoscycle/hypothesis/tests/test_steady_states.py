import pytest

from chaoscycle.core.enums import Aggregation
from chaoscycle.core.enums import Comparator
from chaoscycle.core.enums import ProbeTool
from chaoscycle.core.enums import Quantity
from chaoscycle.core.enums import Unit
from chaoscycle.core.exceptions import DuplicateStateExhausted
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import OutputViolation
from chaoscycle.core.exceptions import SelectorUnresolvableExhausted
from chaoscycle.core.exceptions import ThresholdInconsistent
from chaoscycle.core.records import ProcessedContext
from chaoscycle.core.tests.factories import MeasurementFactory
from chaoscycle.core.tests.factories import ProbeSpecFactory
from chaoscycle.core.tests.factories import SteadyStateFactory
from chaoscycle.hypothesis.drafts import SteadyStateDraft
from chaoscycle.hypothesis.services.steady_states import build_vac
from chaoscycle.hypothesis.services.steady_states import check_probe_target
from chaoscycle.hypothesis.services.steady_states import define_steady_state
from chaoscycle.hypothesis.services.steady_states import define_threshold
from chaoscycle.hypothesis.services.steady_states import draft_steady_state
from chaoscycle.hypothesis.services.steady_states import inspect_baseline
from chaoscycle.hypothesis.services.steady_states import steady_states_sufficient

POD_COUNT = {"tool": "ClusterApi", "quantity": "PodCount", "namespace": "default", "selector": {"app": "nginx"}}
READY = {**POD_COUNT, "quantity": "ReadyReplicaCount"}
GHOST = {**POD_COUNT, "selector": {"app": "ghost"}}


def draft(**kwargs):
    return SteadyStateDraft(name="pod-availability", description="pod runs", probe=ProbeSpecFactory(**kwargs))


class TestCheckProbeTarget:
    def test_selector_must_match_a_pod(self, nginx_set):
        check_probe_target(ProbeSpecFactory(), nginx_set)
        with pytest.raises(OutputViolation) as excinfo:
            check_probe_target(ProbeSpecFactory(selector={"app": "ghost"}), nginx_set)
        assert excinfo.value.exhausted is SelectorUnresolvableExhausted

    def test_url_must_address_a_service(self, nginx_set):
        def http(url):
            return ProbeSpecFactory(tool=ProbeTool.HTTP_LOAD, quantity=Quantity.SUCCESS_RATE, selector={}, url=url)

        check_probe_target(http("http://example-service.default.svc.cluster.local:80"), nginx_set)
        with pytest.raises(OutputViolation, match="does not address"):
            check_probe_target(http("http://front-end:80"), nginx_set)


class TestDraftSteadyState:
    def test_name_collision_is_retried(self, nginx_set, nginx_context, scripted_gateway):
        gateway = scripted_gateway(
            {"name": "pod-availability", "description": "again"},
            {"name": "replica-readiness", "description": "replicas ready"},
            READY,
        )
        existing = [SteadyStateFactory(name="pod-availability")]
        result = draft_steady_state(nginx_context, nginx_set, existing, gateway)
        assert result.name == "replica-readiness"
        assert result.probe.quantity == Quantity.READY_REPLICA_COUNT
        assert "already exists" in gateway.backend.calls[1][2][-1]["content"]

    def test_two_collisions_give_up(self, nginx_set, nginx_context, scripted_gateway):
        taken = {"name": "pod-availability", "description": "again"}
        gateway = scripted_gateway(taken, taken)
        with pytest.raises(DuplicateStateExhausted):
            draft_steady_state(nginx_context, nginx_set, [SteadyStateFactory(name="pod-availability")], gateway)

    def test_schema_failures_keep_the_full_retry_budget(self, nginx_set, nginx_context, scripted_gateway):
        gateway = scripted_gateway("not json", "{}", {"name": "replica-readiness", "description": "ready"}, READY)
        result = draft_steady_state(nginx_context, nginx_set, [], gateway)
        assert result.name == "replica-readiness"
        assert gateway.backend.outputs == []

    def test_unresolvable_selector(self, nginx_set, nginx_context, scripted_gateway):
        gateway = scripted_gateway({"name": "web", "description": "x"}, GHOST, GHOST, GHOST)
        with pytest.raises(SelectorUnresolvableExhausted):
            draft_steady_state(nginx_context, nginx_set, [], gateway)

    def test_same_target_twice(self, nginx_set, nginx_context, scripted_gateway):
        gateway = scripted_gateway({"name": "web", "description": "x"}, POD_COUNT, POD_COUNT, POD_COUNT)
        with pytest.raises(DuplicateStateExhausted, match="already measures"):
            draft_steady_state(nginx_context, nginx_set, [SteadyStateFactory()], gateway)

    def test_rejected_context(self, nginx_set, scripted_gateway):
        with pytest.raises(InvariantViolation):
            draft_steady_state(ProcessedContext.rejected("unsafe"), nginx_set, [], scripted_gateway())


class TestThreshold:
    def test_baseline_is_shortened(self, nginx_set, deployed_cluster):
        cluster = deployed_cluster(nginx_set)
        start = cluster.clock_s
        baseline = inspect_baseline(draft(duration_s=60), cluster)
        assert len(baseline.samples) == 10  # noqa: PLR2004
        assert cluster.clock_s == start + 10
        assert baseline.aggregate == 1.0

    def test_threshold_takes_the_probe_unit(self, scripted_gateway):
        gateway = scripted_gateway({"comparator": "GE", "value": 1, "aggregation": "EverySample"})
        threshold = define_threshold(draft(), MeasurementFactory(), gateway)
        assert (threshold.comparator, threshold.unit) == (Comparator.GE, Unit.COUNT)

    def test_threshold_must_hold_on_the_baseline(self, scripted_gateway):
        too_strict = {"comparator": "GE", "value": 2, "aggregation": "EverySample"}
        gateway = scripted_gateway(too_strict, too_strict, too_strict)
        with pytest.raises(ThresholdInconsistent, match="fails on the baseline"):
            define_threshold(draft(), MeasurementFactory(), gateway)

    def test_threshold_retry(self, scripted_gateway):
        gateway = scripted_gateway(
            {"comparator": "GE", "value": 0.5, "aggregation": "EverySample"},
            {"comparator": "GE", "value": 1, "aggregation": "FinalSample"},
        )
        threshold = define_threshold(draft(), MeasurementFactory(), gateway)
        assert threshold.aggregation == Aggregation.FINAL_SAMPLE
        assert "non-negative integer" in gateway.backend.calls[1][2][-1]["content"]


class TestVaC:
    def test_script_from_the_agent(self, scripted_gateway):
        gateway = scripted_gateway({"script_text": "assert running >= 1"})
        vac = build_vac(draft(), SteadyStateFactory().threshold, gateway)
        assert vac.script_text == "assert running >= 1"
        assert vac.steady_state_name == "pod-availability"

    def test_without_an_agent(self):
        vac = build_vac(draft(), SteadyStateFactory().threshold)
        assert vac.script_text == ""


class TestSufficiency:
    def test_cap_skips_the_agent(self, nginx_context, scripted_gateway):
        gateway = scripted_gateway()
        states = [SteadyStateFactory(), SteadyStateFactory(probe=ProbeSpecFactory(selector={"app": "web"}))]
        decision = steady_states_sufficient(states, nginx_context, gateway, max_steady_states=2)
        assert decision.enough
        assert gateway.backend.calls == []

    def test_judge_decides(self, nginx_context, scripted_gateway):
        gateway = scripted_gateway({"enough": False, "reason": "latency is not covered"})
        decision = steady_states_sufficient([SteadyStateFactory()], nginx_context, gateway)
        assert not decision.enough
        assert decision.reason == "latency is not covered"

    def test_needs_a_state(self, nginx_context, scripted_gateway):
        with pytest.raises(InvariantViolation):
            steady_states_sufficient([], nginx_context, scripted_gateway())


def test_define_steady_state_from_transcript(nginx_set, nginx_context, replay_gateway, deployed_cluster):
    state = define_steady_state(nginx_context, nginx_set, [], deployed_cluster(nginx_set), replay_gateway("nginx"))
    assert state.name == "pod-availability"
    assert state.threshold.describe(state.probe.quantity) == "PodCount >= 1 (EverySample)"
    assert state.vac.probe == state.probe
    assert "label_selector='app=nginx'" in state.vac.script_text
    assert state.baseline.values == [1.0] * 10
