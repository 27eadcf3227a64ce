import json
import logging

import pytest

from chaoscycle.core.enums import Aggregation
from chaoscycle.core.exceptions import DeployFailed
from chaoscycle.core.loaders import build_manifest_set
from chaoscycle.core.tests.factories import FaultSpecFactory
from chaoscycle.core.tests.factories import ProbeSpecFactory
from chaoscycle.simulator.services import engine
from chaoscycle.simulator.services.cluster import SimulatedCluster
from chaoscycle.simulator.services.cluster import simulated_cluster_factory
from chaoscycle.simulator.services.probes import run_probe
from chaoscycle.simulator.state import EventKind

from .conftest import ORPHAN_SERVICE


@pytest.fixture
def cluster(resilient_set) -> SimulatedCluster:
    cluster = SimulatedCluster(seed=1)
    cluster.deploy(resilient_set)
    cluster.settle()
    return cluster


class TestDeploy:
    def test_settle_waits_for_every_pod(self, cluster):
        assert cluster.clock_s == cluster.timing.pod_startup_delay_s
        assert cluster.state.all_running

    def test_single_deployment_per_cluster(self, cluster, resilient_set):
        with pytest.raises(DeployFailed, match="fresh cluster"):
            cluster.deploy(resilient_set)

    def test_nothing_to_run(self):
        services_only = build_manifest_set([("orphan.yml", ORPHAN_SERVICE)], "")
        with pytest.raises(DeployFailed, match="no Pod or Deployment"):
            SimulatedCluster().deploy(services_only)

    def test_state_needs_a_deployment(self):
        with pytest.raises(DeployFailed):
            SimulatedCluster().clock_s  # noqa: B018


class TestMeasure:
    def test_measure_runs_for_the_probe_duration(self, cluster):
        start = cluster.clock_s
        measurement = cluster.measure(ProbeSpecFactory(duration_s=6, sample_interval_s=2))
        assert cluster.clock_s == start + 6
        assert [offset for offset, _ in measurement.samples] == [0, 2, 4]
        samples = [event for event in cluster.events if event.kind == EventKind.PROBE_SAMPLE]
        assert len(samples) == 3  # noqa: PLR2004
        assert samples[0].detail == {"target": "default/app=nginx", "quantity": "PodCount", "value": "2"}

    def test_kill_is_visible_to_probes(self, cluster):
        cluster.inject_fault(FaultSpecFactory(name="kill"), 20)
        measurement = cluster.measure(ProbeSpecFactory(duration_s=10))
        assert measurement.aggregate == 1.0
        assert measurement.samples[-1][1] == 2.0  # noqa: PLR2004

    def test_measure_is_run_probe_over_the_live_trajectory(self, resilient_set):
        twin = SimulatedCluster(seed=7)
        twin.deploy(resilient_set)
        twin.settle()
        twin.inject_fault(FaultSpecFactory(name="kill"), 20)
        state = twin.state
        trajectory = []
        for _ in range(9):
            trajectory.append(state)
            state, _ = engine.step(state)
        probe = ProbeSpecFactory(duration_s=9, sample_interval_s=3)

        measured = twin.measure(probe, Aggregation.EVERY_SAMPLE)

        assert measured == run_probe(trajectory, probe, Aggregation.EVERY_SAMPLE)
        assert twin.state == state


def test_fault_events_are_logged(cluster, caplog):
    with caplog.at_level(logging.INFO, logger="chaoscycle.simulator"):
        events = cluster.inject_fault(FaultSpecFactory(name="kill"), 5)
    assert [event.kind for event in events] == [EventKind.FAULT_STARTED, EventKind.POD_KILLED]
    assert "PodKilled" in caplog.text


def test_export_events(cluster, tmp_path):
    cluster.inject_fault(FaultSpecFactory(name="kill"), 5)
    cluster.export_events(tmp_path / "events.jsonl")
    lines = [json.loads(line) for line in (tmp_path / "events.jsonl").read_text().splitlines()]
    assert len(lines) == len(cluster.events)
    assert lines[-1]["kind"] == "PodKilled"
    assert set(lines[0]) == {"at_s", "kind", "detail"}


def test_same_seed_same_events(resilient_set, tmp_path):
    def run(name):
        cluster = SimulatedCluster(seed=4)
        cluster.deploy(resilient_set)
        cluster.settle()
        cluster.inject_fault(FaultSpecFactory(name="kill"), 5)
        cluster.advance(10)
        cluster.export_events(tmp_path / name)
        return (tmp_path / name).read_text()

    assert run("a.jsonl") == run("b.jsonl")


def test_factory_builds_independent_clusters(resilient_set):
    factory = simulated_cluster_factory(seed=2)
    first, second = factory(), factory()
    first.deploy(resilient_set)
    second.deploy(resilient_set)
    first.advance(5)
    assert (first.clock_s, second.clock_s) == (5, 0)
    assert first.seed == second.seed == 2  # noqa: PLR2004
