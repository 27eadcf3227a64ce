"""The bounded analyze, reconfigure, replan and re-run loop."""

from __future__ import annotations

import logging
from collections.abc import Callable

from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.core.enums import OutcomeKind
from chaoscycle.core.records import CycleOutcome
from chaoscycle.core.records import HistoryEntry
from chaoscycle.core.records import ImprovementHistory
from chaoscycle.core.records import LoopRecord
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.values import Hypothesis
from chaoscycle.experiments.services.executor import execute_experiment
from chaoscycle.experiments.services.replanner import replan_experiment
from chaoscycle.experiments.services.workflow import compile_workflow
from chaoscycle.manifests.services.apply import apply_reconfiguration
from chaoscycle.manifests.services.diff import diff_manifest_sets
from chaoscycle.simulator.services.cluster import SimulatedCluster

from .analysis import analyze_failures
from .analysis import check_results
from .reconfiguration import reconfigure

logger = logging.getLogger(__name__)

DEFAULT_MAX_LOOPS = 3

ClusterFactory = Callable[[], SimulatedCluster]
LoopCallback = Callable[[LoopRecord, SimulatedCluster | None], None]


class ImprovementLoop:
    """Runs improvement iterations after a failed first experiment.

    ``loops`` always holds every experiment run so far, so a caller catching
    an abort still sees the partial history.
    """

    def __init__(  # noqa: PLR0913
        self,
        hypothesis: Hypothesis,
        gateway: AgentGateway,
        cluster_factory: ClusterFactory,
        max_loops: int = DEFAULT_MAX_LOOPS,
        on_loop: LoopCallback | None = None,
    ) -> None:
        self.hypothesis = hypothesis
        self.gateway = gateway
        self.cluster_factory = cluster_factory
        self.max_loops = max_loops
        self.on_loop = on_loop
        self.loops: list[LoopRecord] = []
        self.history = ImprovementHistory(max_loops=max_loops)

    def _notify(self, record: LoopRecord, cluster: SimulatedCluster | None = None) -> None:
        if self.on_loop is not None:
            self.on_loop(record, cluster)

    def run(self, first: LoopRecord) -> tuple[ManifestSet, CycleOutcome]:
        self.loops = [first]
        current = first.manifests_after
        plan = first.plan

        for index in range(1, self.max_loops + 1):
            last = self.loops[-1]
            report = analyze_failures(current, plan.timeline_summary, last.result.failed, self.gateway)
            self.loops[-1] = last = last.model_copy(update={"report": report})

            reconf = reconfigure(current, self.hypothesis, plan, self.history, report, self.gateway)
            reconfigured = apply_reconfiguration(current, reconf)
            self.loops[-1] = last = last.model_copy(update={"reconfiguration": reconf, "manifests_after": reconfigured})
            self.history = self.history.append(HistoryEntry(result=last.result, report=report, reconfiguration=reconf))
            self._notify(last)

            if not diff_manifest_sets(current, reconfigured).is_empty:
                plan = replan_experiment(plan, current, reconfigured, self.gateway)
            current = reconfigured

            workflow = compile_workflow(plan)
            cluster = self.cluster_factory()
            result = execute_experiment(workflow, cluster, current)
            record = LoopRecord(index=index, plan=plan, workflow=workflow, result=result, manifests_after=current)
            self.loops.append(record)
            self._notify(record, cluster)

            if check_results(result):
                logger.info("Hypothesis satisfied after %d improvement loop(s)", index)
                return current, CycleOutcome(kind=OutcomeKind.SATISFIED_AFTER_IMPROVEMENT, loops=index)
            logger.info("Improvement loop %d still fails %s", index, [o.name for o in result.failed])

        logger.warning("Giving up after %d improvement loops; final manifests are unvalidated", self.max_loops)
        return current, CycleOutcome(kind=OutcomeKind.ABORTED, loops=self.max_loops, reason="max loops")
