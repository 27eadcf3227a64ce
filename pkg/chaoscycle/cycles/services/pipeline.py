"""End-to-end chaos engineering cycle."""

from __future__ import annotations

import logging
from pathlib import Path

from chaoscycle.agents.ledger import LedgerRecorder
from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.agents.services.gateway import LLMBackend
from chaoscycle.agents.services.http_backend import HttpChatBackend
from chaoscycle.agents.services.replay_backend import RecordingBackend
from chaoscycle.agents.services.replay_backend import ReplayBackend
from chaoscycle.core.enums import OutcomeKind
from chaoscycle.core.exceptions import ChaosCycleError
from chaoscycle.core.exceptions import ConfigurationError
from chaoscycle.core.exceptions import PolicyRejected
from chaoscycle.core.loaders import validate_project_input
from chaoscycle.core.records import CycleOutcome
from chaoscycle.core.records import CycleRecord
from chaoscycle.core.records import LoopRecord
from chaoscycle.core.records import ProcessedContext
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.resources import ProjectInput
from chaoscycle.core.values import Hypothesis
from chaoscycle.cycles.config import CycleConfig
from chaoscycle.experiments.services.executor import execute_experiment
from chaoscycle.experiments.services.planner import plan_experiment
from chaoscycle.experiments.services.workflow import compile_workflow
from chaoscycle.hypothesis.services.phase import build_hypothesis
from chaoscycle.improvement.services.analysis import check_results
from chaoscycle.improvement.services.loop import ImprovementLoop
from chaoscycle.simulator.services.cluster import SimulatedCluster
from chaoscycle.simulator.services.cluster import simulated_cluster_factory

from .artifacts import ArtifactWriter
from .preprocess import parse_duration_constraint
from .preprocess import preprocess
from .summary import summarize_cycle

logger = logging.getLogger(__name__)


def build_backend(config: CycleConfig) -> LLMBackend:
    backend: LLMBackend
    if config.backend == "replay":
        if config.transcript is None:
            raise ConfigurationError("The replay backend needs a transcript.")
        backend = ReplayBackend.from_file(config.transcript)
    else:
        backend = HttpChatBackend(config.api_base, config.model, config.api_key_env)
    if config.record_transcript is not None:
        backend = RecordingBackend(backend, config.record_transcript)
    return backend


def aborted(reason: str, loops: int = 0) -> CycleOutcome:
    return CycleOutcome(kind=OutcomeKind.ABORTED, reason=reason, loops=loops)


class CyclePipeline:
    """Runs one cycle with its own gateway, ledger and clusters, writing artifacts as it goes."""

    def __init__(self, config: CycleConfig, out_dir: Path, backend: LLMBackend | None = None) -> None:
        self.config = config
        self.artifacts = ArtifactWriter(out_dir)
        self.recorder = LedgerRecorder()
        self.gateway = AgentGateway(
            backend or build_backend(config),
            recorder=self.recorder,
            pricing=config.pricing,
            max_attempts=config.max_attempts,
        )
        self.cluster_factory = simulated_cluster_factory(config.timing, config.seed)
        self.context: ProcessedContext | None = None
        self.hypothesis: Hypothesis | None = None
        self.loops: list[LoopRecord] = []
        self.final: ManifestSet | None = None
        self.diagnostics: dict[str, str] = {}

    def _on_loop(self, record: LoopRecord, cluster: SimulatedCluster | None = None) -> None:
        if record.index < len(self.loops):
            self.loops[record.index] = record
        else:
            self.loops.append(record)
        self.artifacts.write_loop(record)
        if cluster is not None:
            self.artifacts.write_events(f"loop-{record.index}/events.jsonl", cluster)

    def _record(self, project: ProjectInput, outcome: CycleOutcome, summary: str = "") -> CycleRecord:
        return CycleRecord(
            project_input=project,
            context=self.context,
            hypothesis=self.hypothesis,
            loops=tuple(self.loops),
            summary=summary,
            ledger=self.recorder.ledger,
            usages=self.recorder.usages,
            outcome=outcome,
            final_manifests=self.final,
            max_loops=self.config.max_loops,
            diagnostics=dict(self.diagnostics),
        )

    def _experiments(
        self,
        ctx: ProcessedContext,
        hypothesis: Hypothesis,
        manifest_set: ManifestSet,
        constraint: int | None,
    ) -> CycleOutcome:
        plan = plan_experiment(ctx, hypothesis, constraint, self.gateway)
        workflow = compile_workflow(plan)
        cluster = self.cluster_factory()
        result = execute_experiment(workflow, cluster, manifest_set)
        first = LoopRecord(index=0, plan=plan, workflow=workflow, result=result, manifests_after=manifest_set)
        self._on_loop(first, cluster)

        if check_results(result):
            logger.info("Hypothesis holds on the original manifests")
            self.final = manifest_set
            return CycleOutcome(kind=OutcomeKind.SATISFIED_NO_CHANGE)

        loop = ImprovementLoop(
            hypothesis,
            self.gateway,
            self.cluster_factory,
            max_loops=self.config.max_loops,
            on_loop=self._on_loop,
        )
        try:
            final, outcome = loop.run(first)
        finally:
            # reports attached after the last notification still belong in the record
            self.loops = list(loop.loops)
            if self.loops:
                self.artifacts.write_loop(self.loops[-1])
        self.final = final
        if outcome.kind == OutcomeKind.ABORTED:
            self.diagnostics["final_manifests"] = "unvalidated"
        return outcome

    def _execute(self, project: ProjectInput) -> CycleOutcome:
        manifest_set = validate_project_input(project)
        cluster = self.cluster_factory()
        try:
            self.context = ctx = preprocess(project, cluster, self.gateway)
            constraint = self.config.max_experiment_s or parse_duration_constraint(ctx.sanitized_instructions)
            self.hypothesis = hypothesis = build_hypothesis(
                ctx,
                manifest_set,
                cluster,
                self.gateway,
                max_steady_states=self.config.max_steady_states,
            )
        finally:
            self.artifacts.write_events("events.jsonl", cluster)
        logger.info("Hypothesis: %s", hypothesis.statement)
        return self._experiments(ctx, hypothesis, manifest_set, constraint)

    def _summarize(self, project: ProjectInput, outcome: CycleOutcome) -> tuple[CycleOutcome, str]:
        try:
            return outcome, summarize_cycle(self._record(project, outcome), self.gateway)
        except ChaosCycleError as exc:
            logger.error("Summary failed: %s", exc, exc_info=True)
            self.diagnostics["error"] = type(exc).__name__
            self.diagnostics["message"] = str(exc)
            return aborted(f"{type(exc).__name__}: {exc}", outcome.loops), ""

    def _write_output(self, final: ManifestSet, outcome: CycleOutcome) -> CycleOutcome:
        try:
            self.artifacts.write_output(final)
        except OSError as exc:
            logger.error("Output folder not written: %s", exc, exc_info=True)
            self.diagnostics["error"] = type(exc).__name__
            self.diagnostics["message"] = str(exc)
            self.diagnostics["output"] = "not written"
            return aborted(f"{type(exc).__name__}: {exc}", outcome.loops)
        return outcome

    def run(self, project: ProjectInput) -> CycleRecord:
        summarize = False
        try:
            outcome = self._execute(project)
            summarize = True
        except PolicyRejected as exc:
            logger.error("Cycle aborted before deployment: %s", exc)
            self.context = ProcessedContext.rejected(exc.reason)
            self.diagnostics["error"] = type(exc).__name__
            outcome = aborted(f"PolicyRejected: {exc.reason}")
        except (ChaosCycleError, OSError) as exc:
            logger.error("Cycle aborted: %s", exc, exc_info=True)
            self.diagnostics["error"] = type(exc).__name__
            self.diagnostics["message"] = str(exc)
            outcome = aborted(f"{type(exc).__name__}: {exc}", max(len(self.loops) - 1, 0))

        summary = ""
        if summarize:
            outcome, summary = self._summarize(project, outcome)
        if self.final is not None:
            outcome = self._write_output(self.final, outcome)
        record = self._record(project, outcome, summary)
        self.artifacts.write_record(record)
        logger.info("Cycle finished: %s", outcome.describe())
        return record


def run_cycle(
    project: ProjectInput,
    config: CycleConfig,
    out_dir: Path,
    backend: LLMBackend | None = None,
) -> tuple[CycleRecord, Path | None]:
    """Run a cycle; returns its record and the output folder, if one was written."""
    record = CyclePipeline(config, out_dir, backend).run(project)
    written = record.final_manifests is not None and "output" not in record.diagnostics
    output = Path(out_dir) / "output" if written else None
    return record, output
