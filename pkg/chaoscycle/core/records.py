"""Results, reports, reconfigurations, ledgers and the cycle record."""

from __future__ import annotations

import math
from decimal import Decimal
from typing import Any
from typing import Self

from pydantic import Field
from pydantic import model_validator

from .enums import AgentRole
from .enums import OutcomeKind
from .enums import Phase
from .enums import ReconfigOpKind
from .enums import TaskType
from .exceptions import InvariantViolation
from .exceptions import PathExists
from .exceptions import PathNotFound
from .plans import ExperimentPlan
from .plans import ScheduledItem
from .plans import WorkflowManifest
from .resources import ManifestSet
from .resources import ProjectInput
from .values import Hypothesis
from .values import Measurement
from .values import ValueModel

SCHEMA_VERSION = 1


# Context
# ------------------------------------------------------------------------------


class ResourceSummary(ValueModel):
    resource_id: str
    summary: str


class ProcessedContext(ValueModel):
    summaries: tuple[ResourceSummary, ...] = ()
    potential_issues: tuple[str, ...] = ()
    application_guess: str = ""
    sanitized_instructions: str = ""
    rejection: str | None = None

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.rejection is not None and (
            self.summaries or self.potential_issues or self.application_guess or self.sanitized_instructions
        ):
            raise InvariantViolation("a rejected context carries nothing but the rejection")
        return self

    @classmethod
    def rejected(cls, reason: str) -> ProcessedContext:
        return cls(rejection=reason or "rejected")

    def check_covers(self, manifest_set: ManifestSet) -> None:
        ids = [summary.resource_id for summary in self.summaries]
        expected = [resource.id for resource in manifest_set.resources]
        if sorted(ids) != sorted(expected):
            msg = f"expected one summary per resource {expected}, got {ids}"
            raise InvariantViolation(msg)


# Experiment results
# ------------------------------------------------------------------------------


class ItemOutcome(ValueModel):
    name: str
    item: ScheduledItem
    passed: bool
    measurement: Measurement | None = None
    log: str = ""

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.item.task == TaskType.RUN_VAC and self.measurement is None:
            raise InvariantViolation(f"VaC outcome {self.name} needs a measurement")
        return self

    @property
    def is_vac(self) -> bool:
        return self.item.task == TaskType.RUN_VAC


class ExperimentResult(ValueModel):
    outcomes: tuple[ItemOutcome, ...]
    started_s: int = 0
    finished_s: int = 0

    @model_validator(mode="after")
    def _check(self) -> Self:
        names = [outcome.name for outcome in self.outcomes]
        if len(names) != len(set(names)):
            raise InvariantViolation("one outcome per scheduled item")
        if self.finished_s < self.started_s:
            raise InvariantViolation("experiment finished before it started")
        return self

    def check_covers(self, plan: ExperimentPlan) -> None:
        expected = sorted(name for name, _ in plan.named_items())
        if sorted(outcome.name for outcome in self.outcomes) != expected:
            raise InvariantViolation("experiment result does not cover exactly the planned items")

    @property
    def failed(self) -> tuple[ItemOutcome, ...]:
        return tuple(outcome for outcome in self.outcomes if outcome.is_vac and not outcome.passed)

    def outcome(self, name: str) -> ItemOutcome:
        for outcome in self.outcomes:
            if outcome.name == name:
                return outcome
        raise KeyError(name)


class AnalysisReport(ValueModel):
    failed_items: tuple[str, ...]
    causes: tuple[str, ...]
    countermeasures: tuple[str, ...]

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not self.failed_items or not self.causes or not self.countermeasures:
            raise InvariantViolation("a report names failed items, causes and countermeasures")
        return self


# Reconfiguration and diffs
# ------------------------------------------------------------------------------


class ReconfigOp(ValueModel):
    op: ReconfigOpKind
    path: str
    text: str = ""

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not self.path:
            raise InvariantViolation("reconfiguration ops need a path")
        if self.op == ReconfigOpKind.DELETE and self.text:
            raise InvariantViolation(f"Delete({self.path}) carries no text")
        if self.op != ReconfigOpKind.DELETE and not self.text.strip():
            raise InvariantViolation(f"{self.op}({self.path}) needs document text")
        return self


class Reconfiguration(ValueModel):
    ops: tuple[ReconfigOp, ...]
    rationale: str = ""

    @model_validator(mode="after")
    def _check(self) -> Self:
        paths = [op.path for op in self.ops]
        if len(paths) != len(set(paths)):
            raise InvariantViolation("a reconfiguration touches each path at most once")
        return self

    def check_against(self, manifest_set: ManifestSet) -> None:
        for op in self.ops:
            exists = manifest_set.has_path(op.path)
            if op.op == ReconfigOpKind.CREATE and exists:
                raise PathExists(op.path)
            if op.op != ReconfigOpKind.CREATE and not exists:
                raise PathNotFound(op.path)

    def signature(self) -> tuple[tuple[str, str, str], ...]:
        return tuple((op.op.value, op.path, op.text) for op in self.ops)


class FieldDifference(ValueModel):
    field: str
    old: Any = None
    new: Any = None


class FileChange(ValueModel):
    path: str
    differences: tuple[FieldDifference, ...]


class ChangeSet(ValueModel):
    added: tuple[str, ...] = ()
    removed: tuple[str, ...] = ()
    modified: tuple[FileChange, ...] = ()

    @model_validator(mode="after")
    def _check(self) -> Self:
        modified = {change.path for change in self.modified}
        added, removed = set(self.added), set(self.removed)
        if added & removed or added & modified or removed & modified:
            raise InvariantViolation("change set path groups must be disjoint")
        return self

    @property
    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.modified)


# Costs
# ------------------------------------------------------------------------------


class Usage(ValueModel):
    input_tokens: int = 0
    output_tokens: int = 0
    wall_time_s: float = 0.0
    cost_usd: Decimal = Decimal(0)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.input_tokens < 0 or self.output_tokens < 0 or self.wall_time_s < 0 or self.cost_usd < 0:
            raise InvariantViolation("usage figures are non-negative")
        return self

    def __add__(self, other: Usage) -> Usage:
        return Usage(
            input_tokens=self.input_tokens + other.input_tokens,
            output_tokens=self.output_tokens + other.output_tokens,
            wall_time_s=self.wall_time_s + other.wall_time_s,
            cost_usd=self.cost_usd + other.cost_usd,
        )


class LedgerRow(ValueModel):
    input_tokens: int = 0
    output_tokens: int = 0
    api_cost_usd: Decimal = Decimal(0)
    wall_time_s: float = 0.0

    def plus(self, usage: Usage) -> LedgerRow:
        return LedgerRow(
            input_tokens=self.input_tokens + usage.input_tokens,
            output_tokens=self.output_tokens + usage.output_tokens,
            api_cost_usd=self.api_cost_usd + usage.cost_usd,
            wall_time_s=self.wall_time_s + usage.wall_time_s,
        )


def sum_rows(rows: list[LedgerRow]) -> LedgerRow:
    return LedgerRow(
        input_tokens=sum(row.input_tokens for row in rows),
        output_tokens=sum(row.output_tokens for row in rows),
        api_cost_usd=sum((row.api_cost_usd for row in rows), Decimal(0)),
        wall_time_s=math.fsum(row.wall_time_s for row in rows),
    )


class CostLedger(ValueModel):
    rows: dict[Phase, LedgerRow] = Field(default_factory=lambda: {phase: LedgerRow() for phase in Phase})
    totals: LedgerRow = Field(default_factory=LedgerRow)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if set(self.rows) != set(Phase):
            raise InvariantViolation("the ledger carries exactly one row per phase")
        expected = sum_rows([self.rows[phase] for phase in Phase])
        if (
            expected.input_tokens != self.totals.input_tokens
            or expected.output_tokens != self.totals.output_tokens
            or expected.api_cost_usd != self.totals.api_cost_usd
            or not math.isclose(expected.wall_time_s, self.totals.wall_time_s, abs_tol=1e-6)
        ):
            raise InvariantViolation("ledger totals must equal the sum of the phase rows")
        return self

    def row(self, phase: Phase) -> LedgerRow:
        return self.rows[phase]


class AgentUsage(ValueModel):
    role: AgentRole
    phase: Phase
    attempts: int
    usage: Usage


# Cycle
# ------------------------------------------------------------------------------


class CycleOutcome(ValueModel):
    kind: OutcomeKind
    loops: int = 0
    reason: str = ""

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.kind == OutcomeKind.SATISFIED_NO_CHANGE and self.loops:
            raise InvariantViolation("SatisfiedNoChange runs no improvement loop")
        if self.kind == OutcomeKind.SATISFIED_AFTER_IMPROVEMENT and self.loops < 1:
            raise InvariantViolation("SatisfiedAfterImprovement needs at least one loop")
        if self.kind == OutcomeKind.ABORTED and not self.reason:
            raise InvariantViolation("aborted outcomes carry a reason")
        return self

    @property
    def satisfied(self) -> bool:
        return self.kind != OutcomeKind.ABORTED

    def describe(self) -> str:
        match self.kind:
            case OutcomeKind.SATISFIED_NO_CHANGE:
                return "SatisfiedNoChange"
            case OutcomeKind.SATISFIED_AFTER_IMPROVEMENT:
                return f"SatisfiedAfterImprovement({self.loops})"
            case _:
                return f"Aborted({self.reason})"


class HistoryEntry(ValueModel):
    result: ExperimentResult
    report: AnalysisReport
    reconfiguration: Reconfiguration


class ImprovementHistory(ValueModel):
    """Attempts so far. Shorter than ``max_loops`` whenever a reconfiguration is requested; the last loop fills it."""

    max_loops: int
    entries: tuple[HistoryEntry, ...] = ()

    @model_validator(mode="after")
    def _check(self) -> Self:
        if len(self.entries) > self.max_loops:
            raise InvariantViolation(f"history may hold at most {self.max_loops} entries")
        signatures = [entry.reconfiguration.signature() for entry in self.entries]
        if len(signatures) != len(set(signatures)):
            raise InvariantViolation("history entries must not repeat a reconfiguration")
        return self

    @property
    def exhausted(self) -> bool:
        return len(self.entries) >= self.max_loops

    def append(self, entry: HistoryEntry) -> ImprovementHistory:
        return ImprovementHistory(max_loops=self.max_loops, entries=(*self.entries, entry))

    def has_tried(self, reconfiguration: Reconfiguration) -> bool:
        signature = reconfiguration.signature()
        return any(entry.reconfiguration.signature() == signature for entry in self.entries)


class LoopRecord(ValueModel):
    """One experiment execution and whatever was done about its result."""

    index: int
    plan: ExperimentPlan
    workflow: WorkflowManifest
    result: ExperimentResult
    report: AnalysisReport | None = None
    reconfiguration: Reconfiguration | None = None
    manifests_after: ManifestSet


class CycleRecord(ValueModel):
    schema_version: int = SCHEMA_VERSION
    project_input: ProjectInput
    context: ProcessedContext | None = None
    hypothesis: Hypothesis | None = None
    loops: tuple[LoopRecord, ...] = ()
    summary: str = ""
    ledger: CostLedger = Field(default_factory=CostLedger)
    usages: tuple[AgentUsage, ...] = ()
    outcome: CycleOutcome
    final_manifests: ManifestSet | None = None
    max_loops: int = 3
    diagnostics: dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if len(self.loops) > 1 + self.max_loops:
            raise InvariantViolation(f"at most {1 + self.max_loops} experiments per cycle")
        if self.outcome.satisfied:
            if not self.loops or self.loops[-1].result.failed:
                raise InvariantViolation("a satisfied cycle ends with an all-passed experiment")
            if self.outcome.loops != len(self.loops) - 1:
                raise InvariantViolation("outcome loop count disagrees with the recorded loops")
        return self

    @property
    def improvement_loops(self) -> int:
        return max(len(self.loops) - 1, 0)
