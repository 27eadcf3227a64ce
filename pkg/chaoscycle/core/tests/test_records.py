from decimal import Decimal

import pytest

from chaoscycle.core.enums import OutcomeKind
from chaoscycle.core.enums import Phase
from chaoscycle.core.enums import ReconfigOpKind
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import PathExists
from chaoscycle.core.exceptions import PathNotFound
from chaoscycle.core.records import AnalysisReport
from chaoscycle.core.records import ChangeSet
from chaoscycle.core.records import CostLedger
from chaoscycle.core.records import CycleOutcome
from chaoscycle.core.records import ExperimentResult
from chaoscycle.core.records import FileChange
from chaoscycle.core.records import HistoryEntry
from chaoscycle.core.records import ImprovementHistory
from chaoscycle.core.records import LedgerRow
from chaoscycle.core.records import ProcessedContext
from chaoscycle.core.records import ReconfigOp
from chaoscycle.core.records import Reconfiguration
from chaoscycle.core.records import ResourceSummary
from chaoscycle.core.records import Usage

DEPLOYMENT = "kind: Deployment\nmetadata:\n  name: web\n"


def reconfiguration(*ops: ReconfigOp) -> Reconfiguration:
    return Reconfiguration(ops=ops or (ReconfigOp(op=ReconfigOpKind.DELETE, path="Pod.yml"),))


def history_entry(reconf: Reconfiguration) -> HistoryEntry:
    report = AnalysisReport(failed_items=("post-vac-0",), causes=("pod gone",), countermeasures=("use a Deployment",))
    return HistoryEntry(result=ExperimentResult(outcomes=()), report=report, reconfiguration=reconf)


class TestCycleOutcome:
    @pytest.mark.parametrize(
        ("kind", "loops", "reason"),
        [
            (OutcomeKind.SATISFIED_NO_CHANGE, 1, ""),
            (OutcomeKind.SATISFIED_AFTER_IMPROVEMENT, 0, ""),
            (OutcomeKind.ABORTED, 0, ""),
        ],
    )
    def test_invalid(self, kind, loops, reason):
        with pytest.raises(InvariantViolation):
            CycleOutcome(kind=kind, loops=loops, reason=reason)

    def test_describe(self):
        assert CycleOutcome(kind=OutcomeKind.SATISFIED_NO_CHANGE).describe() == "SatisfiedNoChange"
        improved = CycleOutcome(kind=OutcomeKind.SATISFIED_AFTER_IMPROVEMENT, loops=2)
        assert improved.describe() == "SatisfiedAfterImprovement(2)"
        assert improved.satisfied
        aborted = CycleOutcome(kind=OutcomeKind.ABORTED, loops=3, reason="max loops")
        assert aborted.describe() == "Aborted(max loops)"
        assert not aborted.satisfied


class TestLedger:
    def test_usage_adds_up(self):
        total = Usage(input_tokens=10, output_tokens=2, cost_usd=Decimal("0.01")) + Usage(
            input_tokens=5,
            wall_time_s=1.5,
        )
        assert (total.input_tokens, total.output_tokens, total.wall_time_s) == (15, 2, 1.5)
        assert total.cost_usd == Decimal("0.01")

    def test_usage_is_non_negative(self):
        with pytest.raises(InvariantViolation):
            Usage(input_tokens=-1)

    def test_totals_must_match_rows(self):
        rows = {phase: LedgerRow() for phase in Phase}
        with pytest.raises(InvariantViolation, match="totals"):
            CostLedger(rows=rows, totals=LedgerRow(input_tokens=5))

    def test_one_row_per_phase(self):
        with pytest.raises(InvariantViolation):
            CostLedger(rows={Phase.PRE: LedgerRow()}, totals=LedgerRow())

    def test_json_round_trip_keeps_decimals(self):
        rows = {phase: LedgerRow() for phase in Phase}
        rows[Phase.HYP] = LedgerRow(input_tokens=100, output_tokens=20, api_cost_usd=Decimal("0.00045"))
        ledger = CostLedger(rows=rows, totals=rows[Phase.HYP])
        data = ledger.model_dump(mode="json")
        assert data["totals"]["api_cost_usd"] == "0.00045"
        assert CostLedger.model_validate(data) == ledger


class TestReconfiguration:
    def test_delete_carries_no_text(self):
        with pytest.raises(InvariantViolation):
            ReconfigOp(op=ReconfigOpKind.DELETE, path="Pod.yml", text=DEPLOYMENT)

    def test_replace_needs_text(self):
        with pytest.raises(InvariantViolation):
            ReconfigOp(op=ReconfigOpKind.REPLACE, path="Pod.yml", text="  ")

    def test_paths_are_unique(self):
        op = ReconfigOp(op=ReconfigOpKind.DELETE, path="Pod.yml")
        with pytest.raises(InvariantViolation):
            Reconfiguration(ops=(op, op))

    def test_check_against(self, nginx_set):
        with pytest.raises(PathExists):
            reconfiguration(ReconfigOp(op=ReconfigOpKind.CREATE, path="Pod.yml", text=DEPLOYMENT)).check_against(
                nginx_set,
            )
        with pytest.raises(PathNotFound):
            reconfiguration(ReconfigOp(op=ReconfigOpKind.DELETE, path="Deployment.yml")).check_against(nginx_set)
        reconfiguration().check_against(nginx_set)


class TestImprovementHistory:
    def test_no_repeats(self):
        entry = history_entry(reconfiguration())
        with pytest.raises(InvariantViolation, match="repeat"):
            ImprovementHistory(max_loops=3, entries=(entry, entry))

    def test_bounded(self):
        history = ImprovementHistory(max_loops=1).append(history_entry(reconfiguration()))
        assert history.exhausted
        assert history.has_tried(reconfiguration())
        with pytest.raises(InvariantViolation):
            history.append(history_entry(reconfiguration(ReconfigOp(op=ReconfigOpKind.DELETE, path="Service.yml"))))


class TestProcessedContext:
    def test_rejection_carries_nothing_else(self):
        assert ProcessedContext.rejected("unsafe").rejection == "unsafe"
        with pytest.raises(InvariantViolation):
            ProcessedContext(application_guess="web", rejection="unsafe")

    def test_check_covers(self, nginx_set):
        summaries = (ResourceSummary(resource_id="Pod/default/example-pod", summary="a pod"),)
        with pytest.raises(InvariantViolation, match="one summary per resource"):
            ProcessedContext(summaries=summaries).check_covers(nginx_set)


def test_change_set_groups_are_disjoint():
    with pytest.raises(InvariantViolation):
        ChangeSet(added=("a.yml",), modified=(FileChange(path="a.yml", differences=()),))
    assert ChangeSet().is_empty
