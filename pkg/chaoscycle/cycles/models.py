from __future__ import annotations

import uuid
from decimal import Decimal
from pathlib import Path

from django.db import models
from django.utils.translation import gettext_lazy as _

from chaoscycle.core.enums import OutcomeKind
from chaoscycle.core.records import CycleRecord


class CycleOutcomeChoice(models.TextChoices):
    SATISFIED_NO_CHANGE = OutcomeKind.SATISFIED_NO_CHANGE.value, _("Satisfied without change")
    SATISFIED_AFTER_IMPROVEMENT = OutcomeKind.SATISFIED_AFTER_IMPROVEMENT.value, _("Satisfied after improvement")
    ABORTED = OutcomeKind.ABORTED.value, _("Aborted")


class CycleRunQuerySet(models.QuerySet):
    def satisfied(self) -> CycleRunQuerySet:
        return self.exclude(outcome=CycleOutcomeChoice.ABORTED)

    def aborted(self) -> CycleRunQuerySet:
        return self.filter(outcome=CycleOutcomeChoice.ABORTED)


class CycleRun(models.Model):
    """A completed (or aborted) cycle and where its artifacts live."""

    public_id = models.UUIDField(default=uuid.uuid4, editable=False, unique=True)
    project = models.CharField(max_length=255, help_text=_("Input folder the cycle ran on."))
    instructions = models.TextField(blank=True)
    outcome = models.CharField(max_length=32, choices=CycleOutcomeChoice.choices)
    improvement_loops = models.PositiveIntegerField(default=0)
    reason = models.CharField(max_length=512, blank=True)
    summary = models.TextField(blank=True)
    artifact_dir = models.CharField(max_length=1024)
    input_tokens = models.PositiveIntegerField(default=0)
    output_tokens = models.PositiveIntegerField(default=0)
    api_cost_usd = models.DecimalField(max_digits=12, decimal_places=6, default=Decimal(0))
    record = models.JSONField(help_text=_("The full cycle record as written to record.json."))
    ledger = models.JSONField()
    created_at = models.DateTimeField(auto_now_add=True)

    objects = CycleRunQuerySet.as_manager()

    class Meta:
        ordering = ("-created_at", "-id")
        verbose_name = _("Cycle run")
        verbose_name_plural = _("Cycle runs")

    def __str__(self) -> str:  # pragma: no cover - human readable
        return f"{self.project}: {self.outcome}"

    @classmethod
    def from_record(cls, record: CycleRecord, project: str, artifact_dir: Path) -> CycleRun:
        totals = record.ledger.totals
        return cls.objects.create(
            project=project,
            instructions=record.project_input.instructions,
            outcome=record.outcome.kind.value,
            improvement_loops=record.improvement_loops,
            reason=record.outcome.reason[:512],
            summary=record.summary,
            artifact_dir=str(artifact_dir),
            input_tokens=totals.input_tokens,
            output_tokens=totals.output_tokens,
            api_cost_usd=totals.api_cost_usd.quantize(Decimal("0.000001")),
            record=record.model_dump(mode="json"),
            ledger=record.ledger.model_dump(mode="json"),
        )

    @property
    def cycle_record(self) -> CycleRecord:
        return CycleRecord.model_validate(self.record)
