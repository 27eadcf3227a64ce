"""Output schemas for every agent role.

Each schema is a plain DRF serializer registered under a schema id; the
gateway validates an agent's parsed JSON against it before any mechanical
check runs.
"""

from __future__ import annotations

import json

from rest_framework import serializers

from chaoscycle.core.enums import Aggregation
from chaoscycle.core.enums import Comparator
from chaoscycle.core.enums import FaultKind
from chaoscycle.core.enums import FaultSubtype
from chaoscycle.core.enums import ProbeTool
from chaoscycle.core.enums import Quantity
from chaoscycle.core.enums import ReconfigOpKind
from chaoscycle.core.enums import SelectorMode
from chaoscycle.core.enums import Stage
from chaoscycle.core.enums import TaskType


def _choices(enum: type) -> list[str]:
    return [member.value for member in enum]


class LabelMapField(serializers.DictField):
    child = serializers.CharField(allow_blank=True)


class PolicyFilterSerializer(serializers.Serializer):
    allowed = serializers.BooleanField()
    reason = serializers.CharField(allow_blank=True, default="")
    sanitized_instructions = serializers.CharField(allow_blank=True, default="")


class ResourceSummarySerializer(serializers.Serializer):
    resource = serializers.CharField()
    summary = serializers.CharField()


class ContextSummarizerSerializer(serializers.Serializer):
    summaries = ResourceSummarySerializer(many=True)


class IssueSpotterSerializer(serializers.Serializer):
    issues = serializers.ListField(child=serializers.CharField(), allow_empty=True)


class AppGuesserSerializer(serializers.Serializer):
    application = serializers.CharField()


class StateDrafterSerializer(serializers.Serializer):
    name = serializers.RegexField(r"^[a-z0-9]([-a-z0-9]*[a-z0-9])?$", max_length=63)
    description = serializers.CharField()


class ProbeWriterSerializer(serializers.Serializer):
    tool = serializers.ChoiceField(choices=_choices(ProbeTool))
    quantity = serializers.ChoiceField(choices=_choices(Quantity))
    namespace = serializers.CharField(default="default")
    selector = LabelMapField(default=dict)
    url = serializers.CharField(allow_blank=True, default="")
    virtual_users = serializers.IntegerField(min_value=1, default=1)
    sample_interval_s = serializers.IntegerField(min_value=1, default=1)
    duration_s = serializers.IntegerField(min_value=1, default=10)


class ThresholdSetterSerializer(serializers.Serializer):
    comparator = serializers.ChoiceField(choices=_choices(Comparator))
    value = serializers.FloatField()
    aggregation = serializers.ChoiceField(choices=_choices(Aggregation))


class VaCBuilderSerializer(serializers.Serializer):
    script_text = serializers.CharField()


class SufficiencyJudgeSerializer(serializers.Serializer):
    enough = serializers.BooleanField()
    reason = serializers.CharField(allow_blank=True, default="")


class FaultDraftSerializer(serializers.Serializer):
    name = serializers.RegexField(r"^[a-z0-9]([-a-z0-9]*[a-z0-9])?$", max_length=63)
    kind = serializers.ChoiceField(choices=_choices(FaultKind))
    subtype = serializers.ChoiceField(choices=_choices(FaultSubtype))


class ScenarioDrafterSerializer(serializers.Serializer):
    narrative = serializers.CharField()
    faults = FaultDraftSerializer(many=True, allow_empty=False)


class FaultRefinerSerializer(serializers.Serializer):
    namespace = serializers.CharField(default="default")
    selector = LabelMapField()
    mode = serializers.ChoiceField(choices=_choices(SelectorMode))
    count = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    params = serializers.DictField(child=serializers.FloatField(), default=dict)


class StagePlannerSerializer(serializers.Serializer):
    pre_s = serializers.IntegerField()
    fault_s = serializers.IntegerField()
    post_s = serializers.IntegerField()


class ScheduledItemSerializer(serializers.Serializer):
    stage = serializers.ChoiceField(choices=_choices(Stage))
    task = serializers.ChoiceField(choices=_choices(TaskType))
    target = serializers.CharField()
    start_offset_s = serializers.IntegerField()
    duration_s = serializers.IntegerField()


class ItemSchedulerSerializer(serializers.Serializer):
    items = ScheduledItemSerializer(many=True, allow_empty=False)


class TimelineWriterSerializer(serializers.Serializer):
    summary = serializers.CharField()


class ReplannedProbeSerializer(serializers.Serializer):
    steady_state = serializers.CharField()
    namespace = serializers.CharField(default="default")
    selector = LabelMapField(default=dict)
    url = serializers.CharField(allow_blank=True, default="")


class ReplannedFaultSerializer(serializers.Serializer):
    name = serializers.CharField()
    kind = serializers.ChoiceField(choices=_choices(FaultKind))
    subtype = serializers.ChoiceField(choices=_choices(FaultSubtype))
    namespace = serializers.CharField(default="default")
    selector = LabelMapField()


class ReplannerSerializer(serializers.Serializer):
    probes = ReplannedProbeSerializer(many=True, allow_empty=True)
    faults = ReplannedFaultSerializer(many=True, allow_empty=True)


class FailureAnalystSerializer(serializers.Serializer):
    causes = serializers.ListField(child=serializers.CharField(), min_length=1)
    countermeasures = serializers.ListField(child=serializers.CharField(), min_length=1)


class ReconfigOpSerializer(serializers.Serializer):
    op = serializers.ChoiceField(choices=_choices(ReconfigOpKind))
    path = serializers.CharField()
    text = serializers.CharField(allow_blank=True, default="", trim_whitespace=False)


class ReconfigurerSerializer(serializers.Serializer):
    ops = ReconfigOpSerializer(many=True, allow_empty=False)
    rationale = serializers.CharField(allow_blank=True, default="")


class SummarizerSerializer(serializers.Serializer):
    summary = serializers.CharField()


SCHEMAS: dict[str, type[serializers.Serializer]] = {
    "policy_filter/v1": PolicyFilterSerializer,
    "context_summarizer/v1": ContextSummarizerSerializer,
    "issue_spotter/v1": IssueSpotterSerializer,
    "app_guesser/v1": AppGuesserSerializer,
    "state_drafter/v1": StateDrafterSerializer,
    "probe_writer/v1": ProbeWriterSerializer,
    "threshold_setter/v1": ThresholdSetterSerializer,
    "vac_builder/v1": VaCBuilderSerializer,
    "sufficiency_judge/v1": SufficiencyJudgeSerializer,
    "scenario_drafter/v1": ScenarioDrafterSerializer,
    "fault_refiner/v1": FaultRefinerSerializer,
    "stage_planner/v1": StagePlannerSerializer,
    "item_scheduler/v1": ItemSchedulerSerializer,
    "timeline_writer/v1": TimelineWriterSerializer,
    "replanner/v1": ReplannerSerializer,
    "failure_analyst/v1": FailureAnalystSerializer,
    "reconfigurer/v1": ReconfigurerSerializer,
    "summarizer/v1": SummarizerSerializer,
}


def validate_output(schema_id: str, data: object) -> tuple[dict | None, str]:
    """Validate ``data``; returns (validated, "") or (None, error text)."""
    serializer = SCHEMAS[schema_id](data=data)
    if serializer.is_valid():
        return serializer.validated_data, ""
    return None, json.dumps(serializer.errors, sort_keys=True)
