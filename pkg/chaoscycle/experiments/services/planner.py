"""Experiment planning: stage durations, item schedule, timeline summary."""

from __future__ import annotations

import logging
from typing import Any

from chaoscycle.agents.checks import construct
from chaoscycle.agents.context import as_json
from chaoscycle.agents.context import render_context
from chaoscycle.agents.context import render_steady_states
from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.enums import Phase
from chaoscycle.core.exceptions import OutputViolation
from chaoscycle.core.exceptions import PlanInvalidExhausted
from chaoscycle.core.plans import ExperimentPlan
from chaoscycle.core.records import ProcessedContext
from chaoscycle.core.values import Hypothesis

logger = logging.getLogger(__name__)

PLACEHOLDER_SUMMARY = "pending"


def _faults_json(hypothesis: Hypothesis) -> str:
    return as_json([fault.model_dump(mode="json") for fault in hypothesis.scenario.faults])


def plan_experiment(
    ctx: ProcessedContext,
    hypothesis: Hypothesis,
    max_total_s: int | None,
    gateway: AgentGateway,
) -> ExperimentPlan:
    base_context = {
        "system": render_context(ctx),
        "hypothesis": hypothesis.statement,
        "steady_states": render_steady_states(hypothesis.steady_states),
        "faults": _faults_json(hypothesis),
        "constraint": f"at most {max_total_s} seconds in total" if max_total_s else "none",
    }

    def check_stages(parsed: dict[str, Any]) -> None:
        durations = (parsed["pre_s"], parsed["fault_s"], parsed["post_s"])
        if any(duration <= 0 for duration in durations):
            msg = f"every stage needs a positive duration, got {durations}"
            raise OutputViolation(msg)
        if max_total_s is not None and sum(durations) > max_total_s:
            msg = f"stages total {sum(durations)}s, more than the allowed {max_total_s}s"
            raise OutputViolation(msg)

    stages = gateway.complete_structured(
        AgentCall(role=AgentRole.STAGE_PLANNER, prompt_context=base_context),
        Phase.EXPT,
        check=check_stages,
        exhausted=PlanInvalidExhausted,
    ).parsed

    def build(parsed: dict[str, Any], summary: str) -> ExperimentPlan:
        return construct(
            ExperimentPlan,
            {
                **stages,
                "items": parsed["items"],
                "timeline_summary": summary,
                "vacs": hypothesis.vacs,
                "faults": hypothesis.scenario.faults,
            },
        )

    def check_items(parsed: dict[str, Any]) -> None:
        build(parsed, PLACEHOLDER_SUMMARY)

    schedule = gateway.complete_structured(
        AgentCall(role=AgentRole.ITEM_SCHEDULER, prompt_context={**base_context, "stages": as_json(stages)}),
        Phase.EXPT,
        check=check_items,
        exhausted=PlanInvalidExhausted,
    ).parsed

    draft = build(schedule, PLACEHOLDER_SUMMARY)
    timeline = gateway.complete_structured(
        AgentCall(
            role=AgentRole.TIMELINE_WRITER,
            prompt_context={
                "hypothesis": hypothesis.statement,
                "plan": as_json([item.model_dump(mode="json") for item in draft.items]),
                "stages": as_json(stages),
            },
        ),
        Phase.EXPT,
    ).parsed

    plan = build(schedule, timeline["summary"])
    logger.info(
        "Planned experiment: stages %s, %d items, %ds total",
        plan.stage_durations,
        len(plan.items),
        plan.total_s,
    )
    return plan
