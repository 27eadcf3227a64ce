from __future__ import annotations

import logging
from typing import Any

from chaoscycle.agents.checks import construct
from chaoscycle.agents.context import as_json
from chaoscycle.agents.context import render_manifests
from chaoscycle.agents.context import render_steady_states
from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.enums import Phase
from chaoscycle.core.enums import ResourceKind
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import ManifestError
from chaoscycle.core.exceptions import OutputViolation
from chaoscycle.core.exceptions import ReconfigInvalidExhausted
from chaoscycle.core.exceptions import RepeatedReconfiguration
from chaoscycle.core.plans import ExperimentPlan
from chaoscycle.core.records import AnalysisReport
from chaoscycle.core.records import ImprovementHistory
from chaoscycle.core.records import Reconfiguration
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.values import Hypothesis
from chaoscycle.manifests.services.apply import apply_reconfiguration

logger = logging.getLogger(__name__)


def render_history(history: ImprovementHistory) -> str:
    if not history.entries:
        return "(no earlier attempts)"
    blocks = []
    for number, entry in enumerate(history.entries, start=1):
        ops = ", ".join(f"{op.op} {op.path}" for op in entry.reconfiguration.ops)
        blocks.append(
            f"attempt {number}: failed {', '.join(entry.report.failed_items)}; "
            f"causes: {'; '.join(entry.report.causes)}; tried: {ops}",
        )
    return "\n".join(blocks)


def check_reconfiguration(
    manifest_set: ManifestSet,
    reconf: Reconfiguration,
    history: ImprovementHistory,
) -> ManifestSet:
    """Mechanical guards: applies cleanly, still deploys something, not tried before."""
    if not reconf.ops:
        raise OutputViolation("a reconfiguration needs at least one op")
    try:
        result = apply_reconfiguration(manifest_set, reconf)
    except (ManifestError, InvariantViolation) as exc:
        msg = f"reconfiguration does not apply: {exc}"
        raise OutputViolation(msg) from exc
    if not any(r.kind in (ResourceKind.POD, ResourceKind.DEPLOYMENT) for r in result.resources):
        raise OutputViolation("reconfigured manifests run no Pod or Deployment")
    if history.has_tried(reconf):
        msg = "this exact reconfiguration was already tried; propose a different one"
        raise OutputViolation(msg, exhausted=RepeatedReconfiguration)
    return result


def reconfigure(  # noqa: PLR0913
    manifest_set: ManifestSet,
    hypothesis: Hypothesis,
    plan: ExperimentPlan,
    history: ImprovementHistory,
    report: AnalysisReport,
    gateway: AgentGateway,
) -> Reconfiguration:
    if history.exhausted:
        msg = f"improvement history already holds {history.max_loops} attempts"
        raise InvariantViolation(msg)

    def build(parsed: dict[str, Any]) -> Reconfiguration:
        return construct(Reconfiguration, parsed)

    def check(parsed: dict[str, Any]) -> None:
        check_reconfiguration(manifest_set, build(parsed), history)

    reply = gateway.complete_structured(
        AgentCall(
            role=AgentRole.RECONFIGURER,
            prompt_context={
                "manifests": render_manifests(manifest_set),
                "steady_states": render_steady_states(hypothesis.steady_states),
                "scenario": hypothesis.scenario.narrative,
                "timeline": plan.timeline_summary,
                "report": as_json(report.model_dump(mode="json")),
                "history": render_history(history),
            },
        ),
        Phase.IMP,
        check=check,
        exhausted=ReconfigInvalidExhausted,
    )
    reconf = build(reply.parsed)
    logger.info("Reconfiguration: %s", ", ".join(f"{op.op} {op.path}" for op in reconf.ops))
    return reconf
