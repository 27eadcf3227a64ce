"""Pass/fail gate and failure analysis."""

from __future__ import annotations

import logging
from collections.abc import Sequence

from chaoscycle.agents.context import render_manifests
from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.enums import Phase
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.records import AnalysisReport
from chaoscycle.core.records import ExperimentResult
from chaoscycle.core.records import ItemOutcome
from chaoscycle.core.resources import ManifestSet

logger = logging.getLogger(__name__)


def check_results(result: ExperimentResult) -> bool:
    """True iff every VaC outcome passed; fault outcomes do not count."""
    return all(outcome.passed for outcome in result.outcomes if outcome.is_vac)


def render_failures(failed: Sequence[ItemOutcome]) -> str:
    return "\n\n".join(f"## {outcome.name} ({outcome.item.describe()})\n{outcome.log}" for outcome in failed)


def analyze_failures(
    manifest_set: ManifestSet,
    timeline_summary: str,
    failed: Sequence[ItemOutcome],
    gateway: AgentGateway,
) -> AnalysisReport:
    if not failed:
        msg = "failure analysis needs at least one failed VaC"
        raise InvariantViolation(msg)
    reply = gateway.complete_structured(
        AgentCall(
            role=AgentRole.FAILURE_ANALYST,
            prompt_context={
                "manifests": render_manifests(manifest_set),
                "timeline": timeline_summary,
                "failed_checks": render_failures(failed),
            },
        ),
        Phase.ANLYS,
    )
    report = AnalysisReport(
        failed_items=tuple(outcome.name for outcome in failed),
        causes=tuple(reply.parsed["causes"]),
        countermeasures=tuple(reply.parsed["countermeasures"]),
    )
    logger.info("Analysis of %s: %s", ", ".join(report.failed_items), "; ".join(report.causes))
    return report
