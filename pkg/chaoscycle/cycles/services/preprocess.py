"""Phase 0: screen the instructions, deploy the system and fill in its context."""

from __future__ import annotations

import logging
import re
from typing import Any

from chaoscycle.agents.checks import construct
from chaoscycle.agents.context import as_json
from chaoscycle.agents.context import render_manifests
from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.enums import Phase
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import OutputViolation
from chaoscycle.core.exceptions import PolicyRejected
from chaoscycle.core.loaders import validate_project_input
from chaoscycle.core.records import ProcessedContext
from chaoscycle.core.records import ResourceSummary
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.resources import ProjectInput
from chaoscycle.simulator.services.cluster import ClusterBackend

logger = logging.getLogger(__name__)

# Checked before any agent sees the instructions.
DENYLIST = (
    re.compile(r"\bcredentials?\b", re.IGNORECASE),
    re.compile(r"\bsecrets?\b", re.IGNORECASE),
    re.compile(r"\bexfiltrat", re.IGNORECASE),
    re.compile(r"\brm\s+-rf\b", re.IGNORECASE),
    re.compile(r"\bkube-system\b", re.IGNORECASE),
    re.compile(r"\bdelete\s+(all|every)\b", re.IGNORECASE),
)

NUMBER_WORDS = {"one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "ten": 10}
DURATION_CONSTRAINT = re.compile(
    r"within\s+(?:(\d+|one|two|three|four|five|ten)\s*|an?\s+)(seconds?|secs?|s|minutes?|mins?)\b",
    re.IGNORECASE,
)


def denylist_match(instructions: str) -> str | None:
    for pattern in DENYLIST:
        if match := pattern.search(instructions):
            return match.group(0)
    return None


def parse_duration_constraint(instructions: str) -> int | None:
    """Seconds allowed for one experiment, from phrases like "within 1 minute"."""
    match = DURATION_CONSTRAINT.search(instructions)
    if match is None:
        return None
    amount, unit = match.groups()
    if amount is None:
        count = 1
    elif amount.isdigit():
        count = int(amount)
    else:
        count = NUMBER_WORDS[amount.lower()]
    return count * 60 if unit.lower().startswith("m") else count


def filter_instructions(instructions: str, gateway: AgentGateway) -> str:
    """Sanitized instructions, or PolicyRejected."""
    if not instructions.strip():
        return ""
    if hit := denylist_match(instructions):
        logger.error("Instructions rejected by denylist (%r)", hit)
        msg = f"instructions mention {hit!r}"
        raise PolicyRejected(msg)
    reply = gateway.complete_structured(
        AgentCall(role=AgentRole.POLICY_FILTER, prompt_context={"instructions": instructions}),
        Phase.PRE,
    )
    return reply.parsed["sanitized_instructions"].strip() or instructions.strip()


def summarize_resources(manifest_set: ManifestSet, gateway: AgentGateway) -> tuple[ResourceSummary, ...]:
    def build(parsed: dict[str, Any]) -> ProcessedContext:
        summaries = [{"resource_id": item["resource"], "summary": item["summary"]} for item in parsed["summaries"]]
        return construct(ProcessedContext, {"summaries": summaries})

    def check(parsed: dict[str, Any]) -> None:
        try:
            build(parsed).check_covers(manifest_set)
        except InvariantViolation as exc:
            raise OutputViolation(str(exc)) from exc

    reply = gateway.complete_structured(
        AgentCall(
            role=AgentRole.CONTEXT_SUMMARIZER,
            prompt_context={
                "manifests": render_manifests(manifest_set),
                "resource_ids": as_json([resource.id for resource in manifest_set.resources]),
            },
        ),
        Phase.PRE,
        check=check,
    )
    return build(reply.parsed).summaries


def preprocess(project: ProjectInput, cluster: ClusterBackend, gateway: AgentGateway) -> ProcessedContext:
    manifest_set = validate_project_input(project)
    instructions = filter_instructions(project.instructions, gateway)

    cluster.deploy(manifest_set)
    cluster.settle()

    summaries = summarize_resources(manifest_set, gateway)
    rendered = "\n".join(f"{summary.resource_id}: {summary.summary}" for summary in summaries)
    issues = gateway.complete_structured(
        AgentCall(
            role=AgentRole.ISSUE_SPOTTER,
            prompt_context={"manifests": render_manifests(manifest_set), "summaries": rendered},
        ),
        Phase.PRE,
    ).parsed["issues"]
    application = gateway.complete_structured(
        AgentCall(
            role=AgentRole.APP_GUESSER,
            prompt_context={"manifests": render_manifests(manifest_set), "summaries": rendered},
        ),
        Phase.PRE,
    ).parsed["application"]

    logger.info("Context filled: %d summaries, %d potential issues", len(summaries), len(issues))
    return ProcessedContext(
        summaries=summaries,
        potential_issues=tuple(issues),
        application_guess=application,
        sanitized_instructions=instructions,
    )
