"""Post-processing: the closing summary of a cycle."""

from __future__ import annotations

import logging
from typing import Any

from chaoscycle.agents.context import as_json
from chaoscycle.agents.context import render_steady_states
from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.enums import Phase
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import OutputViolation
from chaoscycle.core.exceptions import SummaryIncompleteExhausted
from chaoscycle.core.records import CycleRecord
from chaoscycle.core.records import LoopRecord

logger = logging.getLogger(__name__)


def required_mentions(record: CycleRecord) -> list[str]:
    """Phrases a summary has to contain, compared case-insensitively."""
    if record.hypothesis is None:
        msg = "only cycles with a hypothesis can be summarized"
        raise InvariantViolation(msg)
    mentions = [state.name for state in record.hypothesis.steady_states]
    mentions += [record.hypothesis.scenario.narrative, record.outcome.kind.value]
    loops = record.improvement_loops
    if loops == 0:
        mentions.append("no reconfiguration")
    else:
        mentions.append(f"{loops} improvement loop")
    return mentions


def _render_loop(loop: LoopRecord) -> dict[str, Any]:
    rendered: dict[str, Any] = {
        "experiment": loop.index,
        "failed_checks": [outcome.name for outcome in loop.result.failed],
    }
    if loop.report is not None:
        rendered["causes"] = list(loop.report.causes)
    if loop.reconfiguration is not None:
        rendered["reconfiguration"] = [f"{op.op} {op.path}" for op in loop.reconfiguration.ops]
    return rendered


def summarize_cycle(record: CycleRecord, gateway: AgentGateway) -> str:
    if record.context is not None and record.context.rejection is not None:
        msg = "policy-rejected cycles have nothing to summarize"
        raise InvariantViolation(msg)
    mentions = required_mentions(record)
    hypothesis = record.hypothesis
    if hypothesis is None:
        raise InvariantViolation("only cycles with a hypothesis can be summarized")

    def check(parsed: dict[str, Any]) -> None:
        text = parsed["summary"].lower()
        missing = [mention for mention in mentions if mention.lower() not in text]
        if missing:
            msg = f"the summary must mention {', '.join(repr(m) for m in missing)}"
            raise OutputViolation(msg)

    reply = gateway.complete_structured(
        AgentCall(
            role=AgentRole.SUMMARIZER,
            prompt_context={
                "instructions": record.project_input.instructions or "(none)",
                "hypothesis": hypothesis.statement,
                "steady_states": render_steady_states(hypothesis.steady_states),
                "scenario": hypothesis.scenario.narrative,
                "outcome": record.outcome.describe(),
                "loops": as_json([_render_loop(loop) for loop in record.loops]),
                "must_mention": as_json(mentions),
            },
        ),
        Phase.POST,
        check=check,
        exhausted=SummaryIncompleteExhausted,
    )
    logger.info("Cycle summarized (%d characters)", len(reply.parsed["summary"]))
    return reply.parsed["summary"]
