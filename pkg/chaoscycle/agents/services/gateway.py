"""Structured-output agent invocation with retries and cost accounting."""

from __future__ import annotations

import json
import logging
from collections.abc import Callable
from typing import Any
from typing import Protocol

from chaoscycle.agents.ledger import LedgerRecorder
from chaoscycle.agents.ledger import Pricing
from chaoscycle.agents.prompts import render_messages
from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.roles import AgentReply
from chaoscycle.agents.roles import BackendReply
from chaoscycle.agents.schemas import validate_output
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.enums import Phase
from chaoscycle.core.exceptions import AgentOutputExhausted
from chaoscycle.core.exceptions import OutputViolation
from chaoscycle.core.exceptions import PolicyRejected
from chaoscycle.core.exceptions import SchemaViolationExhausted
from chaoscycle.core.records import Usage

logger = logging.getLogger(__name__)

DEFAULT_MAX_ATTEMPTS = 3

Check = Callable[[dict[str, Any]], None]


class LLMBackend(Protocol):
    def complete(self, call: AgentCall, attempt: int, messages: list[dict[str, str]]) -> BackendReply: ...


class AgentGateway:
    """Runs agent calls against one backend and books their usage on one ledger."""

    def __init__(
        self,
        backend: LLMBackend,
        recorder: LedgerRecorder | None = None,
        pricing: Pricing | None = None,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    ) -> None:
        self.backend = backend
        self.recorder = recorder or LedgerRecorder()
        self.pricing = pricing or Pricing()
        self.max_attempts = max_attempts

    def _priced(self, usage: Usage) -> Usage:
        cost = self.pricing.cost(usage.input_tokens, usage.output_tokens)
        return usage.model_copy(update={"cost_usd": cost})

    def complete_structured(  # noqa: C901, PLR0913
        self,
        call: AgentCall,
        phase: Phase,
        check: Check | None = None,
        exhausted: type[AgentOutputExhausted] = SchemaViolationExhausted,
        max_attempts: int | None = None,
        max_rejections: int | None = None,
    ) -> AgentReply:
        """Ask the agent until its reply validates against the schema and passes ``check``.

        Every failed attempt appends its violation to the next prompt. Usage of
        all attempts is recorded once under ``phase``, also when the call fails.
        ``max_rejections`` caps how many replies ``check`` may turn down; schema
        failures still get the full ``max_attempts``.
        """
        limit = max_attempts or self.max_attempts
        violations: list[str] = []
        total = Usage()
        attempts = 0
        last_output: Any = None
        schema_failed = False
        last_violation: OutputViolation | None = None
        rejections = 0

        try:
            for attempt in range(1, limit + 1):
                attempts = attempt
                reply = self.backend.complete(call, attempt, render_messages(call, violations))
                usage = self._priced(reply.usage)
                total += usage
                last_output = reply.text
                logger.info(
                    "Agent %s attempt %d: %d input / %d output tokens",
                    call.role,
                    attempt,
                    usage.input_tokens,
                    usage.output_tokens,
                )

                try:
                    data = json.loads(reply.text)
                except json.JSONDecodeError as exc:
                    schema_failed = True
                    violations.append(f"reply is not valid JSON: {exc}")
                    logger.warning("Agent %s returned invalid JSON: %s", call.role, exc)
                    continue

                validated, errors = validate_output(call.output_schema, data)
                if validated is None:
                    schema_failed = True
                    last_output = data
                    violations.append(f"reply does not match {call.output_schema}: {errors}")
                    logger.warning("Agent %s violated %s: %s", call.role, call.output_schema, errors)
                    continue

                parsed = json.loads(json.dumps(validated))
                last_output = parsed
                if call.role == AgentRole.POLICY_FILTER and not parsed["allowed"]:
                    raise PolicyRejected(parsed["reason"] or "instructions are unsafe")

                if check is not None:
                    try:
                        check(parsed)
                    except OutputViolation as violation:
                        schema_failed = False
                        last_violation = violation
                        violations.append(str(violation))
                        logger.warning("Agent %s output rejected: %s", call.role, violation)
                        rejections += 1
                        if max_rejections is not None and rejections >= max_rejections:
                            break
                        continue

                return AgentReply(parsed=parsed, usage=total, attempts=attempt)
        finally:
            if attempts:
                self.recorder.record(call.role, phase, attempts, total)

        if schema_failed or last_violation is None:
            error_class: type[AgentOutputExhausted] = SchemaViolationExhausted
        else:
            error_class = last_violation.exhausted or exhausted
        msg = f"{call.role} gave no usable output after {attempts} attempts: {violations[-1]}"
        raise error_class(msg, last_output=last_output)
