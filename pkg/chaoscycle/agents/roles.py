"""Agent calls and replies.

Every agent invocation names one role from ``AgentRole``; the role decides
the output schema and the prompt template.
"""

from __future__ import annotations

from typing import Any
from typing import Self

from pydantic import Field
from pydantic import model_validator

from chaoscycle.core.enums import AgentRole
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.records import Usage
from chaoscycle.core.values import ValueModel

from .schemas import SCHEMAS

ROLE_SCHEMAS: dict[AgentRole, str] = {
    AgentRole.POLICY_FILTER: "policy_filter/v1",
    AgentRole.CONTEXT_SUMMARIZER: "context_summarizer/v1",
    AgentRole.ISSUE_SPOTTER: "issue_spotter/v1",
    AgentRole.APP_GUESSER: "app_guesser/v1",
    AgentRole.STATE_DRAFTER: "state_drafter/v1",
    AgentRole.PROBE_WRITER: "probe_writer/v1",
    AgentRole.THRESHOLD_SETTER: "threshold_setter/v1",
    AgentRole.VAC_BUILDER: "vac_builder/v1",
    AgentRole.SUFFICIENCY_JUDGE: "sufficiency_judge/v1",
    AgentRole.SCENARIO_DRAFTER: "scenario_drafter/v1",
    AgentRole.FAULT_REFINER: "fault_refiner/v1",
    AgentRole.STAGE_PLANNER: "stage_planner/v1",
    AgentRole.ITEM_SCHEDULER: "item_scheduler/v1",
    AgentRole.TIMELINE_WRITER: "timeline_writer/v1",
    AgentRole.REPLANNER: "replanner/v1",
    AgentRole.FAILURE_ANALYST: "failure_analyst/v1",
    AgentRole.RECONFIGURER: "reconfigurer/v1",
    AgentRole.SUMMARIZER: "summarizer/v1",
}


class AgentCall(ValueModel):
    role: AgentRole
    prompt_context: dict[str, str] = Field(default_factory=dict)
    output_schema: str = ""
    temperature: float = 0.0

    @model_validator(mode="before")
    @classmethod
    def _default_schema(cls, data: Any) -> Any:
        if isinstance(data, dict) and not data.get("output_schema") and data.get("role"):
            data = {**data, "output_schema": ROLE_SCHEMAS[AgentRole(data["role"])]}
        return data

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.output_schema not in SCHEMAS:
            raise InvariantViolation(f"output schema {self.output_schema!r} is not registered")
        if not 0 <= self.temperature <= 2:  # noqa: PLR2004
            raise InvariantViolation(f"temperature {self.temperature} outside [0, 2]")
        return self


class AgentReply(ValueModel):
    parsed: dict[str, Any]
    usage: Usage
    attempts: int

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.attempts < 1:
            raise InvariantViolation("a reply takes at least one attempt")
        return self


class BackendReply(ValueModel):
    """Raw text returned by a backend for one attempt."""

    text: str
    usage: Usage = Field(default_factory=Usage)
