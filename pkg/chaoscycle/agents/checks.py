from __future__ import annotations

from typing import Any
from typing import TypeVar

from pydantic import BaseModel
from pydantic import ValidationError

from chaoscycle.core.exceptions import AgentOutputExhausted
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import OutputViolation

M = TypeVar("M", bound=BaseModel)


def construct(model: type[M], data: dict[str, Any], exhausted: type[AgentOutputExhausted] | None = None) -> M:
    """Build a value from agent output; invalid values become a retryable violation."""
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(map(str, err['loc'])) or model.__name__}: {err['msg']}" for err in exc.errors()
        )
        raise OutputViolation(f"invalid {model.__name__}: {problems}", exhausted=exhausted) from exc
    except InvariantViolation as exc:
        raise OutputViolation(f"invalid {model.__name__}: {exc}", exhausted=exhausted) from exc
