"""Client for chat-completions style LLM endpoints."""

from __future__ import annotations

import logging
import time
from typing import Any

import environ
import requests

from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.roles import BackendReply
from chaoscycle.core.exceptions import BackendUnavailable
from chaoscycle.core.exceptions import ConfigurationError
from chaoscycle.core.records import Usage

logger = logging.getLogger(__name__)

env = environ.Env()


class HttpChatBackend:
    """POSTs to ``{api_base}/chat/completions`` asking for a JSON object reply."""

    def __init__(self, api_base: str, model: str, api_key_env: str = "OPENAI_API_KEY", timeout: int = 120) -> None:
        if not api_base or not model:
            raise ConfigurationError("HTTP backend needs an API base URL and a model name.")
        self._api_key = env.str(api_key_env, default="")
        if not self._api_key:
            raise ConfigurationError(f"{api_key_env} is not set.")
        self._url = f"{api_base.rstrip('/')}/chat/completions"
        self._model = model
        self._timeout = timeout

    def _post(self, body: dict[str, Any]) -> dict[str, Any]:
        try:
            response = requests.post(
                self._url,
                json=body,
                headers={"Authorization": f"Bearer {self._api_key}"},
                timeout=self._timeout,
            )
            response.raise_for_status()
            return response.json()
        except requests.exceptions.RequestException as exc:
            logger.error("LLM request to %s failed: %s", self._url, exc)
            msg = f"Request failed: {exc}"
            raise BackendUnavailable(msg) from exc

    def complete(self, call: AgentCall, attempt: int, messages: list[dict[str, str]]) -> BackendReply:
        started = time.monotonic()
        payload = self._post(
            {
                "model": self._model,
                "messages": messages,
                "temperature": call.temperature,
                "response_format": {"type": "json_object"},
            },
        )
        elapsed = time.monotonic() - started

        try:
            text = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            msg = f"Unexpected chat-completions response: {payload}"
            raise BackendUnavailable(msg) from exc
        usage = payload.get("usage") or {}
        return BackendReply(
            text=text or "",
            usage=Usage(
                input_tokens=int(usage.get("prompt_tokens", 0)),
                output_tokens=int(usage.get("completion_tokens", 0)),
                wall_time_s=elapsed,
            ),
        )
