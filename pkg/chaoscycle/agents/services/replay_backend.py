"""Deterministic replay of recorded agent replies.

A transcript is a JSON-lines file; every line is one entry::

    {"role": "StateDrafter", "attempt": 1, "context_digest": "<sha256>|*",
     "output": {...} | "<raw text>", "usage": {"input_tokens": 0, ...}}

Entries with an exact digest answer only that context. Wildcard entries
(``"*"``) of a (role, attempt) are handed out in file order to successive
new contexts; a context served once always gets the same entry again.
"""

from __future__ import annotations

import json
import logging
import threading
from collections import deque
from pathlib import Path
from typing import Any
from typing import Self

from pydantic import Field
from pydantic import ValidationError
from pydantic import model_validator

from chaoscycle.agents.prompts import context_digest
from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.roles import BackendReply
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.exceptions import ConfigurationError
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.exceptions import ReplayEntryMissing
from chaoscycle.core.records import Usage
from chaoscycle.core.values import ValueModel

from .gateway import LLMBackend

logger = logging.getLogger(__name__)

WILDCARD = "*"

Key = tuple[AgentRole, int, str]


class TranscriptEntry(ValueModel):
    role: AgentRole
    attempt: int
    context_digest: str
    output: dict[str, Any] | str
    usage: Usage = Field(default_factory=Usage)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.attempt < 1:
            raise InvariantViolation("transcript attempts start at 1")
        if not self.context_digest:
            raise InvariantViolation("transcript entries need a context digest or '*'")
        return self

    @property
    def text(self) -> str:
        if isinstance(self.output, str):
            return self.output
        return json.dumps(self.output, sort_keys=True)


def read_transcript(path: Path) -> list[TranscriptEntry]:
    entries = []
    with Path(path).open(encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                entries.append(TranscriptEntry.model_validate(json.loads(line)))
            except (json.JSONDecodeError, ValidationError, InvariantViolation) as exc:
                msg = f"{path}:{number}: unreadable transcript entry: {exc}"
                raise ConfigurationError(msg) from exc
    return entries


class ReplayBackend:
    def __init__(self, entries: list[TranscriptEntry]) -> None:
        self._lock = threading.Lock()
        self._exact: dict[Key, TranscriptEntry] = {}
        self._wildcards: dict[tuple[AgentRole, int], deque[TranscriptEntry]] = {}
        self._served: dict[Key, TranscriptEntry] = {}
        for entry in entries:
            if entry.context_digest == WILDCARD:
                self._wildcards.setdefault((entry.role, entry.attempt), deque()).append(entry)
            else:
                self._exact.setdefault((entry.role, entry.attempt, entry.context_digest), entry)

    @classmethod
    def from_file(cls, path: Path) -> ReplayBackend:
        entries = read_transcript(path)
        logger.info("Loaded %d transcript entries from %s", len(entries), path)
        return cls(entries)

    def complete(self, call: AgentCall, attempt: int, messages: list[dict[str, str]]) -> BackendReply:
        digest = context_digest(call)
        key = (call.role, attempt, digest)
        with self._lock:
            entry = self._exact.get(key) or self._served.get(key)
            if entry is None:
                queue = self._wildcards.get((call.role, attempt))
                if not queue:
                    msg = f"No transcript entry for {call.role} attempt {attempt} (context {digest[:12]})"
                    raise ReplayEntryMissing(msg)
                entry = queue.popleft()
                self._served[key] = entry
        return BackendReply(text=entry.text, usage=entry.usage)


class RecordingBackend:
    """Wraps a live backend and appends an exact-digest entry per reply."""

    def __init__(self, inner: LLMBackend, path: Path) -> None:
        self._inner = inner
        self._path = Path(path)
        self._lock = threading.Lock()

    def complete(self, call: AgentCall, attempt: int, messages: list[dict[str, str]]) -> BackendReply:
        reply = self._inner.complete(call, attempt, messages)
        try:
            output: dict[str, Any] | str = json.loads(reply.text)
        except json.JSONDecodeError:
            output = reply.text
        if not isinstance(output, dict):
            output = reply.text
        entry = {
            "role": call.role.value,
            "attempt": attempt,
            "context_digest": context_digest(call),
            "output": output,
            "usage": reply.usage.model_dump(mode="json", exclude={"cost_usd"}),
        }
        with self._lock, self._path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(entry, sort_keys=True) + "\n")
        return reply
