"""Deterministic text renderings of domain values for prompt contexts.

Replay digests are computed over these strings, so every rendering must be
stable: sorted keys, no clocks, no object ids.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from typing import Any

from chaoscycle.core.records import ProcessedContext
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.values import SteadyState


def as_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, ensure_ascii=False)


def render_manifests(manifest_set: ManifestSet) -> str:
    return "\n".join(f"--- {path}\n{text.rstrip()}" for path, text in manifest_set.texts.items())


def render_context(ctx: ProcessedContext) -> str:
    lines = [f"application: {ctx.application_guess or 'unknown'}"]
    lines += [f"resource {summary.resource_id}: {summary.summary}" for summary in ctx.summaries]
    lines += [f"issue: {issue}" for issue in ctx.potential_issues]
    if ctx.sanitized_instructions:
        lines.append(f"instructions: {ctx.sanitized_instructions}")
    return "\n".join(lines)


def render_steady_states(states: Iterable[SteadyState]) -> str:
    rendered = [
        f"{state.name}: {state.description} "
        f"[{state.probe.tool} {state.probe.quantity} on {state.probe.describe_target()}; "
        f"{state.threshold.describe(state.probe.quantity)}]"
        for state in states
    ]
    return "\n".join(rendered) or "(none)"
