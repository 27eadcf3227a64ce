"""Versioned prompt templates, one per agent role.

Bumping a template's version changes every context digest of that role, so
replay transcripts recorded against the old wording stop matching.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from chaoscycle.core.enums import AgentRole

from .roles import AgentCall


@dataclass(frozen=True)
class PromptTemplate:
    version: int
    task: str
    reply_shape: str


TEMPLATES: dict[AgentRole, PromptTemplate] = {
    AgentRole.POLICY_FILTER: PromptTemplate(
        1,
        "Decide whether the user's instructions for a chaos engineering cycle are safe to follow. "
        "Reject anything that asks to harm systems outside the given manifests or to exfiltrate data. "
        "Return the instructions with any unsafe part removed.",
        '{"allowed": bool, "reason": str, "sanitized_instructions": str}',
    ),
    AgentRole.CONTEXT_SUMMARIZER: PromptTemplate(
        1,
        "Summarize every Kubernetes resource in the manifests. Produce exactly one summary per resource id.",
        '{"summaries": [{"resource": "<Kind/namespace/name>", "summary": str}]}',
    ),
    AgentRole.ISSUE_SPOTTER: PromptTemplate(
        1,
        "List resiliency issues in the manifests, such as single replicas or restart policies that never restart.",
        '{"issues": [str]}',
    ),
    AgentRole.APP_GUESSER: PromptTemplate(
        1,
        "Guess what application the manifests deploy, in one sentence.",
        '{"application": str}',
    ),
    AgentRole.STATE_DRAFTER: PromptTemplate(
        1,
        "Propose one new steady state that matters for this system's resiliency. "
        "The name must be a DNS label and must differ from the existing steady states.",
        '{"name": str, "description": str}',
    ),
    AgentRole.PROBE_WRITER: PromptTemplate(
        1,
        "Write the probe measuring the steady state. Use ClusterApi with a label selector for pod or replica "
        "counts, HttpLoad with an in-cluster service URL for success rate or latency.",
        '{"tool": "ClusterApi|HttpLoad", "quantity": str, "namespace": str, "selector": {str: str}, '
        '"url": str, "virtual_users": int, "sample_interval_s": int, "duration_s": int}',
    ),
    AgentRole.THRESHOLD_SETTER: PromptTemplate(
        1,
        "Set a threshold for the steady state that the baseline measurement satisfies, "
        "with a reasonable tolerance.",
        '{"comparator": "EQ|GE|LE|LT|GT", "value": float, "aggregation": "EverySample|FinalSample|P95"}',
    ),
    AgentRole.VAC_BUILDER: PromptTemplate(
        1,
        "Write a validation script that runs the probe and asserts the threshold on its samples.",
        '{"script_text": str}',
    ),
    AgentRole.SUFFICIENCY_JUDGE: PromptTemplate(
        1,
        "Decide whether the steady states defined so far cover the system's resiliency concerns.",
        '{"enough": bool, "reason": str}',
    ),
    AgentRole.SCENARIO_DRAFTER: PromptTemplate(
        1,
        "Describe a realistic failure scenario for this system and the faults that emulate it.",
        '{"narrative": str, "faults": [{"name": str, "kind": str, "subtype": str}]}',
    ),
    AgentRole.FAULT_REFINER: PromptTemplate(
        1,
        "Choose the target pods and parameters of the fault. The selector must match pods in the manifests.",
        '{"namespace": str, "selector": {str: str}, "mode": "One|All|FixedCount", "count": int|null, '
        '"params": {str: float}}',
    ),
    AgentRole.STAGE_PLANNER: PromptTemplate(
        1,
        "Split the experiment into pre-validation, fault-injection and post-validation stages. "
        "The total must respect the duration constraint.",
        '{"pre_s": int, "fault_s": int, "post_s": int}',
    ),
    AgentRole.ITEM_SCHEDULER: PromptTemplate(
        1,
        "Schedule every VaC in the pre and post stages and inject every fault once in the fault stage. "
        "Offsets are seconds from the start of the stage.",
        '{"items": [{"stage": "Pre|Fault|Post", "task": "RunVaC|InjectFault", "target": str, '
        '"start_offset_s": int, "duration_s": int}]}',
    ),
    AgentRole.TIMELINE_WRITER: PromptTemplate(
        1,
        "Summarize the experiment timeline in a few sentences.",
        '{"summary": str}',
    ),
    AgentRole.REPLANNER: PromptTemplate(
        1,
        "The manifests changed. Update only the probe targets and fault selectors so they point at the "
        "reconfigured resources. Keep every name, kind and subtype.",
        '{"probes": [{"steady_state": str, "namespace": str, "selector": {str: str}, "url": str}], '
        '"faults": [{"name": str, "kind": str, "subtype": str, "namespace": str, "selector": {str: str}}]}',
    ),
    AgentRole.FAILURE_ANALYST: PromptTemplate(
        1,
        "Explain why the failed VaC checks failed and propose countermeasures in the manifests.",
        '{"causes": [str], "countermeasures": [str]}',
    ),
    AgentRole.RECONFIGURER: PromptTemplate(
        1,
        "Reconfigure the manifests so the failed checks pass. Keep the original intent of the system. "
        "Each op replaces, creates or deletes one manifest file; Replace and Create carry the full file text.",
        '{"ops": [{"op": "Replace|Create|Delete", "path": str, "text": str}], "rationale": str}',
    ),
    AgentRole.SUMMARIZER: PromptTemplate(
        1,
        "Summarize the whole cycle: the steady states, the failure scenario, the outcome "
        "and any reconfiguration.",
        '{"summary": str}',
    ),
}


def context_digest(call: AgentCall) -> str:
    """sha256 over the canonical JSON of role, template version and context."""
    payload = {
        "role": call.role.value,
        "template_version": TEMPLATES[call.role].version,
        "context": call.prompt_context,
    }
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def render_messages(call: AgentCall, violations: list[str] | None = None) -> list[dict[str, str]]:
    template = TEMPLATES[call.role]
    system = (
        f"You are the {call.role.value} agent of a chaos engineering cycle on Kubernetes. "
        f"{template.task} Reply with one JSON object and nothing else, shaped as {template.reply_shape}."
    )
    context = "\n\n".join(f"## {key}\n{value}" for key, value in sorted(call.prompt_context.items()))
    messages = [
        {"role": "system", "content": system},
        {"role": "user", "content": context or "(no context)"},
    ]
    if violations:
        previous = "\n".join(f"- {violation}" for violation in violations)
        messages.append(
            {"role": "user", "content": f"Your previous answers were rejected:\n{previous}\nTry again."},
        )
    return messages
