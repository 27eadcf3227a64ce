"""Intermediate values of the hypothesis phase."""

from __future__ import annotations

from chaoscycle.core.enums import FaultKind
from chaoscycle.core.enums import FaultSubtype
from chaoscycle.core.values import ProbeSpec
from chaoscycle.core.values import ValueModel


class SteadyStateDraft(ValueModel):
    name: str
    description: str
    probe: ProbeSpec


class SufficiencyDecision(ValueModel):
    enough: bool
    reason: str = ""


class FaultDraft(ValueModel):
    name: str
    kind: FaultKind
    subtype: FaultSubtype


class ScenarioDraft(ValueModel):
    narrative: str
    faults: tuple[FaultDraft, ...]
