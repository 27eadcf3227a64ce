from __future__ import annotations

import logging

from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.core.records import ProcessedContext
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.values import FailureScenario
from chaoscycle.core.values import Hypothesis
from chaoscycle.core.values import SteadyState
from chaoscycle.simulator.services.cluster import ClusterBackend

from .faults import define_failure_scenario
from .faults import refine_faults
from .steady_states import DEFAULT_MAX_STEADY_STATES
from .steady_states import define_steady_state
from .steady_states import steady_states_sufficient

logger = logging.getLogger(__name__)


def hypothesis_statement(states: list[SteadyState], scenario: FailureScenario) -> str:
    names = ", ".join(state.name for state in states)
    return f"All VaC checks ({names}) pass even when the {scenario.narrative} faults are injected"


def build_hypothesis(
    ctx: ProcessedContext,
    manifest_set: ManifestSet,
    cluster: ClusterBackend,
    gateway: AgentGateway,
    max_steady_states: int = DEFAULT_MAX_STEADY_STATES,
) -> Hypothesis:
    """Define steady states until judged sufficient, then the failure scenario."""
    states: list[SteadyState] = []
    while True:
        states.append(define_steady_state(ctx, manifest_set, states, cluster, gateway))
        decision = steady_states_sufficient(states, ctx, gateway, max_steady_states)
        if decision.enough:
            logger.info("Steady states sufficient after %d: %s", len(states), decision.reason)
            break

    draft = define_failure_scenario(ctx, states, gateway)
    scenario = refine_faults(draft, manifest_set, gateway)
    return Hypothesis(
        steady_states=tuple(states),
        scenario=scenario,
        statement=hypothesis_statement(states, scenario),
    )
