"""Run a compiled workflow against a cluster backend, one simulated second at a time."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from dataclasses import field

from chaoscycle.core.enums import TemplateType
from chaoscycle.core.exceptions import SelectorMatchesNothing
from chaoscycle.core.exceptions import WorkflowUnsound
from chaoscycle.core.plans import ScheduledItem
from chaoscycle.core.plans import WorkflowManifest
from chaoscycle.core.plans import WorkflowNode
from chaoscycle.core.records import ExperimentResult
from chaoscycle.core.records import ItemOutcome
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.values import FaultSpec
from chaoscycle.core.values import Measurement
from chaoscycle.core.values import VaCSpec
from chaoscycle.simulator.services.cluster import ClusterBackend

logger = logging.getLogger(__name__)

CONTAINERS = (TemplateType.SERIAL, TemplateType.PARALLEL)


@dataclass(frozen=True)
class TimedNode:
    start_s: int
    node: WorkflowNode

    @property
    def duration_s(self) -> int:
        return self.node.deadline_s or 0

    @property
    def item(self) -> ScheduledItem:
        return ScheduledItem.model_validate(self.node.payload["item"])


@dataclass
class VaCRun:
    timed: TimedNode
    vac: VaCSpec
    samples: list[tuple[int, float]] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)


def schedule(workflow: WorkflowManifest) -> tuple[int, list[TimedNode]]:
    """Absolute start times of every task and fault node, plus the total span.

    Serial children run one after another, Parallel children start together,
    Suspend nodes only consume their deadline. A container with a deadline
    lasts exactly that long.
    """
    leaves: list[TimedNode] = []

    def walk(name: str, start: int, path: tuple[str, ...]) -> int:
        if name in path:
            raise WorkflowUnsound(f"workflow contains a cycle through {name}")
        node = workflow.node(name)
        if node.template_type == TemplateType.SERIAL:
            cursor = start
            for child in node.children:
                cursor += walk(child, cursor, (*path, name))
            span = cursor - start
        elif node.template_type == TemplateType.PARALLEL:
            span = max((walk(child, start, (*path, name)) for child in node.children), default=0)
        else:
            if node.deadline_s is None:
                raise WorkflowUnsound(f"{node.name} needs a deadline")
            span = node.deadline_s
            if node.template_type != TemplateType.SUSPEND:
                leaves.append(TimedNode(start, node))
        if node.template_type in CONTAINERS and node.deadline_s is not None:
            if span > node.deadline_s:
                raise WorkflowUnsound(f"children of {node.name} overrun its {node.deadline} deadline")
            span = node.deadline_s
        return span

    total = walk(workflow.entry, 0, ())
    return total, sorted(leaves, key=lambda timed: (timed.start_s, timed.node.name))


def _inject(cluster: ClusterBackend, timed: TimedNode, at_s: int) -> ItemOutcome:
    fault = FaultSpec.model_validate(timed.node.payload["fault"])
    try:
        events = cluster.inject_fault(fault, timed.duration_s)
    except SelectorMatchesNothing as exc:
        logger.warning("Fault %s not injected: %s", fault.name, exc)
        return ItemOutcome(name=timed.node.name, item=timed.item, passed=False, log=f"[{at_s}s] {exc}")
    pods = next((event.detail.get("pods", "") for event in events if "pods" in event.detail), "")
    log = f"[{at_s}s] injected {fault.subtype} ({fault.name}) into {pods or 'no pods'} for {timed.duration_s}s"
    return ItemOutcome(name=timed.node.name, item=timed.item, passed=True, log=log)


def _conclude(run: VaCRun) -> ItemOutcome:
    vac = run.vac
    quantity = vac.probe.quantity
    measurement = Measurement.from_samples(quantity, vac.threshold.aggregation, run.samples)
    passed = vac.evaluate(measurement)
    verdict = vac.threshold.describe(quantity)
    if passed:
        run.lines.append(f"PASSED: {verdict}")
    else:
        violation = vac.threshold.first_violation(measurement)
        detail = f"; first violation at {violation[0]}s: {violation[1]:g}" if violation else ""
        run.lines.append(f"FAILED: {verdict} (aggregate {measurement.aggregate:g}){detail}")
    return ItemOutcome(
        name=run.timed.node.name,
        item=run.timed.item,
        passed=passed,
        measurement=measurement,
        log="\n".join(run.lines),
    )


def execute_experiment(
    workflow: WorkflowManifest,
    cluster: ClusterBackend,
    manifests: ManifestSet | None = None,
) -> ExperimentResult:
    """Advance the cluster through every stage, injecting faults and sampling VaCs on schedule.

    When ``manifests`` is given the cluster is deployed and settled first.
    """
    if manifests is not None:
        cluster.deploy(manifests)
        cluster.settle()

    total, timed_nodes = schedule(workflow)
    started = cluster.clock_s
    outcomes: dict[str, ItemOutcome] = {}
    runs = [
        VaCRun(timed, VaCSpec.model_validate(timed.node.payload["vac"]))
        for timed in timed_nodes
        if "vac" in timed.node.payload
    ]
    faults = [timed for timed in timed_nodes if "fault" in timed.node.payload]

    for tick in range(total):
        for timed in faults:
            if timed.start_s == tick:
                outcomes[timed.node.name] = _inject(cluster, timed, tick)
        for run in runs:
            offset = tick - run.timed.start_s
            if 0 <= offset < run.timed.duration_s and offset % run.vac.probe.sample_interval_s == 0:
                value = cluster.sample(run.vac.probe)
                run.samples.append((offset, value))
                run.lines.append(f"[{offset}s] {run.vac.probe.quantity.label}: {value:g}")
        cluster.advance(1)

    for run in runs:
        outcome = _conclude(run)
        outcomes[outcome.name] = outcome
        logger.info("VaC %s %s", outcome.name, "passed" if outcome.passed else "failed")

    ordered = tuple(outcomes[timed.node.name] for timed in timed_nodes)
    return ExperimentResult(outcomes=ordered, started_s=started, finished_s=cluster.clock_s)
