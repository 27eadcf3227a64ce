"""Replanning after randomized label and namespace renames only moves targets."""

import random
import re

import pytest

from chaoscycle.core.enums import ProbeTool
from chaoscycle.core.enums import Quantity
from chaoscycle.core.enums import ResourceKind
from chaoscycle.core.enums import Unit
from chaoscycle.core.plans import ExperimentPlan
from chaoscycle.core.tests.factories import ExperimentPlanFactory
from chaoscycle.core.tests.factories import ProbeSpecFactory
from chaoscycle.core.tests.factories import ThresholdFactory
from chaoscycle.core.tests.factories import VaCSpecFactory
from chaoscycle.core.tests.factories import manifest_set_from
from chaoscycle.core.tests.factories import random_fault_spec
from chaoscycle.core.tests.factories import random_workloads
from chaoscycle.core.values import VaCSpec
from chaoscycle.experiments.services.replanner import replan_experiment

CASES = 50
TARGET_FIELDS = re.compile(
    r"^(vacs\.\d+\.probe\.(namespace|selector\..+|url)|faults\.\d+\.selector\.(namespace|labels\..+))$",
)


def service_url(service: str, namespace: str) -> str:
    return f"http://{service}.{namespace}.svc.cluster.local:80"


def flatten(value, prefix=""):
    if isinstance(value, dict):
        for key, item in value.items():
            yield from flatten(item, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(value, list | tuple):
        for index, item in enumerate(value):
            yield from flatten(item, f"{prefix}.{index}")
    else:
        yield prefix, value


def changed_fields(before: ExperimentPlan, after: ExperimentPlan) -> set[str]:
    old, new = dict(flatten(before.model_dump(mode="json"))), dict(flatten(after.model_dump(mode="json")))
    return {path for path in old.keys() | new.keys() if old.get(path) != new.get(path)}


def random_vacs(rng: random.Random, apps: list[str], services: list[str]) -> tuple[VaCSpec, ...]:
    vacs = [
        VaCSpecFactory(steady_state_name=f"pods-{app}", probe=ProbeSpecFactory(selector={"app": app}))
        for app in rng.sample(apps, rng.randint(1, len(apps)))
    ]
    for service in rng.sample(services, rng.randint(0, len(services))):
        probe = ProbeSpecFactory(
            tool=ProbeTool.HTTP_LOAD,
            quantity=Quantity.SUCCESS_RATE,
            selector={},
            url=service_url(service, "default"),
            virtual_users=5,
        )
        threshold = ThresholdFactory(unit=Unit.RATIO, value=0.99)
        vacs.append(VaCSpecFactory(steady_state_name=f"http-{service}", probe=probe, threshold=threshold))
    return tuple(vacs)


def relabel(labels: dict[str, str], renames: dict[str, str]) -> dict[str, str]:
    return {key: renames.get(value, value) for key, value in labels.items()}


def replanner_answer(plan: ExperimentPlan, renames: dict[str, str], namespace: str) -> dict:
    probes = []
    for vac in plan.vacs:
        url = service_url(vac.probe.url.split("//")[1].split(".")[0], namespace) if vac.probe.url else ""
        probes.append(
            {
                "steady_state": vac.steady_state_name,
                "namespace": namespace,
                "selector": relabel(vac.probe.selector, renames),
                "url": url,
            },
        )
    faults = [
        {
            "name": fault.name,
            "kind": fault.kind.value,
            "subtype": fault.subtype.value,
            "namespace": namespace,
            "selector": relabel(fault.selector.labels, renames),
        }
        for fault in plan.faults
    ]
    return {"probes": probes, "faults": faults}


@pytest.mark.parametrize("seed", range(CASES))
def test_relabelled_manifests_only_move_targets(seed, scripted_gateway):
    rng = random.Random(seed)  # noqa: S311
    workloads = random_workloads(rng)
    old_set = manifest_set_from(workloads)
    apps = sorted({r.pod_labels["app"] for r in old_set.resources if r.pod_labels})
    services = [r.name for r in old_set.resources if r.kind == ResourceKind.SERVICE]
    faults = tuple(random_fault_spec(rng, f"fault-{index}", rng.choice(apps)) for index in range(rng.randint(1, 3)))
    plan = ExperimentPlanFactory(vacs=random_vacs(rng, apps, services), faults=faults)

    renamed = rng.sample(apps, rng.randint(1, len(apps)))
    renames = {app: f"{app}-v{rng.randint(2, 9)}" for app in renamed}
    namespace = rng.choice(["default", "shop"])
    new_set = manifest_set_from(workloads, labels=renames, namespace=namespace)
    gateway = scripted_gateway(replanner_answer(plan, renames, namespace))

    replanned = replan_experiment(plan, old_set, new_set, gateway)

    changed = changed_fields(plan, replanned)
    assert all(TARGET_FIELDS.match(path) for path in changed), sorted(changed)
    assert replanned.intent() == plan.intent()
    for before, after in zip(plan.vacs, replanned.vacs, strict=True):
        assert after.threshold == before.threshold
        assert after.probe.namespace == namespace
        assert after.probe.selector == relabel(before.probe.selector, renames)
    for before, after in zip(plan.faults, replanned.faults, strict=True):
        assert after.selector.labels == relabel(before.selector.labels, renames)
        assert after.selector.namespace == namespace
        assert (after.kind, after.subtype, after.params) == (before.kind, before.subtype, before.params)
