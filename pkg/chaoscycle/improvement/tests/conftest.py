import pytest

from chaoscycle.conftest import project_dir
from chaoscycle.core.enums import ReconfigOpKind
from chaoscycle.core.records import AnalysisReport
from chaoscycle.core.records import ExperimentResult
from chaoscycle.core.records import LoopRecord
from chaoscycle.core.records import ReconfigOp
from chaoscycle.core.records import Reconfiguration
from chaoscycle.core.tests.factories import ExperimentPlanFactory
from chaoscycle.experiments.services.executor import execute_experiment
from chaoscycle.experiments.services.workflow import compile_workflow
from chaoscycle.simulator.services.cluster import SimulatedCluster


@pytest.fixture
def deployment_text() -> str:
    return (project_dir("nginx_resilient") / "Deployment.yml").read_text()


@pytest.fixture
def to_deployment(deployment_text) -> Reconfiguration:
    return Reconfiguration(
        ops=(
            ReconfigOp(op=ReconfigOpKind.DELETE, path="Pod.yml"),
            ReconfigOp(op=ReconfigOpKind.CREATE, path="Deployment.yml", text=deployment_text),
        ),
        rationale="let a controller replace killed pods",
    )


@pytest.fixture
def report() -> AnalysisReport:
    return AnalysisReport(
        failed_items=("post-vac-0",),
        causes=("restartPolicy Never keeps the killed pod down",),
        countermeasures=("run the server from a Deployment",),
    )


@pytest.fixture
def plan():
    return ExperimentPlanFactory()


@pytest.fixture
def first_loop(plan, nginx_set) -> LoopRecord:
    workflow = compile_workflow(plan)
    result = execute_experiment(workflow, SimulatedCluster(), nginx_set)
    return LoopRecord(index=0, plan=plan, workflow=workflow, result=result, manifests_after=nginx_set)


@pytest.fixture
def failed_result(first_loop) -> ExperimentResult:
    return first_loop.result
