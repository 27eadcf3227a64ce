import json
from collections.abc import Callable
from pathlib import Path

import pytest

from chaoscycle.agents.ledger import LedgerRecorder
from chaoscycle.agents.roles import BackendReply
from chaoscycle.agents.services.gateway import AgentGateway
from chaoscycle.agents.services.replay_backend import ReplayBackend
from chaoscycle.core.loaders import load_project_input
from chaoscycle.core.loaders import validate_project_input
from chaoscycle.core.records import ProcessedContext
from chaoscycle.core.records import Usage
from chaoscycle.core.resources import ManifestSet
from chaoscycle.core.resources import ProjectInput
from chaoscycle.cycles.config import CycleConfig
from chaoscycle.cycles.config import load_cycle_config
from chaoscycle.simulator.services.cluster import SimulatedCluster

FIXTURES = Path(__file__).resolve().parent / "fixtures"
PROJECTS = FIXTURES / "projects"
TRANSCRIPTS = FIXTURES / "transcripts"
GOLDEN = FIXTURES / "golden"


@pytest.fixture(autouse=True)
def _artifact_root(settings, tmp_path) -> None:
    settings.CHAOS_ARTIFACT_ROOT = str(tmp_path / "cycles")


def project_dir(name: str) -> Path:
    return PROJECTS / name


def transcript_path(name: str) -> Path:
    return TRANSCRIPTS / f"{name}.jsonl"


@pytest.fixture
def nginx_project() -> ProjectInput:
    return load_project_input(project_dir("nginx"))


@pytest.fixture
def nginx_set(nginx_project) -> ManifestSet:
    return validate_project_input(nginx_project)


@pytest.fixture
def resilient_set() -> ManifestSet:
    return validate_project_input(load_project_input(project_dir("nginx_resilient")))


@pytest.fixture
def sockshop_set() -> ManifestSet:
    return validate_project_input(load_project_input(project_dir("sockshop")))


@pytest.fixture
def replay_gateway() -> Callable[[str], AgentGateway]:
    """Gateway answering from a shipped transcript, on its own ledger."""

    def build(name: str) -> AgentGateway:
        return AgentGateway(ReplayBackend.from_file(transcript_path(name)), recorder=LedgerRecorder())

    return build


@pytest.fixture
def replay_config() -> Callable[..., CycleConfig]:
    def build(name: str, **overrides) -> CycleConfig:
        return load_cycle_config(overrides={"backend": "replay", "transcript": transcript_path(name), **overrides})

    return build


class ScriptedBackend:
    """Answers attempts from a fixed list and remembers every prompt it saw."""

    def __init__(self, *outputs) -> None:
        self.outputs = list(outputs)
        self.calls = []

    def complete(self, call, attempt, messages):
        self.calls.append((call, attempt, messages))
        output = self.outputs.pop(0)
        text = output if isinstance(output, str) else json.dumps(output)
        return BackendReply(text=text, usage=Usage(input_tokens=100, output_tokens=10, wall_time_s=0.5))


@pytest.fixture
def scripted() -> type[ScriptedBackend]:
    return ScriptedBackend


@pytest.fixture
def scripted_gateway() -> Callable[..., AgentGateway]:
    def build(*outputs) -> AgentGateway:
        return AgentGateway(ScriptedBackend(*outputs), recorder=LedgerRecorder())

    return build


@pytest.fixture
def nginx_context() -> ProcessedContext:
    return ProcessedContext(application_guess="static web server (Nginx) exposed through a Service")


@pytest.fixture
def deployed_cluster() -> Callable[[ManifestSet], SimulatedCluster]:
    """A fresh simulated cluster running the given set, every pod ready."""

    def build(manifest_set: ManifestSet, seed: int = 0) -> SimulatedCluster:
        cluster = SimulatedCluster(seed=seed)
        cluster.deploy(manifest_set)
        cluster.settle()
        return cluster

    return build
