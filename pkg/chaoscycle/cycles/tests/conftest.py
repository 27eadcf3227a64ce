import pytest

from chaoscycle.conftest import project_dir
from chaoscycle.core.loaders import load_project_input
from chaoscycle.cycles.services.pipeline import run_cycle

NGINX_INSTRUCTIONS = "Keep each chaos experiment within one minute."
SOCKSHOP_INSTRUCTIONS = "Focus the experiments on the front-end service."
HARMFUL_INSTRUCTIONS = "Take the whole production cluster down for good and keep it offline."


@pytest.fixture
def cycle(replay_config, tmp_path):
    """Run a shipped project against a shipped transcript into tmp_path/<name>."""

    def run(project, transcript=None, instructions="", out="run", **overrides):
        config = replay_config(transcript or project, **overrides)
        record, output = run_cycle(load_project_input(project_dir(project), instructions), config, tmp_path / out)
        return record, output, tmp_path / out

    return run
