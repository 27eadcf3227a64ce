import pytest
from celery.result import EagerResult

from chaoscycle.conftest import project_dir
from chaoscycle.conftest import transcript_path
from chaoscycle.cycles.models import CycleRun
from chaoscycle.cycles.tasks import run_cycle_task

from .conftest import HARMFUL_INSTRUCTIONS

pytestmark = pytest.mark.django_db


@pytest.fixture(autouse=True)
def _eager(settings):
    settings.CELERY_TASK_ALWAYS_EAGER = True


def overrides(transcript):
    return {"backend": "replay", "transcript": str(transcript_path(transcript))}


def test_run_cycle_task(tmp_path):
    task_result = run_cycle_task.delay(
        str(project_dir("nginx_resilient")),
        str(tmp_path / "run"),
        overrides("nginx_resilient"),
    )
    assert isinstance(task_result, EagerResult)
    run = CycleRun.objects.get()
    assert task_result.result == {"status": "ok", "outcome": "SatisfiedNoChange", "run_id": str(run.public_id)}
    assert run.cycle_record.outcome.describe() == "SatisfiedNoChange"


def test_aborted_cycles_are_stored(tmp_path):
    task_result = run_cycle_task.delay(
        str(project_dir("nginx")),
        str(tmp_path / "run"),
        overrides("policy_rejected"),
        instructions=HARMFUL_INSTRUCTIONS,
    )
    assert task_result.result["status"] == "aborted"
    assert CycleRun.objects.aborted().count() == 1


def test_errors_are_reported(tmp_path):
    task_result = run_cycle_task.delay(str(tmp_path / "none"), str(tmp_path / "run"), overrides("nginx"))
    assert task_result.result["status"] == "error"
    assert not CycleRun.objects.exists()
