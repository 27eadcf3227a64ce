"""Celery tasks running cycles in a worker."""

import logging
from pathlib import Path
from typing import Any

from celery import shared_task

from chaoscycle.core.exceptions import ChaosCycleError
from chaoscycle.core.loaders import load_project_input
from chaoscycle.cycles.config import load_cycle_config
from chaoscycle.cycles.models import CycleRun
from chaoscycle.cycles.services.pipeline import run_cycle

logger = logging.getLogger(__name__)


@shared_task(bind=True, max_retries=0)
def run_cycle_task(
    self,
    input_dir: str,
    out_dir: str,
    overrides: dict[str, Any] | None = None,
    instructions: str = "",
    config_path: str | None = None,
) -> dict[str, Any]:
    """Run one cycle and persist it as a CycleRun; never retried."""
    try:
        config = load_cycle_config(Path(config_path) if config_path else None, overrides)
        project = load_project_input(Path(input_dir), instructions)
        record, _ = run_cycle(project, config, Path(out_dir))
    except (ChaosCycleError, OSError) as exc:
        logger.exception("Cycle task %s on %s failed", self.request.id, input_dir)
        return {"status": "error", "message": str(exc)}

    run = CycleRun.from_record(record, project=input_dir, artifact_dir=Path(out_dir))
    logger.info("Cycle task %s finished: %s", self.request.id, record.outcome.describe())
    return {
        "status": "ok" if record.outcome.satisfied else "aborted",
        "outcome": record.outcome.describe(),
        "run_id": str(run.public_id),
    }
