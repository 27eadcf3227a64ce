"""On-disk artifacts of a cycle run.

Layout under the run folder::

    record.json  ledger.json  events.jsonl
    loop-N/{plan,workflow,result,report,reconfig}.json  loop-N/workflow.yaml  loop-N/events.jsonl
    output/
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from chaoscycle.core.exceptions import ConfigurationError
from chaoscycle.core.exceptions import InvariantViolation
from chaoscycle.core.records import SCHEMA_VERSION
from chaoscycle.core.records import CycleRecord
from chaoscycle.core.records import LoopRecord
from chaoscycle.core.resources import ManifestSet
from chaoscycle.experiments.services.workflow import render_workflow_yaml
from chaoscycle.manifests.services.output import write_output_folder
from chaoscycle.simulator.services.cluster import SimulatedCluster

from .report import render_ledger_json

logger = logging.getLogger(__name__)

OUTPUT_FOLDER = "output"


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


class ArtifactWriter:
    def __init__(self, root: Path) -> None:
        self.root = Path(root)
        output = self.root / OUTPUT_FOLDER
        if output.exists() and any(output.iterdir()):
            msg = f"Output folder {output} is not empty"
            raise FileExistsError(msg)
        self.root.mkdir(parents=True, exist_ok=True)

    def write_text(self, relative: str, text: str) -> Path:
        target = self.root / relative
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        return target

    def write_json(self, relative: str, data: Any) -> Path:
        return self.write_text(relative, dump_json(data))

    def write_loop(self, loop: LoopRecord) -> None:
        folder = f"loop-{loop.index}"
        self.write_json(f"{folder}/plan.json", loop.plan.model_dump(mode="json"))
        self.write_json(f"{folder}/workflow.json", loop.workflow.model_dump(mode="json"))
        self.write_text(f"{folder}/workflow.yaml", render_workflow_yaml(loop.workflow))
        self.write_json(f"{folder}/result.json", loop.result.model_dump(mode="json"))
        if loop.report is not None:
            self.write_json(f"{folder}/report.json", loop.report.model_dump(mode="json"))
        if loop.reconfiguration is not None:
            self.write_json(f"{folder}/reconfig.json", loop.reconfiguration.model_dump(mode="json"))

    def write_events(self, relative: str, cluster: SimulatedCluster) -> None:
        target = self.root / relative
        target.parent.mkdir(parents=True, exist_ok=True)
        cluster.export_events(target)

    def write_output(self, manifest_set: ManifestSet) -> Path:
        destination = self.root / OUTPUT_FOLDER
        write_output_folder(manifest_set, destination)
        return destination

    def write_record(self, record: CycleRecord) -> None:
        self.write_text("ledger.json", render_ledger_json(record.ledger))
        self.write_json("record.json", record.model_dump(mode="json"))
        logger.info("Cycle artifacts written to %s", self.root)


def read_record(path: Path) -> CycleRecord:
    """Load a record.json, refusing schema versions this code does not know."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        msg = f"Cannot read cycle record {path}: {exc}"
        raise ConfigurationError(msg) from exc
    version = data.get("schema_version") if isinstance(data, dict) else None
    if version != SCHEMA_VERSION:
        msg = f"Cycle record {path} has schema version {version}, expected {SCHEMA_VERSION}"
        raise ConfigurationError(msg)
    try:
        return CycleRecord.model_validate(data)
    except (ValidationError, InvariantViolation) as exc:
        msg = f"Cycle record {path} is invalid: {exc}"
        raise ConfigurationError(msg) from exc
