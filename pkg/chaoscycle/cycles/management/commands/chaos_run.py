from __future__ import annotations

from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand
from django.core.management.base import CommandError

from chaoscycle.core.exceptions import ChaosCycleError
from chaoscycle.core.exceptions import ConfigurationError
from chaoscycle.core.loaders import load_project_input
from chaoscycle.cycles.config import load_cycle_config
from chaoscycle.cycles.models import CycleRun
from chaoscycle.cycles.services.pipeline import run_cycle
from chaoscycle.cycles.services.report import render_ledger_table

EXIT_USAGE = 1
EXIT_ABORTED = 2


class Command(BaseCommand):
    help = "Run a full chaos engineering cycle on a project folder and write its artifacts."

    def add_arguments(self, parser):
        parser.add_argument("input_dir", type=Path, help="Folder with skaffold.yaml and the K8s manifests.")
        parser.add_argument("--config", type=Path, default=None, help="YAML cycle configuration file.")
        parser.add_argument("--instructions", default="", help="Free-text instructions for the cycle.")
        parser.add_argument(
            "--out",
            type=Path,
            default=None,
            help="Artifact folder (default: CHAOS_ARTIFACT_ROOT/<input folder name>).",
        )
        parser.add_argument("--backend", choices=["http", "replay"], default=None, help="LLM backend.")
        parser.add_argument("--transcript", type=Path, default=None, help="Replay transcript (JSON lines).")
        parser.add_argument("--seed", type=int, default=None, help="Simulator seed.")
        parser.add_argument("--max-loops", type=int, default=None, help="Improvement loop budget.")
        parser.add_argument(
            "--max-experiment-s",
            type=int,
            default=None,
            help="Upper bound on one experiment's duration in seconds.",
        )
        parser.add_argument(
            "--record-transcript",
            type=Path,
            default=None,
            help="Append every agent reply to this transcript.",
        )
        parser.add_argument("--persist", action="store_true", help="Store the run as a CycleRun.")

    def handle(self, *args, **options):
        input_dir: Path = options["input_dir"]
        if not input_dir.is_dir():
            msg = f"Input folder {input_dir} does not exist"
            raise CommandError(msg, returncode=EXIT_USAGE)
        out_dir: Path = options["out"] or Path(settings.CHAOS_ARTIFACT_ROOT) / input_dir.resolve().name

        overrides = {
            "backend": options["backend"],
            "transcript": options["transcript"],
            "seed": options["seed"],
            "max_loops": options["max_loops"],
            "max_experiment_s": options["max_experiment_s"],
            "record_transcript": options["record_transcript"],
        }
        try:
            config = load_cycle_config(options["config"], overrides)
            project = load_project_input(input_dir, options["instructions"])
            record, output = run_cycle(project, config, out_dir)
        except (ChaosCycleError, OSError) as exc:
            kind = "Configuration error" if isinstance(exc, ConfigurationError) else "Error"
            raise CommandError(f"{kind}: {exc}", returncode=EXIT_USAGE) from exc

        if options["persist"]:
            run = CycleRun.from_record(record, project=str(input_dir), artifact_dir=out_dir)
            self.stdout.write(f"Stored as cycle run {run.public_id}")

        self.stdout.write(f"Artifacts: {out_dir}")
        if output is not None:
            self.stdout.write(f"Output folder: {output}")
        self.stdout.write(render_ledger_table(record.ledger), ending="")

        if not record.outcome.satisfied:
            raise CommandError(f"Cycle {record.outcome.describe()}", returncode=EXIT_ABORTED)
        self.stdout.write(self.style.SUCCESS(f"Cycle {record.outcome.describe()}"))
