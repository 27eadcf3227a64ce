from __future__ import annotations

from pathlib import Path

from django.core.management.base import BaseCommand
from django.core.management.base import CommandError

from chaoscycle.core.exceptions import ConfigurationError
from chaoscycle.cycles.services.artifacts import read_record
from chaoscycle.cycles.services.report import render_ledger_json
from chaoscycle.cycles.services.report import render_ledger_table


class Command(BaseCommand):
    help = "Render the cost ledger and outcome of a recorded cycle."

    def add_arguments(self, parser):
        parser.add_argument("record", type=Path, help="Path to a record.json.")
        parser.add_argument("--format", choices=["table", "json"], default="table")

    def handle(self, *args, **options):
        try:
            record = read_record(options["record"])
        except ConfigurationError as exc:
            raise CommandError(str(exc), returncode=1) from exc

        if options["format"] == "json":
            self.stdout.write(render_ledger_json(record.ledger), ending="")
            return

        self.stdout.write(f"Outcome: {record.outcome.describe()}")
        if record.hypothesis is not None:
            self.stdout.write(f"Hypothesis: {record.hypothesis.statement}")
        self.stdout.write(render_ledger_table(record.ledger), ending="")
