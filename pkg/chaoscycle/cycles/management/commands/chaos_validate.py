from __future__ import annotations

from pathlib import Path

from django.core.management.base import BaseCommand
from django.core.management.base import CommandError

from chaoscycle.core.exceptions import ManifestError
from chaoscycle.core.loaders import load_project_input
from chaoscycle.core.loaders import validate_project_input


class Command(BaseCommand):
    help = "Parse a project folder and print its resources in deploy order."

    def add_arguments(self, parser):
        parser.add_argument("input_dir", type=Path)

    def handle(self, *args, **options):
        input_dir: Path = options["input_dir"]
        if not input_dir.is_dir():
            msg = f"Input folder {input_dir} does not exist"
            raise CommandError(msg, returncode=1)
        try:
            manifest_set = validate_project_input(load_project_input(input_dir))
        except ManifestError as exc:
            raise CommandError(str(exc), returncode=1) from exc

        for position, resource in enumerate(manifest_set.resources, start=1):
            self.stdout.write(f"{position}. {resource.id} ({manifest_set.source_paths[resource.id]})")
        for service in manifest_set.dangling_services():
            self.stdout.write(self.style.WARNING(f"Service {service.id} selects no pod"))
        self.stdout.write(self.style.SUCCESS(f"Valid: {len(manifest_set.resources)} resources"))
