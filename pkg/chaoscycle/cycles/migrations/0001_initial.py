# Generated by Django 5.2.7

import uuid
from decimal import Decimal

from django.db import migrations
from django.db import models


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="CycleRun",
            fields=[
                ("id", models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name="ID")),
                ("public_id", models.UUIDField(default=uuid.uuid4, editable=False, unique=True)),
                ("project", models.CharField(help_text="Input folder the cycle ran on.", max_length=255)),
                ("instructions", models.TextField(blank=True)),
                (
                    "outcome",
                    models.CharField(
                        choices=[
                            ("SatisfiedNoChange", "Satisfied without change"),
                            ("SatisfiedAfterImprovement", "Satisfied after improvement"),
                            ("Aborted", "Aborted"),
                        ],
                        max_length=32,
                    ),
                ),
                ("improvement_loops", models.PositiveIntegerField(default=0)),
                ("reason", models.CharField(blank=True, max_length=512)),
                ("summary", models.TextField(blank=True)),
                ("artifact_dir", models.CharField(max_length=1024)),
                ("input_tokens", models.PositiveIntegerField(default=0)),
                ("output_tokens", models.PositiveIntegerField(default=0)),
                ("api_cost_usd", models.DecimalField(decimal_places=6, default=Decimal("0"), max_digits=12)),
                ("record", models.JSONField(help_text="The full cycle record as written to record.json.")),
                ("ledger", models.JSONField()),
                ("created_at", models.DateTimeField(auto_now_add=True)),
            ],
            options={
                "verbose_name": "Cycle run",
                "verbose_name_plural": "Cycle runs",
                "ordering": ("-created_at", "-id"),
            },
        ),
    ]
