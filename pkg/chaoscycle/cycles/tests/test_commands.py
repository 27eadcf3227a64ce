from io import StringIO
from pathlib import Path

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from chaoscycle.conftest import project_dir
from chaoscycle.conftest import transcript_path
from chaoscycle.cycles.models import CycleRun

from .conftest import HARMFUL_INSTRUCTIONS
from .conftest import NGINX_INSTRUCTIONS


def run_command(name, *args):
    out = StringIO()
    call_command(name, *map(str, args), stdout=out, no_color=True)
    return out.getvalue()


def replay(transcript):
    return ["--backend", "replay", "--transcript", transcript_path(transcript)]


class TestChaosValidate:
    def test_lists_resources_in_deploy_order(self):
        out = run_command("chaos_validate", project_dir("nginx"))
        assert out.splitlines() == [
            "1. Pod/default/example-pod (Pod.yml)",
            "2. Service/default/example-service (Service.yml)",
            "Valid: 2 resources",
        ]

    def test_missing_folder(self, tmp_path):
        with pytest.raises(CommandError, match="does not exist") as excinfo:
            run_command("chaos_validate", tmp_path / "none")
        assert excinfo.value.returncode == 1

    def test_broken_manifest(self, tmp_path):
        (tmp_path / "skaffold.yaml").write_text((project_dir("nginx") / "skaffold.yaml").read_text())
        (tmp_path / "Pod.yml").write_text("kind: [\n")
        with pytest.raises(CommandError) as excinfo:
            run_command("chaos_validate", tmp_path)
        assert excinfo.value.returncode == 1


class TestChaosRun:
    def test_satisfied(self, tmp_path):
        out_dir = tmp_path / "run"
        out = run_command(
            "chaos_run",
            project_dir("nginx"),
            "--instructions",
            NGINX_INSTRUCTIONS,
            "--out",
            out_dir,
            *replay("nginx"),
        )
        assert f"Artifacts: {out_dir}" in out
        assert f"Output folder: {out_dir / 'output'}" in out
        assert "Input tokens" in out
        assert "Cycle SatisfiedAfterImprovement(1)" in out
        assert (out_dir / "output" / "Deployment.yml").is_file()

    def test_default_artifact_folder(self, settings):
        run_command("chaos_run", project_dir("nginx_resilient"), *replay("nginx_resilient"))
        assert (Path(settings.CHAOS_ARTIFACT_ROOT) / "nginx_resilient" / "record.json").is_file()

    def test_policy_rejection_exits_2(self, tmp_path):
        args = ["--instructions", HARMFUL_INSTRUCTIONS, "--out", tmp_path / "run", *replay("policy_rejected")]
        with pytest.raises(CommandError, match="Aborted") as excinfo:
            run_command("chaos_run", project_dir("nginx"), *args)
        assert excinfo.value.returncode == 2  # noqa: PLR2004
        assert (tmp_path / "run" / "record.json").is_file()

    def test_max_loops_exits_2(self, tmp_path):
        with pytest.raises(CommandError, match="max loops") as excinfo:
            run_command("chaos_run", project_dir("nginx"), "--out", tmp_path / "run", *replay("nginx_futile"))
        assert excinfo.value.returncode == 2  # noqa: PLR2004

    def test_configuration_error_exits_1(self, tmp_path):
        with pytest.raises(CommandError, match="Configuration error") as excinfo:
            run_command("chaos_run", project_dir("nginx"), "--out", tmp_path / "run", "--backend", "replay")
        assert excinfo.value.returncode == 1

    def test_missing_folder(self, tmp_path):
        with pytest.raises(CommandError) as excinfo:
            run_command("chaos_run", tmp_path / "none")
        assert excinfo.value.returncode == 1

    @pytest.mark.django_db
    def test_persist(self, tmp_path):
        out = run_command(
            "chaos_run",
            project_dir("nginx_resilient"),
            "--out",
            tmp_path / "run",
            "--persist",
            *replay("nginx_resilient"),
        )
        run = CycleRun.objects.get()
        assert f"Stored as cycle run {run.public_id}" in out
        assert run.outcome == "SatisfiedNoChange"
        assert run.artifact_dir == str(tmp_path / "run")


class TestChaosReport:
    @pytest.fixture
    def record_path(self, tmp_path):
        run_command("chaos_run", project_dir("nginx_resilient"), "--out", tmp_path, *replay("nginx_resilient"))
        return tmp_path / "record.json"

    def test_table(self, record_path):
        out = run_command("chaos_report", record_path)
        lines = out.splitlines()
        assert lines[0] == "Outcome: SatisfiedNoChange"
        assert lines[1].startswith("Hypothesis: All VaC checks (pod-availability)")
        assert lines[-1].startswith("Time")

    def test_json(self, record_path):
        out = run_command("chaos_report", record_path, "--format", "json")
        assert out == (record_path.parent / "ledger.json").read_text()

    def test_unreadable_record(self, tmp_path):
        with pytest.raises(CommandError, match="Cannot read cycle record") as excinfo:
            run_command("chaos_report", tmp_path / "record.json")
        assert excinfo.value.returncode == 1
