import pytest

from chaoscycle.conftest import project_dir


@pytest.fixture
def deployment_text() -> str:
    return (project_dir("nginx_resilient") / "Deployment.yml").read_text()
