import logging

import pytest
import yaml

from chaoscycle.core.enums import ReconfigOpKind
from chaoscycle.core.enums import ResourceKind
from chaoscycle.core.exceptions import PathExists
from chaoscycle.core.exceptions import PathNotFound
from chaoscycle.core.records import ReconfigOp
from chaoscycle.core.records import Reconfiguration
from chaoscycle.manifests.services.apply import apply_reconfiguration
from chaoscycle.manifests.services.apply import dangling_selector_warnings


def reconfigure(*ops: ReconfigOp) -> Reconfiguration:
    return Reconfiguration(ops=ops, rationale="test")


class TestApplyReconfiguration:
    def test_replace_pod_with_deployment(self, nginx_set, deployment_text):
        result = apply_reconfiguration(
            nginx_set,
            reconfigure(ReconfigOp(op=ReconfigOpKind.REPLACE, path="Pod.yml", text=deployment_text)),
        )
        assert result.paths == ("Pod.yml", "Service.yml")
        assert result.find(ResourceKind.POD, "example-pod") is None
        assert result.find(ResourceKind.DEPLOYMENT, "example-deployment").replicas == 2  # noqa: PLR2004
        assert result.deploy_config == nginx_set.deploy_config
        assert result.warnings == ()

    def test_delete_and_create_regenerate_deploy_config(self, nginx_set, deployment_text):
        result = apply_reconfiguration(
            nginx_set,
            reconfigure(
                ReconfigOp(op=ReconfigOpKind.DELETE, path="Pod.yml"),
                ReconfigOp(op=ReconfigOpKind.CREATE, path="Deployment.yml", text=deployment_text),
            ),
        )
        assert result.paths == ("Service.yml", "Deployment.yml")
        config = yaml.safe_load(result.deploy_config)
        assert config["manifests"]["rawYaml"] == ["Service.yml", "Deployment.yml"]
        assert config["metadata"] == {"name": "nginx"}

    def test_input_set_is_untouched(self, nginx_set):
        before = nginx_set.model_copy()
        apply_reconfiguration(nginx_set, reconfigure(ReconfigOp(op=ReconfigOpKind.DELETE, path="Service.yml")))
        assert nginx_set == before
        assert nginx_set.paths == ("Pod.yml", "Service.yml")

    def test_rejects_unknown_paths(self, nginx_set, deployment_text):
        with pytest.raises(PathNotFound):
            apply_reconfiguration(nginx_set, reconfigure(ReconfigOp(op=ReconfigOpKind.DELETE, path="nope.yml")))
        with pytest.raises(PathExists):
            apply_reconfiguration(
                nginx_set,
                reconfigure(ReconfigOp(op=ReconfigOpKind.CREATE, path="Service.yml", text=deployment_text)),
            )

    def test_dangling_selector_is_a_warning(self, nginx_set, caplog):
        relabelled = nginx_set.texts["Pod.yml"].replace("app: nginx", "app: web")
        with caplog.at_level(logging.WARNING):
            result = apply_reconfiguration(
                nginx_set,
                reconfigure(ReconfigOp(op=ReconfigOpKind.REPLACE, path="Pod.yml", text=relabelled)),
            )
        assert result.warnings == dangling_selector_warnings(result)
        assert len(result.warnings) == 1
        assert result.warnings[0].startswith("DanglingSelector: Service/default/example-service")
        assert "DanglingSelector" in caplog.text


def test_no_warnings_when_selectors_match(nginx_set, sockshop_set):
    assert dangling_selector_warnings(nginx_set) == ()
    assert dangling_selector_warnings(sockshop_set) == ()
