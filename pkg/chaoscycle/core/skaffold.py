"""Reading and regenerating the Skaffold deploy config."""

from __future__ import annotations

import fnmatch
from typing import Any

import yaml

from .exceptions import EmptyInput
from .exceptions import MalformedDocument
from .exceptions import MissingReference

DEFAULT_API_VERSION = "skaffold/v4beta11"


def yaml_position(exc: yaml.YAMLError) -> str | None:
    mark = getattr(exc, "problem_mark", None)
    if mark is None:
        return None
    return f"{mark.line + 1}:{mark.column + 1}"


def _load(deploy_config: str, config_path: str) -> dict[str, Any]:
    try:
        config = yaml.safe_load(deploy_config) or {}
    except yaml.YAMLError as exc:
        raise MalformedDocument(config_path, yaml_position(exc), "unreadable deploy config") from exc
    if not isinstance(config, dict):
        raise MalformedDocument(config_path, None, "deploy config must be a mapping")
    return config


def deploy_config_paths(deploy_config: str, available: list[str], config_path: str = "skaffold.yaml") -> list[str]:
    """Manifest paths named by a Skaffold config, in apply order."""
    config = _load(deploy_config, config_path)
    patterns = (config.get("manifests") or {}).get("rawYaml")
    if patterns is None:
        # skaffold/v1 layout
        patterns = ((config.get("deploy") or {}).get("kubectl") or {}).get("manifests")
    if not patterns:
        raise EmptyInput(f"{config_path} names no manifests")

    ordered: list[str] = []
    for pattern in patterns:
        if any(char in pattern for char in "*?["):
            matched = sorted(path for path in available if fnmatch.fnmatch(path, pattern))
        else:
            matched = [pattern] if pattern in available else []
        if not matched:
            raise MissingReference(pattern)
        ordered.extend(path for path in matched if path not in ordered)
    return ordered


def regenerate_deploy_config(original: str, paths: list[str], config_path: str = "skaffold.yaml") -> str:
    """A Skaffold config listing exactly ``paths``; apiVersion and metadata are kept."""
    config = _load(original, config_path) if original else {}
    regenerated: dict[str, Any] = {
        "apiVersion": config.get("apiVersion", DEFAULT_API_VERSION),
        "kind": config.get("kind", "Config"),
    }
    if config.get("metadata"):
        regenerated["metadata"] = config["metadata"]
    kubectl = (config.get("deploy") or {}).get("kubectl")
    if isinstance(kubectl, dict) and "manifests" in kubectl:
        # skaffold/v1 layout keeps the list under deploy.kubectl
        regenerated["deploy"] = {**config["deploy"], "kubectl": {**kubectl, "manifests": list(paths)}}
    else:
        regenerated["manifests"] = {"rawYaml": list(paths)}
        if config.get("deploy"):
            regenerated["deploy"] = config["deploy"]
    return yaml.safe_dump(regenerated, sort_keys=False, default_flow_style=False)
