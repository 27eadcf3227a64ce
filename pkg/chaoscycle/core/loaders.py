"""Parsing of project input: Kubernetes manifests in Skaffold apply order."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml

from .enums import ResourceKind
from .enums import RestartPolicy
from .exceptions import EmptyInput
from .exceptions import InvariantViolation
from .exceptions import MalformedDocument
from .exceptions import MissingReference
from .resources import ManifestFile
from .resources import ManifestSet
from .resources import ProjectInput
from .resources import Resource
from .skaffold import deploy_config_paths
from .skaffold import yaml_position

logger = logging.getLogger(__name__)

DEPLOY_CONFIG_NAMES = ("skaffold.yaml", "skaffold.yml")
MANIFEST_SUFFIXES = (".yaml", ".yml")


def load_documents(path: str, text: str) -> list[dict[str, Any]]:
    """Parse a multi-document YAML text, skipping empty documents."""
    try:
        documents = [doc for doc in yaml.safe_load_all(text) if doc is not None]
    except yaml.YAMLError as exc:
        raise MalformedDocument(path, yaml_position(exc), str(getattr(exc, "problem", exc))) from exc
    for index, document in enumerate(documents):
        if not isinstance(document, dict):
            raise MalformedDocument(path, f"document {index}", "expected a mapping")
    return documents


def dump_documents(documents: list[dict[str, Any]]) -> str:
    return yaml.safe_dump_all(documents, sort_keys=False, default_flow_style=False)


def _string_map(value: Any, field: str) -> dict[str, str]:
    if value is None:
        return {}
    if not isinstance(value, dict):
        msg = f"{field} must be a mapping"
        raise TypeError(msg)
    return {str(key): str(val) for key, val in value.items()}


def _first_port(value: Any) -> Any:
    if value is None:
        return None
    if not isinstance(value, list) or not all(isinstance(port, dict) for port in value):
        msg = "spec.ports must be a list of mappings"
        raise TypeError(msg)
    return value[0].get("port") if value else None


def resource_from_document(document: dict[str, Any], path: str) -> Resource:
    kind_name = document.get("kind")
    metadata = document.get("metadata") or {}
    if not kind_name or not isinstance(metadata, dict) or not metadata.get("name"):
        raise MalformedDocument(path, None, "document needs kind and metadata.name")

    try:
        kind = ResourceKind(kind_name)
    except ValueError:
        kind = ResourceKind.OTHER

    try:
        spec = document.get("spec") or {}
        fields: dict[str, Any] = {
            "kind": kind,
            "kind_name": str(kind_name),
            "name": str(metadata["name"]),
            "namespace": str(metadata.get("namespace") or "default"),
            "labels": _string_map(metadata.get("labels"), "metadata.labels"),
            "document": document,
        }
        if kind == ResourceKind.POD:
            fields["restart_policy"] = RestartPolicy(spec.get("restartPolicy", RestartPolicy.ALWAYS))
        elif kind == ResourceKind.DEPLOYMENT:
            fields["replicas"] = spec.get("replicas", 1)
            template = (spec.get("template") or {}).get("metadata") or {}
            fields["pod_template_labels"] = _string_map(template.get("labels"), "spec.template.metadata.labels")
        elif kind == ResourceKind.SERVICE:
            fields["selector"] = _string_map(spec.get("selector"), "spec.selector")
            fields["port"] = _first_port(spec.get("ports"))
        return Resource(**fields)
    except (ValueError, TypeError, AttributeError, InvariantViolation) as exc:
        raise MalformedDocument(path, f"{kind_name}/{metadata.get('name')}", str(exc)) from exc


def parse_manifest_text(path: str, text: str) -> list[Resource]:
    return [resource_from_document(document, path) for document in load_documents(path, text)]


def build_manifest_set(
    files: list[tuple[str, str]],
    deploy_config: str,
    deploy_config_path: str = "skaffold.yaml",
    warnings: tuple[str, ...] = (),
) -> ManifestSet:
    """Build a set from (path, text) pairs already in deploy order."""
    resources: list[Resource] = []
    source_paths: dict[str, str] = {}
    for path, text in files:
        for resource in parse_manifest_text(path, text):
            resources.append(resource)
            source_paths.setdefault(resource.id, path)
    return ManifestSet(
        resources=tuple(resources),
        source_paths=source_paths,
        texts=dict(files),
        deploy_config=deploy_config,
        deploy_config_path=deploy_config_path,
        warnings=warnings,
    )


def validate_project_input(project: ProjectInput) -> ManifestSet:
    """Parse a project into a ManifestSet ordered as its deploy config says."""
    available = [manifest.path for manifest in project.manifests]
    ordered = deploy_config_paths(project.deploy_config, available, project.deploy_config_path)
    unused = sorted(set(available) - set(ordered))
    if unused:
        logger.info("Ignoring manifests not referenced by %s: %s", project.deploy_config_path, unused)
    files = [(path, project.text_of(path) or "") for path in ordered]
    manifest_set = build_manifest_set(files, project.deploy_config, project.deploy_config_path)
    if not manifest_set.resources:
        raise EmptyInput("manifests contain no resources")
    return manifest_set


def load_project_input(directory: Path, instructions: str = "") -> ProjectInput:
    """Read a project folder: one Skaffold config plus manifest files."""
    directory = Path(directory)
    config_path = next((directory / name for name in DEPLOY_CONFIG_NAMES if (directory / name).is_file()), None)
    if config_path is None:
        raise MissingReference(str(directory / DEPLOY_CONFIG_NAMES[0]))

    manifests = tuple(
        ManifestFile(path=path.relative_to(directory).as_posix(), text=path.read_text(encoding="utf-8"))
        for path in sorted(directory.rglob("*"))
        if path.is_file() and path.suffix in MANIFEST_SUFFIXES and path.name not in DEPLOY_CONFIG_NAMES
    )
    return ProjectInput(
        manifests=manifests,
        deploy_config=config_path.read_text(encoding="utf-8"),
        deploy_config_path=config_path.name,
        instructions=instructions,
    )
