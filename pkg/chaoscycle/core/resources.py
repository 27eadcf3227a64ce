"""Deployment-side value objects: project input, resources and manifest sets."""

from __future__ import annotations

from typing import Any
from typing import Self

from pydantic import Field
from pydantic import model_validator

from .enums import ResourceKind
from .enums import RestartPolicy
from .exceptions import DuplicateResourceId
from .exceptions import EmptyInput
from .exceptions import InvariantViolation
from .skaffold import deploy_config_paths
from .values import ValueModel
from .values import service_host


class ManifestFile(ValueModel):
    path: str
    text: str


class ProjectInput(ValueModel):
    manifests: tuple[ManifestFile, ...]
    deploy_config: str
    deploy_config_path: str = "skaffold.yaml"
    instructions: str = ""

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not self.manifests:
            raise EmptyInput("project input carries no manifests")
        deploy_config_paths(
            self.deploy_config,
            [manifest.path for manifest in self.manifests],
            self.deploy_config_path,
        )
        return self

    def text_of(self, path: str) -> str | None:
        for manifest in self.manifests:
            if manifest.path == path:
                return manifest.text
        return None


def resource_id(kind: str, namespace: str, name: str) -> str:
    return f"{kind}/{namespace}/{name}"


class Resource(ValueModel):
    kind: ResourceKind
    kind_name: str
    name: str
    namespace: str = "default"
    labels: dict[str, str] = Field(default_factory=dict)
    document: dict[str, Any] = Field(default_factory=dict)
    restart_policy: RestartPolicy | None = None
    replicas: int | None = None
    pod_template_labels: dict[str, str] = Field(default_factory=dict)
    selector: dict[str, str] = Field(default_factory=dict)
    port: int | None = None

    @model_validator(mode="after")
    def _check(self) -> Self:
        if not self.name:
            raise InvariantViolation(f"{self.kind_name} without a name")
        for labels in (self.labels, self.pod_template_labels, self.selector):
            if any(not key for key in labels):
                raise InvariantViolation(f"{self.id} has an empty label key")
        if self.kind == ResourceKind.POD and self.restart_policy is None:
            raise InvariantViolation(f"{self.id} needs a restart policy")
        if self.kind == ResourceKind.DEPLOYMENT and (self.replicas is None or self.replicas < 1):
            raise InvariantViolation(f"{self.id} needs replicas >= 1")
        if self.kind == ResourceKind.SERVICE:
            if not self.selector:
                raise InvariantViolation(f"{self.id} needs a non-empty selector")
            if self.port is None:
                raise InvariantViolation(f"{self.id} needs a port")
        return self

    @property
    def id(self) -> str:
        return resource_id(self.kind_name, self.namespace, self.name)

    @property
    def pod_labels(self) -> dict[str, str]:
        """Labels carried by the pods this resource creates, if any."""
        if self.kind == ResourceKind.POD:
            return self.labels
        if self.kind == ResourceKind.DEPLOYMENT:
            return self.pod_template_labels
        return {}

    def matches(self, namespace: str, selector: dict[str, str]) -> bool:
        labels = self.pod_labels
        return (
            bool(labels)
            and self.namespace == namespace
            and all(labels.get(key) == value for key, value in selector.items())
        )


class ManifestSet(ValueModel):
    """Parsed resources in deploy order, plus the raw text of every file."""

    resources: tuple[Resource, ...]
    source_paths: dict[str, str]
    texts: dict[str, str] = Field(repr=False)
    deploy_config: str = Field(default="", repr=False)
    deploy_config_path: str = "skaffold.yaml"
    warnings: tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check(self) -> Self:
        seen: set[str] = set()
        for resource in self.resources:
            if resource.id in seen:
                raise DuplicateResourceId(resource.id, self.source_paths.get(resource.id, "?"))
            seen.add(resource.id)
        if seen != set(self.source_paths):
            raise InvariantViolation("source_paths must map exactly the resource ids")
        unknown = set(self.source_paths.values()) - set(self.texts)
        if unknown:
            raise InvariantViolation(f"resources reference unknown files {sorted(unknown)}")
        return self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ManifestSet):
            return NotImplemented
        return self.resources == other.resources and self.source_paths == other.source_paths

    __hash__ = None  # type: ignore[assignment]

    @property
    def paths(self) -> tuple[str, ...]:
        return tuple(self.texts)

    def has_path(self, path: str) -> bool:
        return path in self.texts

    def resources_at(self, path: str) -> tuple[Resource, ...]:
        return tuple(r for r in self.resources if self.source_paths[r.id] == path)

    def structure(self) -> dict[str, tuple[dict[str, Any], ...]]:
        """Path -> parsed documents; order-insensitive structural view."""
        return {path: tuple(r.document for r in self.resources_at(path)) for path in sorted(self.texts)}

    def selector_matches(self, namespace: str, selector: dict[str, str]) -> tuple[Resource, ...]:
        if not selector:
            return ()
        return tuple(r for r in self.resources if r.matches(namespace, selector))

    def find(self, kind: ResourceKind, name: str, namespace: str = "default") -> Resource | None:
        for resource in self.resources:
            if resource.kind == kind and resource.name == name and resource.namespace == namespace:
                return resource
        return None

    def dangling_services(self) -> list[Resource]:
        return [
            r
            for r in self.resources
            if r.kind == ResourceKind.SERVICE and not self.selector_matches(r.namespace, r.selector)
        ]

    def structurally_equal(self, other: ManifestSet) -> bool:
        return self.structure() == other.structure()

    def service_for_url(self, url: str) -> Resource | None:
        name, namespace = service_host(url)
        for resource in self.resources:
            if (
                resource.kind == ResourceKind.SERVICE
                and resource.name == name
                and (namespace is None or resource.namespace == namespace)
            ):
                return resource
        return None
