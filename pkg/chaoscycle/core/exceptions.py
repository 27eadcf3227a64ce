"""Error hierarchy shared by every chaoscycle app."""

from __future__ import annotations

from typing import Any


class ChaosCycleError(RuntimeError):
    """Base class for all domain errors."""


class ConfigurationError(ChaosCycleError):
    """Raised when the cycle configuration is incomplete or contradictory."""


class InvariantViolation(ChaosCycleError):
    """Raised when a value object is constructed in violation of its invariants."""


# Manifests
# ------------------------------------------------------------------------------


class ManifestError(ChaosCycleError):
    """Raised for unusable project input or manifest documents."""


class EmptyInput(ManifestError):
    """Raised when a project carries no manifests at all."""


class MalformedDocument(ManifestError):
    def __init__(self, path: str, position: str | None = None, reason: str = "") -> None:
        self.path = path
        self.position = position
        self.reason = reason
        where = f"{path}:{position}" if position else path
        super().__init__(f"Malformed document {where}: {reason}".rstrip(": "))


class MissingReference(ManifestError):
    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"Deploy config references missing manifest {path}")


class DuplicateResourceId(ManifestError):
    def __init__(self, resource_id: str, path: str) -> None:
        self.resource_id = resource_id
        self.path = path
        super().__init__(f"Duplicate resource {resource_id} in {path}")


class PathNotFound(ManifestError):
    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"Manifest path {path} does not exist")


class PathExists(ManifestError):
    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"Manifest path {path} already exists")


# Agents
# ------------------------------------------------------------------------------


class BackendUnavailable(ChaosCycleError):
    """Raised when an LLM backend cannot be reached or answers garbage."""


class ReplayEntryMissing(BackendUnavailable):
    """Raised when a replay transcript has no entry for a call."""


class PolicyRejected(ChaosCycleError):
    def __init__(self, reason: str) -> None:
        self.reason = reason
        super().__init__(f"Instructions rejected by policy: {reason}")


class OutputViolation(ChaosCycleError):
    """Raised by mechanical checks on a parsed agent output; triggers a retry.

    ``exhausted`` names the error raised once retries run out, overriding the
    caller's default.
    """

    def __init__(self, message: str, exhausted: type[AgentOutputExhausted] | None = None) -> None:
        self.exhausted = exhausted
        super().__init__(message)


class AgentOutputExhausted(ChaosCycleError):
    """Raised when an agent keeps producing unusable output after every retry."""

    def __init__(self, message: str, last_output: Any = None) -> None:
        self.last_output = last_output
        super().__init__(message)


class SchemaViolationExhausted(AgentOutputExhausted):
    pass


class DuplicateStateExhausted(AgentOutputExhausted):
    pass


class ThresholdInconsistent(AgentOutputExhausted):
    pass


class SelectorUnresolvableExhausted(AgentOutputExhausted):
    pass


class PlanInvalidExhausted(AgentOutputExhausted):
    pass


class ReconfigInvalidExhausted(AgentOutputExhausted):
    pass


class SummaryIncompleteExhausted(AgentOutputExhausted):
    pass


class IntentChanged(ChaosCycleError):
    """Raised when a replanned experiment changes more than targets and selectors."""


class RepeatedReconfiguration(AgentOutputExhausted):
    """Raised when a reconfiguration repeats one already tried in this cycle."""


# Cluster
# ------------------------------------------------------------------------------


class ClusterError(ChaosCycleError):
    """Raised by cluster backends."""


class DeployFailed(ClusterError):
    pass


class SelectorMatchesNothing(ClusterError):
    def __init__(self, selector: str) -> None:
        self.selector = selector
        super().__init__(f"Selector {selector} matches no pod")


class UnknownService(ClusterError):
    def __init__(self, url: str) -> None:
        self.url = url
        super().__init__(f"No service registered for {url}")


class WorkflowUnsound(ChaosCycleError):
    """Raised when a workflow manifest has dangling references or cycles."""
