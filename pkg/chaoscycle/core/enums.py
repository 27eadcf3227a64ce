from __future__ import annotations

from enum import StrEnum


class ResourceKind(StrEnum):
    POD = "Pod"
    DEPLOYMENT = "Deployment"
    SERVICE = "Service"
    OTHER = "Other"


class RestartPolicy(StrEnum):
    ALWAYS = "Always"
    ON_FAILURE = "OnFailure"
    NEVER = "Never"


class ProbeTool(StrEnum):
    CLUSTER_API = "ClusterApi"
    HTTP_LOAD = "HttpLoad"


class Quantity(StrEnum):
    POD_COUNT = "PodCount"
    READY_REPLICA_COUNT = "ReadyReplicaCount"
    SUCCESS_RATE = "SuccessRate"
    LATENCY_P95_MS = "LatencyP95Ms"

    @property
    def tool(self) -> ProbeTool:
        if self in (Quantity.POD_COUNT, Quantity.READY_REPLICA_COUNT):
            return ProbeTool.CLUSTER_API
        return ProbeTool.HTTP_LOAD

    @property
    def unit(self) -> Unit:
        if self == Quantity.SUCCESS_RATE:
            return Unit.RATIO
        if self == Quantity.LATENCY_P95_MS:
            return Unit.MILLISECONDS
        return Unit.COUNT

    @property
    def higher_is_better(self) -> bool:
        return self != Quantity.LATENCY_P95_MS

    @property
    def label(self) -> str:
        return {
            Quantity.POD_COUNT: "current pod count",
            Quantity.READY_REPLICA_COUNT: "current ready replicas",
            Quantity.SUCCESS_RATE: "success rate",
            Quantity.LATENCY_P95_MS: "p95 latency (ms)",
        }[self]


class Unit(StrEnum):
    COUNT = "count"
    RATIO = "ratio"
    MILLISECONDS = "ms"


class Comparator(StrEnum):
    EQ = "EQ"
    GE = "GE"
    LE = "LE"
    LT = "LT"
    GT = "GT"

    def holds(self, value: float, bound: float) -> bool:
        match self:
            case Comparator.EQ:
                return value == bound
            case Comparator.GE:
                return value >= bound
            case Comparator.LE:
                return value <= bound
            case Comparator.LT:
                return value < bound
            case Comparator.GT:
                return value > bound

    @property
    def symbol(self) -> str:
        return {"EQ": "==", "GE": ">=", "LE": "<=", "LT": "<", "GT": ">"}[self.value]


class Aggregation(StrEnum):
    EVERY_SAMPLE = "EverySample"
    FINAL_SAMPLE = "FinalSample"
    P95 = "P95"


class FaultKind(StrEnum):
    POD_CHAOS = "PodChaos"
    NETWORK_CHAOS = "NetworkChaos"
    STRESS_CHAOS = "StressChaos"


class FaultSubtype(StrEnum):
    POD_KILL = "pod-kill"
    POD_FAILURE = "pod-failure"
    DELAY = "delay"
    LOSS = "loss"
    CPU = "cpu"


FAULT_SUBTYPES: dict[FaultKind, tuple[FaultSubtype, ...]] = {
    FaultKind.POD_CHAOS: (FaultSubtype.POD_KILL, FaultSubtype.POD_FAILURE),
    FaultKind.NETWORK_CHAOS: (FaultSubtype.DELAY, FaultSubtype.LOSS),
    FaultKind.STRESS_CHAOS: (FaultSubtype.CPU,),
}


class SelectorMode(StrEnum):
    ONE = "One"
    ALL = "All"
    FIXED_COUNT = "FixedCount"


class Stage(StrEnum):
    PRE = "Pre"
    FAULT = "Fault"
    POST = "Post"

    @property
    def slug(self) -> str:
        return {"Pre": "pre", "Fault": "fault", "Post": "post"}[self.value]


class TaskType(StrEnum):
    RUN_VAC = "RunVaC"
    INJECT_FAULT = "InjectFault"


class Phase(StrEnum):
    PRE = "Pre"
    HYP = "Hyp"
    EXPT = "Expt"
    ANLYS = "Anlys"
    IMP = "Imp"
    POST = "Post"


class OutcomeKind(StrEnum):
    SATISFIED_NO_CHANGE = "SatisfiedNoChange"
    SATISFIED_AFTER_IMPROVEMENT = "SatisfiedAfterImprovement"
    ABORTED = "Aborted"


class ReconfigOpKind(StrEnum):
    REPLACE = "Replace"
    CREATE = "Create"
    DELETE = "Delete"


class TemplateType(StrEnum):
    SERIAL = "Serial"
    PARALLEL = "Parallel"
    SUSPEND = "Suspend"
    POD_CHAOS = "PodChaos"
    NETWORK_CHAOS = "NetworkChaos"
    STRESS_CHAOS = "StressChaos"
    TASK = "Task"


class AgentRole(StrEnum):
    CONTEXT_SUMMARIZER = "ContextSummarizer"
    ISSUE_SPOTTER = "IssueSpotter"
    APP_GUESSER = "AppGuesser"
    POLICY_FILTER = "PolicyFilter"
    STATE_DRAFTER = "StateDrafter"
    PROBE_WRITER = "ProbeWriter"
    THRESHOLD_SETTER = "ThresholdSetter"
    VAC_BUILDER = "VaCBuilder"
    SUFFICIENCY_JUDGE = "SufficiencyJudge"
    SCENARIO_DRAFTER = "ScenarioDrafter"
    FAULT_REFINER = "FaultRefiner"
    STAGE_PLANNER = "StagePlanner"
    ITEM_SCHEDULER = "ItemScheduler"
    TIMELINE_WRITER = "TimelineWriter"
    REPLANNER = "Replanner"
    FAILURE_ANALYST = "FailureAnalyst"
    RECONFIGURER = "Reconfigurer"
    SUMMARIZER = "Summarizer"
