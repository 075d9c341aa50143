"""Exception types raised across the simulator.

Everything derives from SimError so callers can catch simulator failures
without masking ordinary programming errors.
"""


class SimError(Exception):
    """Base class for all simulator errors."""


# event engine

class SchedulingInPast(SimError):
    """An event was scheduled before the current simulation clock."""


class InvalidDistributionParams(SimError):
    """Distribution parameters fail validation (rate <= 0, lo > hi, ...)."""


# cluster

class UnknownNode(SimError):
    """A node id does not exist in the cluster."""


class UnknownLayer(SimError):
    """A layer id is outside the model's layer range."""


class InsufficientNodeMemory(SimError):
    """A node cannot host another replica within its memory capacity."""


class LastReplicaOfLayer(SimError):
    """Retirement would leave a layer below its minimum Ready replicas."""


# layer pipeline

class PhaseMismatch(SimError):
    """A cost function was called with a batch in the wrong phase."""


class InconsistentPipelineState(SimError):
    """A request was advanced from a layer it was not actually at."""


# workload

class InvalidSpec(SimError):
    """A workload specification fails validation."""


class MalformedTrace(SimError):
    """A trace file row cannot be parsed."""


class NonMonotonicTimestamps(SimError):
    """Trace arrival times decrease."""


# balancer

class NoReadyReplica(SimError):
    """No Ready replica exists for the requested layer."""


# autoscaler

class InvalidTarget(SimError):
    """The scaling target metric is not positive."""


class InvalidCapacity(SimError):
    """The per-replica capacity is not positive."""


# predictor

class EmptySeries(SimError):
    """A forecast was requested on an empty load series."""


class SeriesTooShort(SimError):
    """The load series is too short for the requested evaluation."""


# profiler

class EmptySamples(SimError):
    """A statistic was requested on an empty sample set."""


class DegenerateSample(SimError):
    """Skewness is undefined: fewer than 3 samples or zero variance."""


class MissingLayerData(SimError):
    """A layer has no batch-latency samples for the bottleneck report."""


class MismatchedScenarios(SimError):
    """Comparison requested between runs of different workloads."""


# config / cli

class ConfigParseError(SimError):
    """A scenario file is structurally invalid (missing/ill-typed fields)."""


class ValidationError(SimError):
    """A scenario config is semantically invalid."""


class IncompleteRunDir(SimError):
    """A run directory is missing required output files."""
