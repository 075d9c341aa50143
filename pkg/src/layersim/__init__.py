"""layersim: discrete-event simulation of LLM inference serving where each
Transformer layer runs as an independently scaled microservice."""

__version__ = "0.1.0"

from .autoscaler import AutoscalerConfig, desired_replicas, latency_trigger, predictive_target
from .balancer import Balancer, BalancerPolicy
from .cluster import Cluster, LayerReplica, NodeSpec, ReplicaState
from .config import ScenarioConfig, load_scenario, parse_scenario, scenario_to_dict, validate_scenario
from .core import (
    Clock,
    Deterministic,
    Event,
    EventKind,
    Exponential,
    RandomStream,
    SimCore,
    UniformInt,
)
from .engine import Engine, RunResult
from .migration import MigrationConfig, select_migrations
from .pipeline import (
    Batch,
    BatchingPolicy,
    CostParams,
    ModelSpec,
    Phase,
    Request,
    advance_request,
    decode_step_time,
    form_batch,
    prefill_time,
)
from .predictor import LoadSeries, ewma_forecast, forecast_error, window_mean_forecast
from .profiler import (
    BottleneckReport,
    Profiler,
    RequestRecord,
    bottleneck_report,
    comparison_summary,
    percentile,
    skewness,
)
from .workload import (
    Arrival,
    ClosedLoopArrivals,
    Empirical,
    PoissonArrivals,
    RatePhase,
    TraceArrivals,
    WorkloadSpec,
    gen_requests,
    replay_trace,
)
