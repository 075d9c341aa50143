"""Scenario configuration: parsing, validation, and canonical serialization.

A scenario is one JSON document. Parsing is strict (unknown or missing
fields name themselves in the error); validation closes the config (every
referenced node and layer exists, module invariants hold) before a run.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

from .autoscaler import EWMA, PREDICTIVE, REACTIVE, WINDOW_MEAN, AutoscalerConfig
from .balancer import POLICY_KINDS, BalancerPolicy
from .cluster import NodeSpec
from .core import Deterministic, UniformInt
from .errors import ConfigParseError, ValidationError
from .migration import MigrationConfig
from .pipeline import BatchingPolicy, CostParams, ModelSpec
from .workload import (
    ClosedLoopArrivals,
    Empirical,
    PoissonArrivals,
    RatePhase,
    TraceArrivals,
    WorkloadSpec,
    load_empirical,
)


@dataclass(frozen=True)
class PlacementSpec:
    """Initial replica layout. round_robin places layer i on node i mod N."""

    strategy: str = "round_robin"
    replicas_per_layer: int = 1
    layers: Optional[dict[int, tuple[str, ...]]] = None  # explicit strategy

    def layout(self, node_ids: list[str], num_layers: int) -> dict[int, tuple[str, ...]]:
        if self.strategy == "explicit":
            return {i: tuple(self.layers.get(i, ())) for i in range(num_layers)}
        return {
            i: tuple(node_ids[i % len(node_ids)] for _ in range(self.replicas_per_layer))
            for i in range(num_layers)
        }


@dataclass(frozen=True)
class ScenarioConfig:
    cluster: tuple[NodeSpec, ...]
    model: ModelSpec
    workload: WorkloadSpec
    seed: int
    duration: float
    placement: PlacementSpec = PlacementSpec()
    balancer: BalancerPolicy = BalancerPolicy()
    autoscaler: AutoscalerConfig = AutoscalerConfig()
    migration: MigrationConfig = MigrationConfig()
    batching: BatchingPolicy = BatchingPolicy(max_size=8, max_wait=0.01)
    metrics_interval: float = 0.1
    startup_delay: float = 30.0
    outputs: str = "runs/out"
    description: str = ""
    notes: tuple[str, ...] = ()


# parsing helpers

_MISSING = object()


def _get(obj: dict, key: str, ctx: str, expected: type | tuple, default: Any = _MISSING) -> Any:
    if key not in obj:
        if default is _MISSING:
            raise ConfigParseError(f"{ctx}: missing required field {key!r}")
        return default
    value = obj[key]
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, expected) or isinstance(value, bool) and expected is not bool:
        raise ConfigParseError(
            f"{ctx}.{key}: expected {getattr(expected, '__name__', expected)}, got {type(value).__name__}"
        )
    return value


def _check_keys(obj: dict, allowed: set[str], ctx: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigParseError(f"{ctx}: unknown field(s) {sorted(unknown)}")


def _parse_cost(obj: dict, ctx: str, base: Optional[CostParams] = None) -> CostParams:
    _check_keys(obj, {"alpha", "beta", "gamma", "delta", "mu", "memory_footprint"}, ctx)
    base = base or CostParams()
    kwargs = {}
    for name in ("alpha", "beta", "gamma", "delta", "mu", "memory_footprint"):
        kwargs[name] = _get(obj, name, ctx, float, getattr(base, name))
    return CostParams(**kwargs)


def _parse_model(obj: dict, ctx: str = "model") -> ModelSpec:
    _check_keys(obj, {"num_layers", "hidden_dim", "default_cost", "layer_overrides", "layer_costs"}, ctx)
    num_layers = _get(obj, "num_layers", ctx, int, 40)
    hidden_dim = _get(obj, "hidden_dim", ctx, int)
    if "layer_costs" in obj:
        raw = _get(obj, "layer_costs", ctx, list)
        costs = tuple(_parse_cost(c, f"{ctx}.layer_costs[{i}]") for i, c in enumerate(raw))
    else:
        default = _parse_cost(_get(obj, "default_cost", ctx, dict), f"{ctx}.default_cost")
        overrides = _get(obj, "layer_overrides", ctx, dict, {})
        cost_list = [default] * num_layers
        for key, ov in overrides.items():
            try:
                layer_id = int(key)
            except ValueError:
                raise ConfigParseError(f"{ctx}.layer_overrides: non-integer layer id {key!r}") from None
            if not 0 <= layer_id < num_layers:
                raise ConfigParseError(f"{ctx}.layer_overrides: layer {layer_id} out of range")
            cost_list[layer_id] = _parse_cost(ov, f"{ctx}.layer_overrides.{key}", default)
        costs = tuple(cost_list)
    return ModelSpec(num_layers=num_layers, hidden_dim=hidden_dim, layer_costs=costs)


def _parse_dist(obj: dict, ctx: str, base_dir: Optional[Path]):
    kind = _get(obj, "kind", ctx, str)
    if kind == "uniform_int":
        _check_keys(obj, {"kind", "lo", "hi"}, ctx)
        return UniformInt(_get(obj, "lo", ctx, int), _get(obj, "hi", ctx, int))
    if kind == "deterministic":
        _check_keys(obj, {"kind", "value"}, ctx)
        return Deterministic(_get(obj, "value", ctx, int))
    if kind == "empirical":
        _check_keys(obj, {"kind", "file", "values"}, ctx)
        if "values" in obj:
            values = _get(obj, "values", ctx, list)
            if not values or not all(isinstance(v, int) for v in values):
                raise ConfigParseError(f"{ctx}.values: expected a non-empty list of integers")
            return Empirical(tuple(values))
        path = Path(_get(obj, "file", ctx, str))
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_empirical(path)
    raise ConfigParseError(f"{ctx}.kind: unknown distribution {kind!r}")


def _parse_workload(obj: dict, duration: float, base_dir: Optional[Path], ctx: str = "workload") -> WorkloadSpec:
    _check_keys(obj, {"arrival", "input_len_dist", "output_len_dist", "phases", "duration"}, ctx)
    arrival_obj = _get(obj, "arrival", ctx, dict)
    kind = _get(arrival_obj, "kind", f"{ctx}.arrival", str)
    if kind == "poisson":
        _check_keys(arrival_obj, {"kind", "rate"}, f"{ctx}.arrival")
        arrival = PoissonArrivals(_get(arrival_obj, "rate", f"{ctx}.arrival", float))
    elif kind == "closed_loop":
        _check_keys(arrival_obj, {"kind", "concurrency"}, f"{ctx}.arrival")
        arrival = ClosedLoopArrivals(_get(arrival_obj, "concurrency", f"{ctx}.arrival", int))
    elif kind == "trace":
        _check_keys(arrival_obj, {"kind", "file"}, f"{ctx}.arrival")
        path = Path(_get(arrival_obj, "file", f"{ctx}.arrival", str))
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        arrival = TraceArrivals(str(path))
    else:
        raise ConfigParseError(f"{ctx}.arrival.kind: unknown arrival {kind!r}")

    phases_raw = _get(obj, "phases", ctx, list, [[0.0, 1.0]])
    phases = []
    for i, row in enumerate(phases_raw):
        if not isinstance(row, list) or len(row) != 2:
            raise ConfigParseError(f"{ctx}.phases[{i}]: expected [start, multiplier]")
        phases.append(RatePhase(float(row[0]), float(row[1])))

    return WorkloadSpec(
        arrival=arrival,
        input_len_dist=_parse_dist(_get(obj, "input_len_dist", ctx, dict,
                                        {"kind": "uniform_int", "lo": 50, "hi": 2048}),
                                   f"{ctx}.input_len_dist", base_dir),
        output_len_dist=_parse_dist(_get(obj, "output_len_dist", ctx, dict,
                                         {"kind": "uniform_int", "lo": 32, "hi": 512}),
                                    f"{ctx}.output_len_dist", base_dir),
        phases=tuple(phases),
        duration=_get(obj, "duration", ctx, float, duration),
    )


def parse_scenario(doc: dict, base_dir: Optional[Path] = None) -> ScenarioConfig:
    ctx = "scenario"
    if not isinstance(doc, dict):
        raise ConfigParseError("scenario document must be a JSON object")
    _check_keys(doc, {
        "description", "notes", "seed", "duration", "metrics_interval", "startup_delay",
        "outputs", "cluster", "model", "placement", "workload", "balancer",
        "autoscaler", "migration", "batching",
    }, ctx)

    duration = _get(doc, "duration", ctx, float)

    nodes = []
    for i, node_obj in enumerate(_get(doc, "cluster", ctx, list)):
        nctx = f"cluster[{i}]"
        _check_keys(node_obj, {"node_id", "gpu_count", "gpu_memory", "compute_scale",
                               "net_latency", "net_bandwidth"}, nctx)
        nodes.append(NodeSpec(
            node_id=_get(node_obj, "node_id", nctx, str),
            gpu_count=_get(node_obj, "gpu_count", nctx, int, 1),
            gpu_memory=_get(node_obj, "gpu_memory", nctx, float, 80e9),
            compute_scale=_get(node_obj, "compute_scale", nctx, float, 1.0),
            net_latency=_get(node_obj, "net_latency", nctx, float, 0.0005),
            net_bandwidth=_get(node_obj, "net_bandwidth", nctx, float, 25e9),
        ))

    placement_obj = _get(doc, "placement", ctx, dict, {"strategy": "round_robin"})
    _check_keys(placement_obj, {"strategy", "replicas_per_layer", "layers"}, "placement")
    strategy = _get(placement_obj, "strategy", "placement", str, "round_robin")
    if strategy not in ("round_robin", "explicit"):
        raise ConfigParseError(f"placement.strategy: unknown strategy {strategy!r}")
    explicit = None
    if strategy == "explicit":
        raw_layers = _get(placement_obj, "layers", "placement", dict)
        explicit = {}
        for key, node_list in raw_layers.items():
            try:
                explicit[int(key)] = tuple(node_list)
            except (ValueError, TypeError):
                raise ConfigParseError(f"placement.layers: bad entry {key!r}") from None
    placement = PlacementSpec(
        strategy=strategy,
        replicas_per_layer=_get(placement_obj, "replicas_per_layer", "placement", int, 1),
        layers=explicit,
    )

    bal_obj = _get(doc, "balancer", ctx, dict, {})
    _check_keys(bal_obj, {"kind", "utilization_window"}, "balancer")
    balancer = BalancerPolicy(
        kind=_get(bal_obj, "kind", "balancer", str, "least_outstanding"),
        utilization_window=_get(bal_obj, "utilization_window", "balancer", float, 10.0),
    )

    auto_obj = _get(doc, "autoscaler", ctx, dict, {})
    _check_keys(auto_obj, {"enabled", "sync_period", "target_utilization", "latency_threshold",
                           "min_replicas", "max_replicas", "scale_down_stabilization",
                           "mode", "per_replica_capacity", "forecaster", "ewma_alpha",
                           "window_k"}, "autoscaler")
    latency_threshold = auto_obj.get("latency_threshold")
    if latency_threshold is not None:
        latency_threshold = _get(auto_obj, "latency_threshold", "autoscaler", float)
    capacity = auto_obj.get("per_replica_capacity")
    if capacity is not None:
        capacity = _get(auto_obj, "per_replica_capacity", "autoscaler", float)
    autoscaler = AutoscalerConfig(
        enabled=_get(auto_obj, "enabled", "autoscaler", bool, False),
        sync_period=_get(auto_obj, "sync_period", "autoscaler", float, 15.0),
        target_utilization=_get(auto_obj, "target_utilization", "autoscaler", float, 0.6),
        latency_threshold=latency_threshold,
        min_replicas=_get(auto_obj, "min_replicas", "autoscaler", int, 1),
        max_replicas=_get(auto_obj, "max_replicas", "autoscaler", int, 8),
        scale_down_stabilization=_get(auto_obj, "scale_down_stabilization", "autoscaler", float, 300.0),
        mode=_get(auto_obj, "mode", "autoscaler", str, REACTIVE),
        per_replica_capacity=capacity,
        forecaster=_get(auto_obj, "forecaster", "autoscaler", str, EWMA),
        ewma_alpha=_get(auto_obj, "ewma_alpha", "autoscaler", float, 0.3),
        window_k=_get(auto_obj, "window_k", "autoscaler", int, 10),
    )

    mig_obj = _get(doc, "migration", ctx, dict, {})
    _check_keys(mig_obj, {"enabled", "hot_threshold", "cold_threshold",
                          "migration_delay", "check_period"}, "migration")
    migration = MigrationConfig(
        enabled=_get(mig_obj, "enabled", "migration", bool, False),
        hot_threshold=_get(mig_obj, "hot_threshold", "migration", float, 0.8),
        cold_threshold=_get(mig_obj, "cold_threshold", "migration", float, 0.3),
        migration_delay=_get(mig_obj, "migration_delay", "migration", float, 0.05),
        check_period=_get(mig_obj, "check_period", "migration", float, 1.0),
    )

    batch_obj = _get(doc, "batching", ctx, dict, {})
    _check_keys(batch_obj, {"max_size", "max_wait"}, "batching")
    batching = BatchingPolicy(
        max_size=_get(batch_obj, "max_size", "batching", int, 8),
        max_wait=_get(batch_obj, "max_wait", "batching", float, 0.01),
    )

    return ScenarioConfig(
        cluster=tuple(nodes),
        model=_parse_model(_get(doc, "model", ctx, dict)),
        workload=_parse_workload(_get(doc, "workload", ctx, dict), duration, base_dir),
        seed=_get(doc, "seed", ctx, int),
        duration=duration,
        placement=placement,
        balancer=balancer,
        autoscaler=autoscaler,
        migration=migration,
        batching=batching,
        metrics_interval=_get(doc, "metrics_interval", ctx, float, 0.1),
        startup_delay=_get(doc, "startup_delay", ctx, float, 30.0),
        outputs=_get(doc, "outputs", ctx, str, "runs/out"),
        description=_get(doc, "description", ctx, str, ""),
        notes=tuple(_get(doc, "notes", ctx, list, [])),
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}: invalid JSON: {exc}") from None
    return parse_scenario(doc, base_dir=path.parent)


# serialization (canonical form; parse(serialize(cfg)) == cfg)

def _dist_to_dict(dist) -> dict:
    if isinstance(dist, UniformInt):
        return {"kind": "uniform_int", "lo": dist.lo, "hi": dist.hi}
    if isinstance(dist, Deterministic):
        return {"kind": "deterministic", "value": int(dist.value)}
    if isinstance(dist, Empirical):
        # serialized by value so the round-trip does not depend on the file
        return {"kind": "empirical", "values": list(dist.values)}
    raise TypeError(f"unknown distribution {dist!r}")


def workload_to_dict(w: WorkloadSpec) -> dict:
    if isinstance(w.arrival, PoissonArrivals):
        arrival = {"kind": "poisson", "rate": w.arrival.rate}
    elif isinstance(w.arrival, ClosedLoopArrivals):
        arrival = {"kind": "closed_loop", "concurrency": w.arrival.concurrency}
    else:
        arrival = {"kind": "trace", "file": w.arrival.file}
    return {
        "arrival": arrival,
        "input_len_dist": _dist_to_dict(w.input_len_dist),
        "output_len_dist": _dist_to_dict(w.output_len_dist),
        "phases": [[p.start, p.multiplier] for p in w.phases],
        "duration": w.duration,
    }


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    placement: dict[str, Any] = {"strategy": cfg.placement.strategy}
    if cfg.placement.strategy == "explicit":
        placement["layers"] = {str(k): list(v) for k, v in sorted(cfg.placement.layers.items())}
    else:
        placement["replicas_per_layer"] = cfg.placement.replicas_per_layer
    return {
        "description": cfg.description,
        "notes": list(cfg.notes),
        "seed": cfg.seed,
        "duration": cfg.duration,
        "metrics_interval": cfg.metrics_interval,
        "startup_delay": cfg.startup_delay,
        "outputs": cfg.outputs,
        "cluster": [
            {
                "node_id": n.node_id,
                "gpu_count": n.gpu_count,
                "gpu_memory": n.gpu_memory,
                "compute_scale": n.compute_scale,
                "net_latency": n.net_latency,
                "net_bandwidth": n.net_bandwidth,
            }
            for n in cfg.cluster
        ],
        "model": {
            "num_layers": cfg.model.num_layers,
            "hidden_dim": cfg.model.hidden_dim,
            "layer_costs": [
                {
                    "alpha": c.alpha, "beta": c.beta, "gamma": c.gamma,
                    "delta": c.delta, "mu": c.mu, "memory_footprint": c.memory_footprint,
                }
                for c in cfg.model.layer_costs
            ],
        },
        "placement": placement,
        "workload": workload_to_dict(cfg.workload),
        "balancer": {
            "kind": cfg.balancer.kind,
            "utilization_window": cfg.balancer.utilization_window,
        },
        "autoscaler": {
            "enabled": cfg.autoscaler.enabled,
            "sync_period": cfg.autoscaler.sync_period,
            "target_utilization": cfg.autoscaler.target_utilization,
            "latency_threshold": cfg.autoscaler.latency_threshold,
            "min_replicas": cfg.autoscaler.min_replicas,
            "max_replicas": cfg.autoscaler.max_replicas,
            "scale_down_stabilization": cfg.autoscaler.scale_down_stabilization,
            "mode": cfg.autoscaler.mode,
            "per_replica_capacity": cfg.autoscaler.per_replica_capacity,
            "forecaster": cfg.autoscaler.forecaster,
            "ewma_alpha": cfg.autoscaler.ewma_alpha,
            "window_k": cfg.autoscaler.window_k,
        },
        "migration": {
            "enabled": cfg.migration.enabled,
            "hot_threshold": cfg.migration.hot_threshold,
            "cold_threshold": cfg.migration.cold_threshold,
            "migration_delay": cfg.migration.migration_delay,
            "check_period": cfg.migration.check_period,
        },
        "batching": {
            "max_size": cfg.batching.max_size,
            "max_wait": cfg.batching.max_wait,
        },
    }


def config_hash(cfg: ScenarioConfig) -> str:
    canon = json.dumps(scenario_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def workload_hash(cfg: ScenarioConfig) -> str:
    canon = json.dumps({"workload": workload_to_dict(cfg.workload), "seed": cfg.seed},
                       sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# validation

def validate_scenario(cfg: ScenarioConfig) -> None:
    if not cfg.cluster:
        raise ValidationError("cluster: at least one node is required")
    seen = set()
    for n in cfg.cluster:
        if n.node_id in seen:
            raise ValidationError(f"cluster: duplicate node_id {n.node_id!r}")
        seen.add(n.node_id)
        if n.gpu_count < 1:
            raise ValidationError(f"cluster.{n.node_id}.gpu_count: must be >= 1")
        if not n.gpu_memory > 0:
            raise ValidationError(f"cluster.{n.node_id}.gpu_memory: must be > 0")
        if not n.compute_scale > 0:
            raise ValidationError(f"cluster.{n.node_id}.compute_scale: must be > 0")
        if not n.net_bandwidth > 0:
            raise ValidationError(f"cluster.{n.node_id}.net_bandwidth: must be > 0")
        if n.net_latency < 0:
            raise ValidationError(f"cluster.{n.node_id}.net_latency: must be >= 0")

    model = cfg.model
    if model.num_layers < 1:
        raise ValidationError("model.num_layers: must be >= 1")
    if model.hidden_dim < 1:
        raise ValidationError("model.hidden_dim: must be >= 1")
    if len(model.layer_costs) != model.num_layers:
        raise ValidationError(
            f"model.layer_costs: {len(model.layer_costs)} entries for {model.num_layers} layers"
        )
    for i, c in enumerate(model.layer_costs):
        for name in ("alpha", "beta", "gamma", "delta", "mu", "memory_footprint"):
            if getattr(c, name) < 0:
                raise ValidationError(f"model.layer_costs[{i}].{name}: must be >= 0")
        if c.beta == 0 and c.delta == 0:
            raise ValidationError(f"model.layer_costs[{i}]: at least one of beta, delta must be > 0")

    if cfg.duration <= 0:
        raise ValidationError("duration: must be > 0")
    if cfg.metrics_interval <= 0:
        raise ValidationError("metrics_interval: must be > 0")
    if cfg.startup_delay < 0:
        raise ValidationError("startup_delay: must be >= 0")

    try:
        cfg.workload.validate()
    except Exception as exc:
        raise ValidationError(f"workload: {exc}") from None
    if cfg.workload.duration > cfg.duration:
        raise ValidationError("workload.duration: exceeds scenario duration")

    node_ids = [n.node_id for n in cfg.cluster]
    layout = cfg.placement.layout(node_ids, model.num_layers)
    if cfg.placement.strategy == "round_robin" and cfg.placement.replicas_per_layer < 1:
        raise ValidationError("placement.replicas_per_layer: must be >= 1")
    if cfg.placement.strategy == "explicit":
        for layer_id in cfg.placement.layers:
            if not 0 <= layer_id < model.num_layers:
                raise ValidationError(
                    f"placement: layer {layer_id} outside [0, {model.num_layers})"
                )
    resident = {nid: 0.0 for nid in node_ids}
    for layer_id in range(model.num_layers):
        nodes_for_layer = layout.get(layer_id, ())
        if not nodes_for_layer:
            raise ValidationError(f"placement: layer {layer_id} has no initial replica")
        for nid in nodes_for_layer:
            if nid not in resident:
                raise ValidationError(f"placement: layer {layer_id} references unknown node {nid!r}")
            resident[nid] += model.layer_costs[layer_id].memory_footprint
    for n in cfg.cluster:
        if resident[n.node_id] > n.memory_capacity:
            raise ValidationError(
                f"placement: node {n.node_id!r} over capacity "
                f"({resident[n.node_id]:.3g} B > {n.memory_capacity:.3g} B)"
            )

    if cfg.balancer.kind not in POLICY_KINDS:
        raise ValidationError(f"balancer.kind: unknown policy {cfg.balancer.kind!r}")
    if cfg.balancer.utilization_window <= 0:
        raise ValidationError("balancer.utilization_window: must be > 0")

    a = cfg.autoscaler
    if not (1 <= a.min_replicas <= a.max_replicas):
        raise ValidationError("autoscaler: requires 1 <= min_replicas <= max_replicas")
    if not 0 < a.target_utilization <= 1:
        raise ValidationError("autoscaler.target_utilization: must be in (0, 1]")
    if a.sync_period <= 0:
        raise ValidationError("autoscaler.sync_period: must be > 0")
    if a.scale_down_stabilization < 0:
        raise ValidationError("autoscaler.scale_down_stabilization: must be >= 0")
    if a.latency_threshold is not None and a.latency_threshold <= 0:
        raise ValidationError("autoscaler.latency_threshold: must be > 0")
    if a.mode not in (REACTIVE, PREDICTIVE):
        raise ValidationError(f"autoscaler.mode: unknown mode {a.mode!r}")
    if a.mode == PREDICTIVE and (a.per_replica_capacity is None or a.per_replica_capacity <= 0):
        raise ValidationError("autoscaler.per_replica_capacity: required and > 0 in predictive mode")
    if a.forecaster not in (EWMA, WINDOW_MEAN):
        raise ValidationError(f"autoscaler.forecaster: unknown forecaster {a.forecaster!r}")
    if not 0 < a.ewma_alpha <= 1:
        raise ValidationError("autoscaler.ewma_alpha: must be in (0, 1]")
    if a.window_k < 1:
        raise ValidationError("autoscaler.window_k: must be >= 1")
    if a.enabled:
        for layer_id in range(model.num_layers):
            n_initial = len(layout.get(layer_id, ()))
            if not a.min_replicas <= n_initial <= a.max_replicas:
                raise ValidationError(
                    f"placement: layer {layer_id} starts with {n_initial} replicas, "
                    f"outside [{a.min_replicas}, {a.max_replicas}]"
                )

    m = cfg.migration
    if not 0 <= m.cold_threshold < m.hot_threshold <= 1:
        raise ValidationError("migration: requires 0 <= cold_threshold < hot_threshold <= 1")
    if m.migration_delay < 0:
        raise ValidationError("migration.migration_delay: must be >= 0")
    if m.check_period <= 0:
        raise ValidationError("migration.check_period: must be > 0")

    if cfg.batching.max_size < 1:
        raise ValidationError("batching.max_size: must be >= 1")
    if cfg.batching.max_wait < 0:
        raise ValidationError("batching.max_wait: must be >= 0")


def with_autoscaler_enabled(cfg: ScenarioConfig, enabled: bool) -> ScenarioConfig:
    return replace(cfg, autoscaler=replace(cfg.autoscaler, enabled=enabled))


def with_migration_enabled(cfg: ScenarioConfig, enabled: bool) -> ScenarioConfig:
    return replace(cfg, migration=replace(cfg.migration, enabled=enabled))
