"""HPA-style horizontal scaling of layer services.

The reconcile loop runs every sync_period per layer: the proportional rule
scales on windowed busy-time utilization, a latency trigger adds one replica
when the p95 per-layer batch latency exceeds its threshold, and predictive
mode raises the target to the forecast load divided by per-replica capacity.
Scale-out is immediate (replicas start in Starting and count toward desired);
scale-in is held for scale_down_stabilization seconds after any scale-out
recommendation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import InvalidCapacity, InvalidTarget

REACTIVE = "reactive"
PREDICTIVE = "predictive"

EWMA = "ewma"
WINDOW_MEAN = "window_mean"


@dataclass(frozen=True)
class AutoscalerConfig:
    enabled: bool = False
    sync_period: float = 15.0
    target_utilization: float = 0.6
    latency_threshold: Optional[float] = None   # p95 per-layer batch latency, seconds
    min_replicas: int = 1
    max_replicas: int = 8
    scale_down_stabilization: float = 300.0
    mode: str = REACTIVE
    per_replica_capacity: Optional[float] = None    # req/s, predictive mode
    forecaster: str = EWMA
    ewma_alpha: float = 0.3
    window_k: int = 10


def desired_replicas(
    current: int,
    current_metric: float,
    target_metric: float,
    min_replicas: int,
    max_replicas: int,
) -> int:
    """Standard proportional rule: ceil(current * metric / target), clamped."""
    if not target_metric > 0:
        raise InvalidTarget(f"target metric must be > 0, got {target_metric}")
    desired = math.ceil(current * current_metric / target_metric)
    return max(min_replicas, min(max_replicas, desired))


def latency_trigger(p95_layer_latency: Optional[float], threshold: float) -> bool:
    """Scale out by one iff the windowed p95 strictly exceeds the threshold.

    An empty window (p95 is None) never triggers.
    """
    if not threshold > 0:
        raise ValueError(f"latency threshold must be > 0, got {threshold}")
    return p95_layer_latency is not None and p95_layer_latency > threshold


def predictive_target(
    forecast_load: float,
    per_replica_capacity: float,
    min_replicas: int,
    max_replicas: int,
) -> int:
    if not per_replica_capacity > 0:
        raise InvalidCapacity(f"per-replica capacity must be > 0, got {per_replica_capacity}")
    desired = math.ceil(forecast_load / per_replica_capacity)
    return max(min_replicas, min(max_replicas, desired))


@dataclass(frozen=True)
class LayerMetricsView:
    """What one reconcile sees for one layer."""

    current: int                        # Ready + Starting replicas
    utilization: float                  # mean windowed busy fraction, Starting counted at 0
    p95_latency: Optional[float]        # None when the window has no batches
    forecast_load: Optional[float] = None   # req/s, None when no series yet


@dataclass(frozen=True)
class ScaleDecisionRecord:
    layer_id: int
    time: float
    current: int
    desired: int
    utilization: float
    p95_latency: Optional[float]
    latency_triggered: bool
    predictive_target: Optional[int]
    spawn: int          # replicas to start now
    retire: int         # replicas to drain now
    held_by_stabilization: bool


class Autoscaler:
    """Tracks per-layer scale-out recommendations for the stabilization hold."""

    def __init__(self, config: AutoscalerConfig):
        self.config = config
        self._last_scale_out_rec: dict[int, float] = {}

    def reconcile(self, layer_id: int, view: LayerMetricsView, now: float) -> ScaleDecisionRecord:
        cfg = self.config
        desired = desired_replicas(
            view.current, view.utilization, cfg.target_utilization,
            cfg.min_replicas, cfg.max_replicas,
        )
        unclamped = math.ceil(view.current * view.utilization / cfg.target_utilization)

        triggered = False
        if cfg.latency_threshold is not None:
            triggered = latency_trigger(view.p95_latency, cfg.latency_threshold)
            if triggered:
                desired = max(desired, min(cfg.max_replicas, view.current + 1))
                unclamped = max(unclamped, view.current + 1)

        ptarget: Optional[int] = None
        if cfg.mode == PREDICTIVE and view.forecast_load is not None:
            capacity = cfg.per_replica_capacity
            ptarget = predictive_target(
                view.forecast_load, capacity, cfg.min_replicas, cfg.max_replicas
            )
            desired = max(desired, ptarget)
            unclamped = max(unclamped, math.ceil(view.forecast_load / capacity))

        if unclamped > view.current:
            self._last_scale_out_rec[layer_id] = now

        spawn = retire = 0
        held = False
        if desired > view.current:
            spawn = desired - view.current
        elif desired < view.current:
            last_rec = self._last_scale_out_rec.get(layer_id)
            if last_rec is not None and now - last_rec < cfg.scale_down_stabilization:
                held = True
            else:
                retire = view.current - desired

        return ScaleDecisionRecord(
            layer_id=layer_id,
            time=now,
            current=view.current,
            desired=desired,
            utilization=view.utilization,
            p95_latency=view.p95_latency,
            latency_triggered=triggered,
            predictive_target=ptarget,
            spawn=spawn,
            retire=retire,
            held_by_stabilization=held,
        )
