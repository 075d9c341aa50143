"""Metrics pipeline: fixed-cadence sampling, latency statistics, bottleneck
identification, and baseline-vs-treatment comparison.

Per-layer inference latency is a batch's dispatch-to-complete time measured
from the earliest member enqueue, so queue wait at the replica is included;
pure service time is recorded alongside. Percentiles use the nearest-rank
method and skewness uses population moments (n denominators).
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional

from .errors import (
    DegenerateSample,
    EmptySamples,
    MismatchedScenarios,
    MissingLayerData,
)
from .pipeline import Request


def percentile(samples: list[float], p: float) -> float:
    """Nearest-rank percentile: sorted ascending, element at 1-based ceil(p*n)."""
    if not samples:
        raise EmptySamples("percentile of an empty sample set")
    if not 0 < p <= 1:
        raise ValueError(f"p must be in (0, 1], got {p}")
    ordered = sorted(samples)
    rank = math.ceil(p * len(ordered))
    return ordered[rank - 1]


def skewness(samples: list[float]) -> float:
    """Population-moment skewness g1 = m3 / m2^(3/2)."""
    n = len(samples)
    if n < 3:
        raise DegenerateSample(f"skewness needs >= 3 samples, got {n}")
    mean = math.fsum(samples) / n
    m2 = math.fsum((x - mean) ** 2 for x in samples) / n
    if m2 == 0:
        raise DegenerateSample("skewness undefined for zero variance")
    m3 = math.fsum((x - mean) ** 3 for x in samples) / n
    return m3 / m2**1.5


@dataclass(frozen=True)
class MetricsSample:
    time: float
    utilization: dict[str, float]       # replica_id -> busy fraction in window
    queue_len: dict[str, int]
    arrivals: int                       # external arrivals in window
    completions: int


@dataclass(frozen=True)
class RequestRecord:
    request_id: int
    arrival_time: float
    ttft: float
    e2e_latency: float
    mean_tpot: float
    input_len: int
    output_len: int
    per_layer_max: tuple[float, ...]


@dataclass(frozen=True)
class LayerStats:
    layer_id: int
    max_latency: float
    p50: float
    p95: float
    skew: Optional[float]       # None when degenerate (few/constant samples)
    max_service: float
    samples: int
    ratio_to_min: float


@dataclass(frozen=True)
class BottleneckReport:
    layers: tuple[LayerStats, ...]      # indexed by layer_id
    ranking: tuple[int, ...]            # layer ids by max latency desc, ties by id

    @property
    def bottleneck_layer(self) -> int:
        return self.ranking[0]

    def ratio(self, layer_a: int, layer_b: int) -> float:
        return self.layers[layer_a].max_latency / self.layers[layer_b].max_latency

    def to_dict(self) -> dict:
        return {
            "statistics": {
                "latency": "batch dispatch-to-complete including queue wait",
                "percentile": "nearest-rank",
                "skewness": "population moments",
            },
            "bottleneck_layer": self.bottleneck_layer,
            "ranking": list(self.ranking),
            "layers": [
                {
                    "layer_id": s.layer_id,
                    "max_latency_s": s.max_latency,
                    "p50_s": s.p50,
                    "p95_s": s.p95,
                    "skewness": s.skew,
                    "max_service_s": s.max_service,
                    "samples": s.samples,
                    "ratio_to_min": s.ratio_to_min,
                }
                for s in self.layers
            ],
        }


def bottleneck_report(latency_by_layer: dict[int, list[float]],
                      service_by_layer: Optional[dict[int, list[float]]] = None,
                      num_layers: Optional[int] = None) -> BottleneckReport:
    """Rank layers by maximum observed batch latency.

    Every layer in [0, num_layers) must have at least one sample; the ratio
    field for layer l is max(l) / min over layers of max.
    """
    layers = num_layers if num_layers is not None else (max(latency_by_layer) + 1 if latency_by_layer else 0)
    if layers == 0:
        raise MissingLayerData("no layers to report on")
    stats = []
    for layer_id in range(layers):
        samples = latency_by_layer.get(layer_id)
        if not samples:
            raise MissingLayerData(f"layer {layer_id} has no batch-latency samples")
        try:
            skew = skewness(samples)
        except DegenerateSample:
            skew = None
        services = (service_by_layer or {}).get(layer_id, [])
        stats.append({
            "layer_id": layer_id,
            "max": max(samples),
            "p50": percentile(samples, 0.5),
            "p95": percentile(samples, 0.95),
            "skew": skew,
            "max_service": max(services) if services else 0.0,
            "n": len(samples),
        })
    floor = min(s["max"] for s in stats)
    ranking = tuple(s["layer_id"] for s in sorted(stats, key=lambda s: (-s["max"], s["layer_id"])))
    layer_stats = tuple(
        LayerStats(
            layer_id=s["layer_id"],
            max_latency=s["max"],
            p50=s["p50"],
            p95=s["p95"],
            skew=s["skew"],
            max_service=s["max_service"],
            samples=s["n"],
            ratio_to_min=(s["max"] / floor) if floor > 0 else math.inf,
        )
        for s in stats
    )
    return BottleneckReport(layers=layer_stats, ranking=ranking)


@dataclass(frozen=True)
class RunStats:
    """Per-run summary used by comparisons."""

    workload_hash: str
    duration: float
    completed: int
    mean_e2e: Optional[float]
    p95_e2e: Optional[float]
    throughput: float


def run_stats(records: list[RequestRecord], duration: float, workload_hash: str) -> RunStats:
    lats = [r.e2e_latency for r in records]
    return RunStats(
        workload_hash=workload_hash,
        duration=duration,
        completed=len(records),
        mean_e2e=(math.fsum(lats) / len(lats)) if lats else None,
        p95_e2e=percentile(lats, 0.95) if lats else None,
        throughput=len(records) / duration,
    )


def comparison_summary(baseline: RunStats, treatment: RunStats) -> dict:
    """Latency/throughput comparison of two runs of the same workload+seed."""
    if baseline.workload_hash != treatment.workload_hash:
        raise MismatchedScenarios(
            f"workload hash mismatch: {baseline.workload_hash} vs {treatment.workload_hash}"
        )
    if baseline.completed == 0 or treatment.completed == 0:
        raise MismatchedScenarios("cannot compare runs with zero completed requests")

    def arm(stats: RunStats) -> dict:
        return {
            "completed": stats.completed,
            "mean_e2e_s": stats.mean_e2e,
            "p95_e2e_s": stats.p95_e2e,
            "throughput_qps": stats.throughput,
        }

    return {
        "workload_hash": baseline.workload_hash,
        "baseline": arm(baseline),
        "treatment": arm(treatment),
        "ratios": {
            "mean_e2e": treatment.mean_e2e / baseline.mean_e2e,
            "p95_e2e": treatment.p95_e2e / baseline.p95_e2e,
            "throughput": treatment.throughput / baseline.throughput,
        },
    }


class Profiler:
    """Collects observations during a run; report generation is a pure
    post-run pass over the collected logs."""

    def __init__(self, num_layers: int, metrics_interval: float = 0.1,
                 load_bucket: float = 1.0):
        self.num_layers = num_layers
        self.metrics_interval = metrics_interval
        self.load_bucket = load_bucket
        self.records: list[RequestRecord] = []
        self.samples: list[MetricsSample] = []
        self.timeseries_rows: list[tuple[float, int, str, float, int]] = []
        self.decision_rows: list[tuple[float, str, int, str]] = []
        self._batch_times: dict[int, list[float]] = {i: [] for i in range(num_layers)}
        self._batch_lats: dict[int, list[float]] = {i: [] for i in range(num_layers)}
        self._batch_services: dict[int, list[float]] = {i: [] for i in range(num_layers)}
        self.member_passes: dict[int, int] = {i: 0 for i in range(num_layers)}
        self._arrival_buckets: dict[int, int] = {}
        self._window_arrivals = 0
        self._window_completions = 0
        self._last_tick = 0.0

    # collection hooks

    def record_arrival(self, now: float) -> None:
        self._window_arrivals += 1
        bucket = int(now / self.load_bucket)
        self._arrival_buckets[bucket] = self._arrival_buckets.get(bucket, 0) + 1

    def record_batch(self, layer_id: int, latency: float, service: float,
                     n_members: int, now: float) -> None:
        self._batch_times[layer_id].append(now)
        self._batch_lats[layer_id].append(latency)
        self._batch_services[layer_id].append(service)
        self.member_passes[layer_id] += n_members

    def record_done(self, req: Request) -> None:
        self._window_completions += 1
        self.records.append(RequestRecord(
            request_id=req.request_id,
            arrival_time=req.arrival_time,
            ttft=req.ttft,
            e2e_latency=req.finish_time - req.arrival_time,
            mean_tpot=req.mean_tpot(),
            input_len=req.input_len,
            output_len=req.output_len,
            per_layer_max=tuple(req.per_layer_max),
        ))

    def record_decision(self, now: float, kind: str, layer_id: int, detail: str) -> None:
        self.decision_rows.append((now, kind, layer_id, detail))

    def sample(self, now: float, replicas) -> MetricsSample:
        """Take one fixed-cadence MetricsSample over [last_tick, now]."""
        window = now - self._last_tick
        utilization = {}
        queue_len = {}
        for r in replicas:
            utilization[r.replica_id] = r.busy_time_in(self._last_tick, now) / window if window > 0 else 0.0
            queue_len[r.replica_id] = len(r.queue)
            self.timeseries_rows.append(
                (now, r.layer_id, r.replica_id, utilization[r.replica_id], queue_len[r.replica_id])
            )
        s = MetricsSample(
            time=now,
            utilization=utilization,
            queue_len=queue_len,
            arrivals=self._window_arrivals,
            completions=self._window_completions,
        )
        self.samples.append(s)
        self._window_arrivals = 0
        self._window_completions = 0
        self._last_tick = now
        return s

    # windowed views

    def layer_p95_since(self, layer_id: int, t0: float) -> Optional[float]:
        times = self._batch_times[layer_id]
        idx = bisect_left(times, t0)
        window = self._batch_lats[layer_id][idx:]
        if not window:
            return None
        return percentile(window, 0.95)

    def load_series(self, now: float) -> "LoadSeries":
        from .predictor import LoadSeries

        last_complete = int(now / self.load_bucket)   # bucket `last_complete` still open
        samples = tuple(
            ((b + 1) * self.load_bucket, self._arrival_buckets.get(b, 0) / self.load_bucket)
            for b in range(last_complete)
        )
        return LoadSeries(samples)

    # post-run reports

    def build_bottleneck(self) -> BottleneckReport:
        return bottleneck_report(self._batch_lats, self._batch_services, self.num_layers)
