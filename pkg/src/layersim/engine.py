"""Simulation engine: wires the event core, cluster, pipeline, balancer,
autoscaler, predictor, migration, and profiler into one run.

All mutation happens inside event callbacks on a single SimCore instance, so
a run is fully deterministic given (config, seed). Batches completing at a
layer route their members onward one by one through the balancer; deliveries
to the same replica at the same instant are coalesced into one event.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .autoscaler import Autoscaler, LayerMetricsView, PREDICTIVE, WINDOW_MEAN
from .balancer import Balancer
from .cluster import Cluster, LayerReplica, ReplicaState
from .config import ScenarioConfig, config_hash, validate_scenario, workload_hash
from .core import Event, EventKind, RandomStream, SimCore
from .errors import NoReadyReplica
from .migration import select_migrations
from .pipeline import (
    Advance,
    Batch,
    Phase,
    Request,
    advance_request,
    batch_timer_deadline,
    decode_step_time,
    form_batch,
    prefill_time,
)
from .predictor import ewma_forecast, window_mean_forecast
from .profiler import BottleneckReport, Profiler, RequestRecord, RunStats, run_stats
from .workload import ClosedLoopArrivals, draw_length, gen_requests

ServiceTimeHook = Callable[[Batch, object, float], float]


@dataclass
class RunResult:
    config: ScenarioConfig
    records: list[RequestRecord]
    timeseries_rows: list[tuple]
    decision_rows: list[tuple]
    bottleneck: Optional[BottleneckReport]
    admitted: int
    completed: int
    in_system: int
    initial_topology: dict
    final_topology: dict
    events_fired: int
    config_hash: str
    workload_hash: str
    stats: RunStats
    utilization_samples: list[float]
    event_log: Optional[list] = None


class Engine:
    """One simulation instance; construct fresh for every run."""

    def __init__(
        self,
        config: ScenarioConfig,
        service_time_hook: Optional[ServiceTimeHook] = None,
        keep_event_log: bool = False,
    ):
        validate_scenario(config)
        self.config = config
        self.model = config.model
        self.hook = service_time_hook
        self.sim = SimCore(handler=self._dispatch, keep_log=keep_event_log)

        horizon = 2 * max(
            config.metrics_interval,
            config.autoscaler.sync_period,
            config.migration.check_period,
            config.balancer.utilization_window,
        ) + 1.0
        self.cluster = Cluster(
            nodes=list(config.cluster),
            num_layers=self.model.num_layers,
            sim=self.sim,
            startup_delay=config.startup_delay,
            history_horizon=horizon,
        )
        node_ids = [n.node_id for n in config.cluster]
        for layer_id, layer_nodes in config.placement.layout(node_ids, self.model.num_layers).items():
            for node_id in layer_nodes:
                self.cluster.add_initial_replica(
                    layer_id, node_id, self.model.layer_costs[layer_id].memory_footprint
                )
        self.initial_topology = self.cluster.topology()

        self.balancer = Balancer(config.balancer)
        self.autoscaler = Autoscaler(config.autoscaler)
        self.profiler = Profiler(self.model.num_layers, config.metrics_interval)
        self.streams = {
            name: RandomStream(config.seed, name)
            for name in ("arrivals", "input_lens", "output_lens")
        }

        self.live: dict[int, Request] = {}
        self.admitted = 0
        self.completed = 0
        self._next_request_id = 0
        self._batch_seq = 0
        self._pending_by_layer: dict[int, list[Request]] = {}
        self._tick_k = 0
        self._reconcile_k = 0
        self._migration_k = 0
        self._closed_loop = isinstance(config.workload.arrival, ClosedLoopArrivals)

    # run orchestration

    def run(self) -> RunResult:
        cfg = self.config
        if self._closed_loop:
            for _ in range(cfg.workload.arrival.concurrency):
                self.sim.schedule_kind(EventKind.REQUEST_ARRIVAL, 0.0, closed_loop=True)
        else:
            for arrival in gen_requests(cfg.workload, self.streams):
                if arrival.time < cfg.duration:
                    self.sim.schedule_kind(
                        EventKind.REQUEST_ARRIVAL, arrival.time,
                        input_len=arrival.input_len, output_len=arrival.output_len,
                    )
            for phase in cfg.workload.phases[1:]:
                if phase.start < cfg.duration:
                    self.sim.schedule_kind(
                        EventKind.WORKLOAD_PHASE_CHANGE, phase.start,
                        multiplier=phase.multiplier,
                    )

        self._schedule_tick()
        if cfg.autoscaler.enabled:
            self._schedule_reconcile()
        if cfg.migration.enabled:
            self._schedule_migration_check()

        self.sim.run_until(cfg.duration)

        bottleneck = None
        if all(self.profiler._batch_lats[i] for i in range(self.model.num_layers)):
            bottleneck = self.profiler.build_bottleneck()
        whash = workload_hash(cfg)
        return RunResult(
            config=cfg,
            records=sorted(self.profiler.records, key=lambda r: r.request_id),
            timeseries_rows=self.profiler.timeseries_rows,
            decision_rows=self.profiler.decision_rows,
            bottleneck=bottleneck,
            admitted=self.admitted,
            completed=self.completed,
            in_system=len(self.live),
            initial_topology=self.initial_topology,
            final_topology=self.cluster.topology(),
            events_fired=self.sim.events_fired,
            config_hash=config_hash(cfg),
            workload_hash=whash,
            stats=run_stats(self.profiler.records, cfg.duration, whash),
            utilization_samples=[row[3] for row in self.profiler.timeseries_rows],
            event_log=self.sim.log,
        )

    def _schedule_tick(self) -> None:
        self._tick_k += 1
        t = self._tick_k * self.config.metrics_interval
        if t <= self.config.duration:
            self.sim.schedule_kind(EventKind.METRICS_TICK, t)

    def _schedule_reconcile(self) -> None:
        self._reconcile_k += 1
        t = self._reconcile_k * self.config.autoscaler.sync_period
        if t <= self.config.duration:
            self.sim.schedule_kind(EventKind.SCALE_DECISION, t)

    def _schedule_migration_check(self) -> None:
        self._migration_k += 1
        t = self._migration_k * self.config.migration.check_period
        if t <= self.config.duration:
            self.sim.schedule_kind(EventKind.MIGRATION_CHECK, t)

    # event dispatch

    def _dispatch(self, ev: Event) -> None:
        kind = ev.kind
        if kind is EventKind.LAYER_COMPLETE:
            self._on_layer_complete(ev)
        elif kind is EventKind.REQUEST_ARRIVAL:
            self._on_arrival(ev)
        elif kind is EventKind.BATCH_DISPATCH:
            self._on_batch_timer(ev)
        elif kind is EventKind.TOKEN_EMITTED:
            pass                # observability marker in the event log
        elif kind is EventKind.METRICS_TICK:
            self._on_metrics_tick()
        elif kind is EventKind.REPLICA_READY:
            self._on_replica_ready(ev)
        elif kind is EventKind.SCALE_DECISION:
            self._on_reconcile()
        elif kind is EventKind.MIGRATION_CHECK:
            self._on_migration_check()
        elif kind is EventKind.MIGRATION_COMPLETE:
            self._on_migration_complete(ev)
        elif kind is EventKind.WORKLOAD_PHASE_CHANGE:
            pass                # rate change is baked into the arrival schedule

    # request flow

    def _on_arrival(self, ev: Event) -> None:
        now = self.sim.clock.now
        p = ev.payload
        if p.get("hop"):
            replica = self.cluster.replicas[p["replica_id"]]
            requests = p["requests"]
            replica.pending_transit -= len(requests)
            if replica.state is ReplicaState.READY:
                for req in requests:
                    self._enqueue(replica, req, now)
                self._try_dispatch(replica, now)
            else:
                # destination left the Ready set while the hop was in flight
                for req in requests:
                    self._route_fresh(req, now)
            return

        request_id = self._next_request_id
        self._next_request_id += 1
        if p.get("closed_loop"):
            input_len = draw_length(self.config.workload.input_len_dist, self.streams["input_lens"])
            output_len = draw_length(self.config.workload.output_len_dist, self.streams["output_lens"])
        else:
            input_len = p["input_len"]
            output_len = p["output_len"]
        req = Request(
            request_id=request_id,
            arrival_time=now,
            input_len=input_len,
            output_len=output_len,
            per_layer_max=[0.0] * self.model.num_layers,
        )
        self.live[request_id] = req
        self.admitted += 1
        self.profiler.record_arrival(now)
        self._route_fresh(req, now)

    def _route_fresh(self, req: Request, now: float) -> None:
        """Route to the request's next layer with no transfer delay."""
        try:
            dest = self.balancer.pick_replica(
                req.next_layer, self.cluster.ready_replicas(req.next_layer), now
            )
        except NoReadyReplica:
            self._pending_by_layer.setdefault(req.next_layer, []).append(req)
            return
        self._enqueue(dest, req, now)
        self._try_dispatch(dest, now)

    def _enqueue(self, replica: LayerReplica, req: Request, now: float) -> None:
        req.last_enqueue_time = now
        replica.queue.append((req, now))

    def _try_dispatch(self, replica: LayerReplica, now: float) -> None:
        if (
            replica.state is not ReplicaState.READY
            or replica.in_flight is not None
            or not replica.queue
        ):
            return
        batch = form_batch(replica, self.config.batching, now, self._batch_seq)
        if batch is None:
            deadline = batch_timer_deadline(replica, self.config.batching)
            if deadline is not None and (replica.timer_at is None or deadline < replica.timer_at):
                replica.timer_at = deadline
                self.sim.schedule_kind(
                    EventKind.BATCH_DISPATCH, deadline,
                    replica_id=replica.replica_id, armed=deadline,
                )
            return
        self._batch_seq += 1
        replica.timer_at = None
        params = self.model.layer_costs[replica.layer_id]
        scale = self.cluster.nodes[replica.node_id].compute_scale
        if self.hook is not None:
            service = self.hook(batch, params, scale)
        elif batch.phase is Phase.PREFILL:
            service = prefill_time(params, batch, scale)
        else:
            contexts = [r.input_len + r.tokens_emitted for r in batch.members]
            service = decode_step_time(params, batch, contexts, scale)
        replica.in_flight = batch
        replica.busy_until = now + service
        replica.record_busy(now, now + service)
        self.sim.schedule_kind(EventKind.LAYER_COMPLETE, now + service, batch=batch)

    def _on_batch_timer(self, ev: Event) -> None:
        replica = self.cluster.replicas[ev.payload["replica_id"]]
        if replica.timer_at == ev.payload["armed"]:
            replica.timer_at = None
        self._try_dispatch(replica, self.sim.clock.now)

    def _on_layer_complete(self, ev: Event) -> None:
        now = self.sim.clock.now
        batch: Batch = ev.payload["batch"]
        replica = self.cluster.replicas[batch.replica_id]
        layer = batch.layer_id
        service = now - batch.dispatch_time
        batch.complete_time = now
        replica.in_flight = None
        replica.cumulative_busy += service
        self.profiler.record_batch(layer, now - batch.enqueue_min, service, len(batch.members), now)

        src_node = replica.node_id
        deliveries: dict[tuple[str, float], list[Request]] = {}
        touched: dict[str, LayerReplica] = {}
        for req in batch.members:
            hop_latency = now - req.last_enqueue_time
            if hop_latency > req.per_layer_max[layer]:
                req.per_layer_max[layer] = hop_latency
            action = advance_request(req, layer, now, self.model.num_layers)
            if action is not Advance.ROUTE:
                self.sim.schedule_kind(
                    EventKind.TOKEN_EMITTED, now,
                    request_id=req.request_id, token_index=req.tokens_emitted,
                )
            if action is Advance.DONE:
                self.completed += 1
                del self.live[req.request_id]
                self.profiler.record_done(req)
                if self._closed_loop and now < self.config.workload.duration:
                    self.sim.schedule_kind(EventKind.REQUEST_ARRIVAL, now, closed_loop=True)
                continue
            try:
                dest = self.balancer.pick_replica(
                    req.next_layer, self.cluster.ready_replicas(req.next_layer), now
                )
            except NoReadyReplica:
                self._pending_by_layer.setdefault(req.next_layer, []).append(req)
                continue
            tokens = req.input_len if req.phase is Phase.PREFILL else 1
            delay = self.cluster.network_delay(
                src_node, dest.node_id, self.model.payload_bytes(tokens)
            )
            if delay == 0.0:
                self._enqueue(dest, req, now)
                touched[dest.replica_id] = dest
            else:
                dest.pending_transit += 1
                deliveries.setdefault((dest.replica_id, now + delay), []).append(req)

        for (replica_id, t), requests in deliveries.items():
            self.sim.schedule_kind(
                EventKind.REQUEST_ARRIVAL, t,
                hop=True, replica_id=replica_id, requests=requests,
            )
        for dest in touched.values():
            self._try_dispatch(dest, now)
        if not self.cluster.finish_drain_if_idle(replica):
            self._try_dispatch(replica, now)

    def _on_replica_ready(self, ev: Event) -> None:
        now = self.sim.clock.now
        replica = self.cluster.mark_ready(ev.payload["replica_id"])
        self.balancer.rebalance_on_membership_change(replica.layer_id)
        pending = self._pending_by_layer.pop(replica.layer_id, None)
        if pending:
            for req in pending:
                self._route_fresh(req, now)
        self._try_dispatch(replica, now)

    # periodic services

    def _on_metrics_tick(self) -> None:
        self.profiler.sample(self.sim.clock.now, self.cluster.active_replicas())
        self._schedule_tick()

    def _on_reconcile(self) -> None:
        now = self.sim.clock.now
        cfg = self.config.autoscaler
        window_start = now - cfg.sync_period

        forecast = None
        if cfg.mode == PREDICTIVE:
            series = self.profiler.load_series(now)
            if len(series) > 0:
                if cfg.forecaster == WINDOW_MEAN:
                    forecast = window_mean_forecast(series, cfg.window_k)
                else:
                    forecast = ewma_forecast(series, cfg.ewma_alpha)

        for layer_id in range(self.model.num_layers):
            counted = self.cluster.layer_replicas(
                layer_id, ReplicaState.READY, ReplicaState.STARTING
            )
            current = len(counted)
            if current == 0:
                continue
            busy = sum(r.busy_time_in(window_start, now) for r in counted)
            utilization = min(1.0, busy / (current * cfg.sync_period))
            view = LayerMetricsView(
                current=current,
                utilization=utilization,
                p95_latency=self.profiler.layer_p95_since(layer_id, window_start),
                forecast_load=forecast,
            )
            rec = self.autoscaler.reconcile(layer_id, view, now)
            spawned: list[str] = []
            retired: list[str] = []
            if rec.spawn > 0:
                for _ in range(rec.spawn):
                    node_id = self._pick_spawn_node(layer_id)
                    if node_id is None:
                        break
                    replica = self.cluster.spawn_replica(
                        layer_id, node_id, now,
                        self.model.layer_costs[layer_id].memory_footprint,
                    )
                    spawned.append(f"{replica.replica_id}@{node_id}")
            elif rec.retire > 0:
                ready = self.cluster.ready_replicas(layer_id)
                can_retire = max(0, len(ready) - cfg.min_replicas)
                victims = sorted(ready, key=lambda r: -r.spawn_index)[: min(rec.retire, can_retire)]
                for victim in victims:
                    drained = self.cluster.retire_replica(victim.replica_id, cfg.min_replicas)
                    retired.append(victim.replica_id)
                    for req, _ in drained:
                        self._route_fresh(req, now)
                if retired:
                    self.balancer.rebalance_on_membership_change(layer_id)
            if spawned or retired:
                p95 = "na" if rec.p95_latency is None else f"{rec.p95_latency:.6f}"
                detail = (
                    f"current={rec.current} desired={rec.desired} "
                    f"util={rec.utilization:.6f} p95={p95} "
                    f"latency_triggered={rec.latency_triggered} "
                    f"spawned={spawned} retired={retired}"
                )
                self.profiler.record_decision(now, "ScaleDecision", layer_id, detail)
        self._schedule_reconcile()

    def _pick_spawn_node(self, layer_id: int) -> Optional[str]:
        footprint = self.model.layer_costs[layer_id].memory_footprint
        candidates = sorted(
            self.cluster.nodes,
            key=lambda nid: (-self.cluster.node_free_memory(nid), nid),
        )
        for node_id in candidates:
            if self.cluster.node_free_memory(node_id) >= footprint:
                return node_id
        return None

    def _on_migration_check(self) -> None:
        now = self.sim.clock.now
        cfg = self.config.migration
        for layer_id in range(self.model.num_layers):
            ready = self.cluster.ready_replicas(layer_id)
            if len(ready) < 2:
                continue
            moves = select_migrations(layer_id, ready, cfg, now)
            if not moves:
                continue
            by_source: dict[str, list] = {}
            for move in moves:
                by_source.setdefault(move.from_replica, []).append(move)
            for source_id, source_moves in by_source.items():
                source = self.cluster.replicas[source_id]
                wanted = {m.request_id for m in source_moves}
                moving: dict[int, Request] = {}
                kept = [entry for entry in source.queue if entry[0].request_id not in wanted]
                for req, _ in source.queue:
                    if req.request_id in wanted:
                        moving[req.request_id] = req
                source.queue.clear()
                source.queue.extend(kept)
                for move in source_moves:
                    dest = self.cluster.replicas[move.to_replica]
                    dest.pending_transit += 1
                    self.sim.schedule_kind(
                        EventKind.MIGRATION_COMPLETE, now + cfg.migration_delay,
                        request=moving[move.request_id],
                        from_replica=move.from_replica,
                        to_replica=move.to_replica,
                        layer_id=layer_id,
                    )
        self._schedule_migration_check()

    def _on_migration_complete(self, ev: Event) -> None:
        now = self.sim.clock.now
        p = ev.payload
        req: Request = p["request"]
        dest = self.cluster.replicas[p["to_replica"]]
        dest.pending_transit -= 1
        outcome = f"to={p['to_replica']}"
        if dest.state is ReplicaState.READY:
            self._enqueue(dest, req, now)
            self._try_dispatch(dest, now)
        else:
            source = self.cluster.replicas[p["from_replica"]]
            if source.state is ReplicaState.READY:
                self._enqueue(source, req, now)
                self._try_dispatch(source, now)
                outcome = f"returned={p['from_replica']}"
            else:
                self._route_fresh(req, now)
                outcome = "rerouted"
        self.profiler.record_decision(
            now, "MigrationComplete", p["layer_id"],
            f"request={req.request_id} from={p['from_replica']} {outcome}",
        )
