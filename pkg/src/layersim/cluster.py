"""Nodes, network links, and the lifecycle of layer-service replicas.

Replicas occupy node memory but time-share compute through their own queues;
node-level compute contention is out of scope. The network is a uniform full
mesh: zero cost intra-node, latency + payload/bandwidth between nodes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from .core import Event, EventKind, SimCore
from .errors import (
    InsufficientNodeMemory,
    LastReplicaOfLayer,
    UnknownLayer,
    UnknownNode,
)


@dataclass(frozen=True)
class NodeSpec:
    node_id: str
    gpu_count: int = 1
    gpu_memory: float = 80e9        # bytes
    compute_scale: float = 1.0      # multiplier on layer compute speed
    net_latency: float = 0.0005     # seconds one-way to any other node
    net_bandwidth: float = 25e9     # bytes/second

    @property
    def memory_capacity(self) -> float:
        return self.gpu_memory * self.gpu_count


class ReplicaState(Enum):
    STARTING = "Starting"
    READY = "Ready"
    DRAINING = "Draining"
    TERMINATED = "Terminated"


class LayerReplica:
    """One microservice instance of one Transformer layer on one node.

    The queue holds (request, enqueue_time) pairs in FIFO order. Busy
    intervals never overlap because a replica serves one batch at a time.
    """

    __slots__ = (
        "replica_id", "layer_id", "node_id", "state", "queue",
        "busy_until", "cumulative_busy", "memory_footprint",
        "in_flight", "pending_transit", "spawn_index", "ready_time",
        "timer_at", "_busy_intervals", "_history_horizon",
    )

    def __init__(
        self,
        replica_id: str,
        layer_id: int,
        node_id: str,
        memory_footprint: float,
        spawn_index: int,
        history_horizon: float = 120.0,
    ):
        self.replica_id = replica_id
        self.layer_id = layer_id
        self.node_id = node_id
        self.state = ReplicaState.STARTING
        self.queue: deque[tuple[Any, float]] = deque()
        self.busy_until = 0.0
        self.cumulative_busy = 0.0
        self.memory_footprint = memory_footprint
        self.in_flight = None               # dispatched Batch, if any
        self.pending_transit = 0            # requests routed here, still on the wire
        self.spawn_index = spawn_index
        self.ready_time: Optional[float] = None
        self.timer_at: Optional[float] = None
        self._busy_intervals: deque[tuple[float, float]] = deque()
        self._history_horizon = history_horizon

    def record_busy(self, start: float, end: float) -> None:
        self._busy_intervals.append((start, end))
        horizon = start - self._history_horizon
        while self._busy_intervals and self._busy_intervals[0][1] < horizon:
            self._busy_intervals.popleft()

    def busy_time_in(self, t0: float, t1: float) -> float:
        """Seconds of service activity overlapping [t0, t1]."""
        total = 0.0
        for start, end in self._busy_intervals:
            lo = start if start > t0 else t0
            hi = end if end < t1 else t1
            if hi > lo:
                total += hi - lo
        return total

    def utilization(self, window: float, now: float) -> float:
        if window <= 0:
            return 0.0
        u = self.busy_time_in(now - window, now) / window
        return 1.0 if u > 1.0 else u

    def outstanding(self) -> int:
        """Queued + in-flight batch members + routed-but-undelivered requests."""
        n = len(self.queue) + self.pending_transit
        if self.in_flight is not None:
            n += len(self.in_flight.members)
        return n

    def cumulative_busy_at(self, now: float) -> float:
        busy = self.cumulative_busy
        if self.in_flight is not None:
            busy += now - self.in_flight.dispatch_time
        return busy


class Cluster:
    """Replica ledger plus node memory accounting and the network model."""

    def __init__(
        self,
        nodes: list[NodeSpec],
        num_layers: int,
        sim: SimCore,
        startup_delay: float = 30.0,
        history_horizon: float = 120.0,
    ):
        self.nodes: dict[str, NodeSpec] = {n.node_id: n for n in nodes}
        self.num_layers = num_layers
        self.sim = sim
        self.startup_delay = startup_delay
        self.history_horizon = history_horizon
        self.replicas: dict[str, LayerReplica] = {}
        self._by_layer: dict[int, list[str]] = {i: [] for i in range(num_layers)}
        self._resident: dict[str, float] = {n.node_id: 0.0 for n in nodes}
        self._spawn_counter: dict[int, int] = {i: 0 for i in range(num_layers)}

    # placement / lifecycle

    def node_free_memory(self, node_id: str) -> float:
        if node_id not in self.nodes:
            raise UnknownNode(f"node {node_id!r} does not exist")
        return self.nodes[node_id].memory_capacity - self._resident[node_id]

    def _new_replica(self, layer_id: int, node_id: str, footprint: float) -> LayerReplica:
        if layer_id < 0 or layer_id >= self.num_layers:
            raise UnknownLayer(f"layer {layer_id} outside [0, {self.num_layers})")
        if node_id not in self.nodes:
            raise UnknownNode(f"node {node_id!r} does not exist")
        if self.node_free_memory(node_id) < footprint:
            raise InsufficientNodeMemory(
                f"node {node_id!r} has {self.node_free_memory(node_id):.3g} B free, "
                f"layer {layer_id} needs {footprint:.3g} B"
            )
        idx = self._spawn_counter[layer_id]
        self._spawn_counter[layer_id] += 1
        replica = LayerReplica(
            replica_id=f"L{layer_id:03d}-R{idx:04d}",
            layer_id=layer_id,
            node_id=node_id,
            memory_footprint=footprint,
            spawn_index=idx,
            history_horizon=self.history_horizon,
        )
        self.replicas[replica.replica_id] = replica
        self._by_layer[layer_id].append(replica.replica_id)
        self._resident[node_id] += footprint
        return replica

    def add_initial_replica(self, layer_id: int, node_id: str, footprint: float) -> LayerReplica:
        """Place a replica that is Ready at t=0 (initial topology, no startup delay)."""
        replica = self._new_replica(layer_id, node_id, footprint)
        replica.state = ReplicaState.READY
        replica.ready_time = self.sim.clock.now
        return replica

    def spawn_replica(self, layer_id: int, node_id: str, at: float, footprint: float) -> LayerReplica:
        """Start a replica; it becomes Ready startup_delay seconds later."""
        replica = self._new_replica(layer_id, node_id, footprint)
        self.sim.schedule(
            Event(EventKind.REPLICA_READY, {"replica_id": replica.replica_id}),
            at + self.startup_delay,
        )
        return replica

    def mark_ready(self, replica_id: str) -> LayerReplica:
        replica = self.replicas[replica_id]
        if replica.state is ReplicaState.STARTING:
            replica.state = ReplicaState.READY
            replica.ready_time = self.sim.clock.now
        return replica

    def retire_replica(self, replica_id: str, min_replicas: int = 1) -> list[tuple[Any, float]]:
        """Begin draining a Ready replica; returns queued entries to re-route.

        The replica terminates immediately when idle, otherwise when its
        in-flight batch completes (see finish_drain_if_idle).
        """
        replica = self.replicas.get(replica_id)
        if replica is None or replica.state is not ReplicaState.READY:
            raise LastReplicaOfLayer(f"replica {replica_id!r} is not Ready")
        ready = self.ready_replicas(replica.layer_id)
        if len(ready) - 1 < min_replicas:
            raise LastReplicaOfLayer(
                f"layer {replica.layer_id} would drop below {min_replicas} Ready replicas"
            )
        replica.state = ReplicaState.DRAINING
        drained = list(replica.queue)
        replica.queue.clear()
        self.finish_drain_if_idle(replica)
        return drained

    def finish_drain_if_idle(self, replica: LayerReplica) -> bool:
        if (
            replica.state is ReplicaState.DRAINING
            and replica.in_flight is None
            and not replica.queue
        ):
            replica.state = ReplicaState.TERMINATED
            self._resident[replica.node_id] -= replica.memory_footprint
            return True
        return False

    # queries

    def ready_replicas(self, layer_id: int) -> list[LayerReplica]:
        if layer_id < 0 or layer_id >= self.num_layers:
            raise UnknownLayer(f"layer {layer_id} outside [0, {self.num_layers})")
        out = [
            self.replicas[rid]
            for rid in self._by_layer[layer_id]
            if self.replicas[rid].state is ReplicaState.READY
        ]
        out.sort(key=lambda r: r.replica_id)
        return out

    def layer_replicas(self, layer_id: int, *states: ReplicaState) -> list[LayerReplica]:
        wanted = set(states) if states else None
        out = [
            self.replicas[rid]
            for rid in self._by_layer[layer_id]
            if wanted is None or self.replicas[rid].state in wanted
        ]
        out.sort(key=lambda r: r.replica_id)
        return out

    def active_replicas(self) -> list[LayerReplica]:
        out = [r for r in self.replicas.values() if r.state is not ReplicaState.TERMINATED]
        out.sort(key=lambda r: r.replica_id)
        return out

    def network_delay(self, src_node: str, dst_node: str, payload_bytes: float) -> float:
        """Transfer time between nodes; zero when co-located.

        Uses the source node's link parameters (the mesh is uniform by
        convention, so src and dst normally agree).
        """
        if src_node not in self.nodes:
            raise UnknownNode(f"node {src_node!r} does not exist")
        if dst_node not in self.nodes:
            raise UnknownNode(f"node {dst_node!r} does not exist")
        if src_node == dst_node:
            return 0.0
        spec = self.nodes[src_node]
        return spec.net_latency + payload_bytes / spec.net_bandwidth

    def topology(self) -> dict[int, tuple[tuple[str, str, str], ...]]:
        """Per layer, the sorted (replica_id, node_id, state) of live replicas."""
        topo = {}
        for layer_id in range(self.num_layers):
            rows = tuple(
                (r.replica_id, r.node_id, r.state.value)
                for r in self.layer_replicas(layer_id)
                if r.state is not ReplicaState.TERMINATED
            )
            topo[layer_id] = rows
        return topo
