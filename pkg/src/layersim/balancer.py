"""Per-layer routing of requests to Ready replicas.

All policies decide on the live state view at dispatch time. Outstanding
load counts queued requests, members of the in-flight batch, and requests
already routed to a replica but still in network transit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cluster import LayerReplica
from .errors import NoReadyReplica

ROUND_ROBIN = "round_robin"
LEAST_OUTSTANDING = "least_outstanding"
WEIGHTED_LEAST_UTILIZATION = "weighted_least_utilization"

POLICY_KINDS = (ROUND_ROBIN, LEAST_OUTSTANDING, WEIGHTED_LEAST_UTILIZATION)


@dataclass(frozen=True)
class BalancerPolicy:
    kind: str = LEAST_OUTSTANDING
    utilization_window: float = 10.0


class Balancer:
    """Stateful router: one rotation cursor per layer for round-robin."""

    def __init__(self, policy: BalancerPolicy):
        if policy.kind not in POLICY_KINDS:
            raise ValueError(f"unknown balancer policy {policy.kind!r}")
        self.policy = policy
        self._cursors: dict[int, int] = {}

    def pick_replica(self, layer_id: int, ready: list[LayerReplica], now: float) -> LayerReplica:
        """Choose one Ready replica of the layer; ties go to the lowest id.

        `ready` must be the live Ready set sorted by replica_id.
        """
        if not ready:
            raise NoReadyReplica(f"layer {layer_id} has no Ready replica")
        kind = self.policy.kind
        if kind == ROUND_ROBIN:
            cursor = self._cursors.get(layer_id, 0)
            self._cursors[layer_id] = cursor + 1
            return ready[cursor % len(ready)]
        if kind == LEAST_OUTSTANDING:
            return min(ready, key=lambda r: (r.outstanding(), r.replica_id))
        window = self.policy.utilization_window
        return min(ready, key=lambda r: (r.utilization(window, now), r.replica_id))

    def rebalance_on_membership_change(self, layer_id: int) -> None:
        """Keep the rotation cursor meaningful after spawn/retire.

        Picks are always taken modulo the live Ready set, so correctness does
        not depend on this; resetting merely restarts the cycle cleanly.
        """
        if layer_id in self._cursors:
            self._cursors[layer_id] = 0
