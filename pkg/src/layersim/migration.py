"""Queue migration between replicas of the same layer.

Only queued requests move; in-flight computation never does. Each periodic
check pairs hot and cold replicas greedily (hottest with coldest first) and
moves the newest half of the queue-length difference, so the layer's maximum
queue length never increases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cluster import LayerReplica


@dataclass(frozen=True)
class MigrationConfig:
    enabled: bool = False
    hot_threshold: float = 0.8      # utilization fraction
    cold_threshold: float = 0.3
    migration_delay: float = 0.05   # seconds per moved request
    check_period: float = 1.0


@dataclass(frozen=True)
class Move:
    request_id: int
    from_replica: str
    to_replica: str
    layer_id: int


def select_migrations(
    layer_id: int,
    replicas: list[LayerReplica],
    config: MigrationConfig,
    now: float,
) -> list[Move]:
    """Pick moves for one layer at one check; empty when no pair qualifies.

    Utilization is measured over the last check_period. Each replica joins at
    most one (hot, cold) pair per check, so a request is moved at most once.
    """
    utils = {r.replica_id: r.utilization(config.check_period, now) for r in replicas}
    hots = sorted(
        (r for r in replicas if utils[r.replica_id] > config.hot_threshold),
        key=lambda r: (-utils[r.replica_id], r.replica_id),
    )
    colds = sorted(
        (r for r in replicas if utils[r.replica_id] < config.cold_threshold),
        key=lambda r: (utils[r.replica_id], r.replica_id),
    )
    moves: list[Move] = []
    for hot, cold in zip(hots, colds):
        gap = len(hot.queue) - len(cold.queue)
        if gap <= 0:
            continue
        count = min(math.ceil(gap / 2), len(hot.queue))
        # newest queued requests sit at the tail
        for req, _ in list(hot.queue)[-count:]:
            moves.append(Move(
                request_id=req.request_id,
                from_replica=hot.replica_id,
                to_replica=cold.replica_id,
                layer_id=layer_id,
            ))
    return moves
