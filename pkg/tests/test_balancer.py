import pytest
from hypothesis import given, strategies as st

from layersim.balancer import (
    LEAST_OUTSTANDING,
    ROUND_ROBIN,
    WEIGHTED_LEAST_UTILIZATION,
    Balancer,
    BalancerPolicy,
)
from layersim.errors import NoReadyReplica


class FakeReplica:
    def __init__(self, replica_id, outstanding=0, utilization=0.0):
        from collections import deque
        self.replica_id = replica_id
        self.queue = deque()
        self._outstanding = outstanding
        self._utilization = utilization

    def outstanding(self):
        return self._outstanding

    def utilization(self, window, now):
        return self._utilization


def ready(*specs):
    return sorted((FakeReplica(*s) for s in specs), key=lambda r: r.replica_id)


class TestRoundRobin:
    def test_cycles_in_id_order(self):
        balancer = Balancer(BalancerPolicy(kind=ROUND_ROBIN))
        replicas = ready(("a",), ("b",), ("c",))
        picks = [balancer.pick_replica(0, replicas, 0.0).replica_id for _ in range(4)]
        assert picks == ["a", "b", "c", "a"]

    def test_retired_replica_skipped(self):
        balancer = Balancer(BalancerPolicy(kind=ROUND_ROBIN))
        replicas = ready(("a",), ("b",), ("c",))
        balancer.pick_replica(0, replicas, 0.0)      # a
        survivors = [r for r in replicas if r.replica_id != "b"]
        picks = [balancer.pick_replica(0, survivors, 0.0).replica_id for _ in range(4)]
        assert "b" not in picks

    def test_new_replica_enters_within_one_cycle(self):
        balancer = Balancer(BalancerPolicy(kind=ROUND_ROBIN))
        replicas = ready(("a",), ("b",))
        balancer.pick_replica(0, replicas, 0.0)
        grown = ready(("a",), ("b",), ("c",))
        balancer.rebalance_on_membership_change(0)
        picks = [balancer.pick_replica(0, grown, 0.0).replica_id for _ in range(3)]
        assert "c" in picks

    def test_no_ready_replica(self):
        balancer = Balancer(BalancerPolicy(kind=ROUND_ROBIN))
        with pytest.raises(NoReadyReplica):
            balancer.pick_replica(0, [], 0.0)

    @given(n=st.integers(1, 6), k=st.integers(1, 5))
    def test_fairness_over_stable_set(self, n, k):
        balancer = Balancer(BalancerPolicy(kind=ROUND_ROBIN))
        replicas = ready(*((f"r{i}",) for i in range(n)))
        counts = {r.replica_id: 0 for r in replicas}
        for _ in range(k * n):
            counts[balancer.pick_replica(0, replicas, 0.0).replica_id] += 1
        assert set(counts.values()) == {k}


class TestLeastOutstanding:
    def test_argmin(self):
        balancer = Balancer(BalancerPolicy(kind=LEAST_OUTSTANDING))
        replicas = ready(("a", 3), ("b", 1), ("c", 2))
        assert balancer.pick_replica(0, replicas, 0.0).replica_id == "b"

    def test_tie_breaks_to_lowest_id(self):
        balancer = Balancer(BalancerPolicy(kind=LEAST_OUTSTANDING))
        replicas = ready(("a", 2), ("b", 2))
        assert balancer.pick_replica(0, replicas, 0.0).replica_id == "a"

    @given(loads=st.lists(st.integers(0, 50), min_size=1, max_size=8))
    def test_never_picks_strictly_heavier_replica(self, loads):
        balancer = Balancer(BalancerPolicy(kind=LEAST_OUTSTANDING))
        replicas = ready(*((f"r{i}", load) for i, load in enumerate(loads)))
        picked = balancer.pick_replica(0, replicas, 0.0)
        assert picked.outstanding() == min(loads)


class TestWeightedLeastUtilization:
    def test_picks_lowest_windowed_utilization(self):
        balancer = Balancer(BalancerPolicy(kind=WEIGHTED_LEAST_UTILIZATION,
                                           utilization_window=10.0))
        replicas = ready(("a", 0, 0.9), ("b", 0, 0.2), ("c", 0, 0.5))
        assert balancer.pick_replica(0, replicas, 0.0).replica_id == "b"

    def test_tie_breaks_to_lowest_id(self):
        balancer = Balancer(BalancerPolicy(kind=WEIGHTED_LEAST_UTILIZATION))
        replicas = ready(("b", 0, 0.4), ("a", 0, 0.4))
        assert balancer.pick_replica(0, replicas, 0.0).replica_id == "a"


def test_unknown_policy_rejected():
    with pytest.raises(ValueError):
        Balancer(BalancerPolicy(kind="fastest_finger"))
