"""Shared scenario factories for the test suite."""

from __future__ import annotations

from layersim import (
    BalancerPolicy,
    BatchingPolicy,
    CostParams,
    ModelSpec,
    NodeSpec,
    PoissonArrivals,
    UniformInt,
    WorkloadSpec,
)
from layersim.config import ScenarioConfig


def uniform_costs(num_layers: int, **kw) -> tuple[CostParams, ...]:
    params = dict(alpha=1e-4, beta=1e-6, delta=1e-5, mu=1e-9, memory_footprint=1e9)
    params.update(kw)
    return tuple(CostParams(**params) for _ in range(num_layers))


def small_scenario(**overrides) -> ScenarioConfig:
    """3 nodes, 4 cheap layers, light Poisson load; override anything."""
    num_layers = overrides.pop("num_layers", 4)
    base = dict(
        cluster=(NodeSpec("n0"), NodeSpec("n1"), NodeSpec("n2")),
        model=ModelSpec(num_layers=num_layers, hidden_dim=512,
                        layer_costs=uniform_costs(num_layers)),
        workload=WorkloadSpec(
            arrival=PoissonArrivals(rate=20.0),
            input_len_dist=UniformInt(50, 200),
            output_len_dist=UniformInt(2, 4),
            duration=20.0,
        ),
        seed=7,
        duration=20.0,
        balancer=BalancerPolicy(),
        batching=BatchingPolicy(max_size=4, max_wait=0.005),
    )
    base.update(overrides)
    return ScenarioConfig(**base)
