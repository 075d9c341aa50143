import json

import pytest

from layersim.config import (
    load_scenario,
    parse_scenario,
    scenario_to_dict,
    validate_scenario,
    workload_hash,
)
from layersim.errors import ConfigParseError, ValidationError

from helpers import small_scenario

MINIMAL = {
    "seed": 1,
    "duration": 10.0,
    "cluster": [{"node_id": "n0"}],
    "model": {
        "num_layers": 2,
        "hidden_dim": 64,
        "default_cost": {"beta": 1e-6, "memory_footprint": 1e9},
    },
    "workload": {"arrival": {"kind": "poisson", "rate": 5.0}},
}


def doc(**overrides):
    base = json.loads(json.dumps(MINIMAL))
    base.update(overrides)
    return base


class TestParse:
    def test_minimal_document_with_defaults(self):
        cfg = parse_scenario(doc())
        assert cfg.model.num_layers == 2
        assert cfg.metrics_interval == 0.1
        assert cfg.startup_delay == 30.0
        assert cfg.autoscaler.enabled is False
        assert cfg.batching.max_size == 8
        validate_scenario(cfg)

    def test_unknown_field_named_in_error(self):
        with pytest.raises(ConfigParseError, match="turbo"):
            parse_scenario(doc(turbo=True))

    def test_missing_required_field(self):
        bad = doc()
        del bad["seed"]
        with pytest.raises(ConfigParseError, match="seed"):
            parse_scenario(bad)

    def test_wrong_type_named(self):
        with pytest.raises(ConfigParseError, match="duration"):
            parse_scenario(doc(duration="long"))

    def test_layer_overrides_applied(self):
        d = doc()
        d["model"]["layer_overrides"] = {"1": {"beta": 5e-5}}
        cfg = parse_scenario(d)
        assert cfg.model.layer_costs[0].beta == 1e-6
        assert cfg.model.layer_costs[1].beta == 5e-5

    def test_override_out_of_range(self):
        d = doc()
        d["model"]["layer_overrides"] = {"7": {"beta": 5e-5}}
        with pytest.raises(ConfigParseError, match="out of range"):
            parse_scenario(d)

    def test_shipped_scenarios_parse_and_validate(self):
        for name in ("scenarios/paper_fig3_bottleneck.json", "scenarios/paper_fig4_batch62.json"):
            cfg = load_scenario(name)
            validate_scenario(cfg)


class TestRoundTrip:
    def test_parse_serialize_parse_identity(self):
        cfg = parse_scenario(doc())
        again = parse_scenario(scenario_to_dict(cfg))
        assert again == cfg

    def test_round_trip_shipped_scenarios(self):
        for name in ("scenarios/paper_fig3_bottleneck.json", "scenarios/paper_fig4_batch62.json"):
            cfg = load_scenario(name)
            assert parse_scenario(scenario_to_dict(cfg)) == cfg

    def test_workload_hash_ignores_non_workload_fields(self):
        a = parse_scenario(doc())
        b = parse_scenario(doc(startup_delay=5.0))
        assert workload_hash(a) == workload_hash(b)
        c = parse_scenario(doc(seed=2))
        assert workload_hash(a) != workload_hash(c)


class TestValidation:
    def test_explicit_placement_layer_out_of_range(self):
        d = doc()
        d["placement"] = {"strategy": "explicit", "layers": {"0": ["n0"], "2": ["n0"]}}
        cfg = parse_scenario(d)
        with pytest.raises(ValidationError):
            validate_scenario(cfg)

    def test_placement_must_cover_every_layer(self):
        d = doc()
        d["placement"] = {"strategy": "explicit", "layers": {"0": ["n0"]}}
        with pytest.raises(ValidationError, match="layer 1"):
            validate_scenario(parse_scenario(d))

    def test_unknown_node_in_placement(self):
        d = doc()
        d["placement"] = {"strategy": "explicit", "layers": {"0": ["n0"], "1": ["ghost"]}}
        with pytest.raises(ValidationError, match="ghost"):
            validate_scenario(parse_scenario(d))

    def test_memory_over_capacity(self):
        d = doc()
        d["model"]["default_cost"]["memory_footprint"] = 1e12
        with pytest.raises(ValidationError, match="capacity"):
            validate_scenario(parse_scenario(d))

    def test_min_max_replicas_ordering(self):
        d = doc()
        d["autoscaler"] = {"enabled": True, "min_replicas": 4, "max_replicas": 2}
        with pytest.raises(ValidationError, match="min_replicas"):
            validate_scenario(parse_scenario(d))

    def test_migration_thresholds_ordering(self):
        d = doc()
        d["migration"] = {"enabled": True, "hot_threshold": 0.3, "cold_threshold": 0.5}
        with pytest.raises(ValidationError, match="cold_threshold"):
            validate_scenario(parse_scenario(d))

    def test_layer_needs_some_compute_coefficient(self):
        d = doc()
        d["model"]["default_cost"] = {"memory_footprint": 1e9}
        with pytest.raises(ValidationError, match="beta, delta"):
            validate_scenario(parse_scenario(d))

    def test_predictive_mode_needs_capacity(self):
        d = doc()
        d["autoscaler"] = {"enabled": True, "mode": "predictive"}
        with pytest.raises(ValidationError, match="per_replica_capacity"):
            validate_scenario(parse_scenario(d))

    def test_programmatic_config_validates(self):
        validate_scenario(small_scenario())
