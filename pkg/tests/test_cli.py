import json

import pytest

from layersim.cli import main
from layersim.runio import REQUIRED_FILES

SMALL_DOC = {
    "seed": 11,
    "duration": 10.0,
    "metrics_interval": 0.5,
    "cluster": [{"node_id": "n0"}, {"node_id": "n1"}],
    "model": {
        "num_layers": 3,
        "hidden_dim": 128,
        "default_cost": {"alpha": 1e-4, "beta": 1e-6, "delta": 1e-5,
                         "memory_footprint": 1e9},
    },
    "workload": {
        "arrival": {"kind": "poisson", "rate": 10.0},
        "input_len_dist": {"kind": "uniform_int", "lo": 50, "hi": 200},
        "output_len_dist": {"kind": "uniform_int", "lo": 1, "hi": 3},
    },
    "batching": {"max_size": 4, "max_wait": 0.005},
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(SMALL_DOC))
    return path


class TestRun:
    def test_outputs_present_and_nonempty(self, config_file, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--config", str(config_file), "--out", str(out), "--quiet"]) == 0
        for name in REQUIRED_FILES:
            assert (out / name).stat().st_size > 0
        requests = (out / "requests.csv").read_text().splitlines()
        assert requests[0] == "request_id,arrival_time_s,ttft_s,e2e_s,mean_tpot_s,input_tokens,output_tokens"
        assert len(requests) > 10

    def test_same_seed_byte_identical(self, config_file, tmp_path):
        main(["run", "--config", str(config_file), "--out", str(tmp_path / "a"), "--quiet"])
        main(["run", "--config", str(config_file), "--out", str(tmp_path / "b"), "--quiet"])
        for name in ("requests.csv", "decisions.csv", "timeseries.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_seed_override_changes_outputs(self, config_file, tmp_path):
        main(["run", "--config", str(config_file), "--out", str(tmp_path / "a"), "--quiet"])
        main(["run", "--config", str(config_file), "--seed", "99",
              "--out", str(tmp_path / "c"), "--quiet"])
        assert (tmp_path / "a" / "requests.csv").read_bytes() != \
            (tmp_path / "c" / "requests.csv").read_bytes()

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["run", "--config", str(bad), "--quiet"]) == 2

    def test_validation_error_exit_code(self, config_file, tmp_path):
        doc = json.loads(config_file.read_text())
        doc["placement"] = {"strategy": "explicit",
                            "layers": {"0": ["n0"], "1": ["n0"], "2": ["n0"], "3": ["n0"]}}
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        assert main(["run", "--config", str(bad), "--quiet"]) == 2


class TestValidate:
    def test_ok(self, config_file):
        assert main(["validate", "--config", str(config_file), "--quiet"]) == 0

    def test_unknown_field(self, tmp_path):
        doc = dict(SMALL_DOC, bogus=1)
        path = tmp_path / "s.json"
        path.write_text(json.dumps(doc))
        assert main(["validate", "--config", str(path), "--quiet"]) == 2

    def test_shipped_scenarios_validate(self):
        for name in ("scenarios/paper_fig3_bottleneck.json",
                     "scenarios/paper_fig4_batch62.json"):
            assert main(["validate", "--config", name, "--quiet"]) == 0


class TestReport:
    def test_report_on_complete_run(self, config_file, tmp_path):
        out = tmp_path / "out"
        main(["run", "--config", str(config_file), "--out", str(out), "--quiet"])
        assert main(["report", str(out), "--quiet"]) == 0
        table = (out / "bottleneck_table.csv").read_text().splitlines()
        assert table[0].startswith("layer_id,max_latency_s")
        assert len(table) == 4   # header + 3 layers

    def test_missing_file_is_runtime_error(self, config_file, tmp_path):
        out = tmp_path / "out"
        main(["run", "--config", str(config_file), "--out", str(out), "--quiet"])
        (out / "timeseries.csv").unlink()
        assert main(["report", str(out), "--quiet"]) == 3

    def test_nonexistent_dir(self, tmp_path):
        assert main(["report", str(tmp_path / "nope"), "--quiet"]) == 3


class TestCompare:
    def test_no_bottleneck_gives_unit_ratios(self, tmp_path):
        # ample capacity: the autoscaler never acts, so both arms are identical
        doc = json.loads(json.dumps(SMALL_DOC))
        doc["autoscaler"] = {"enabled": True, "sync_period": 2.0,
                             "target_utilization": 0.9, "min_replicas": 1,
                             "max_replicas": 4}
        path = tmp_path / "s.json"
        path.write_text(json.dumps(doc))
        out = tmp_path / "cmp"
        assert main(["compare", "--config", str(path), "--out", str(out), "--quiet"]) == 0
        summary = json.loads((out / "comparison.json").read_text())
        assert abs(summary["ratios"]["mean_e2e"] - 1.0) <= 0.05
        assert abs(summary["ratios"]["throughput"] - 1.0) <= 0.05
        # treatment decisions file is empty apart from the header
        treatment_rows = (out / "treatment" / "decisions.csv").read_text().splitlines()
        assert treatment_rows == ["time_s,kind,layer_id,detail"]

    def test_invalid_config_exits_before_any_run(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        out = tmp_path / "cmp"
        assert main(["compare", "--config", str(bad), "--out", str(out), "--quiet"]) == 2
        assert not out.exists()

    def test_baseline_arm_is_clean(self, tmp_path):
        doc = json.loads(json.dumps(SMALL_DOC))
        doc["autoscaler"] = {"enabled": True, "sync_period": 2.0,
                             "target_utilization": 0.1, "latency_threshold": 0.0001,
                             "min_replicas": 1, "max_replicas": 4}
        doc["migration"] = {"enabled": True, "hot_threshold": 0.5,
                            "cold_threshold": 0.1, "check_period": 1.0}
        path = tmp_path / "s.json"
        path.write_text(json.dumps(doc))
        out = tmp_path / "cmp"
        assert main(["compare", "--config", str(path), "--out", str(out), "--quiet"]) == 0
        baseline_rows = (out / "baseline" / "decisions.csv").read_text().splitlines()
        assert baseline_rows == ["time_s,kind,layer_id,detail"]
        # treatment with aggressive thresholds does scale
        treatment_rows = (out / "treatment" / "decisions.csv").read_text().splitlines()
        assert len(treatment_rows) > 1
