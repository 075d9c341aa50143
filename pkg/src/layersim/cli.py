"""Command-line surface: run, compare, report, validate.

Exit codes: 0 success, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

from .config import (
    ScenarioConfig,
    load_scenario,
    validate_scenario,
    with_autoscaler_enabled,
    with_migration_enabled,
)
from .engine import Engine, RunResult
from .errors import ConfigParseError, SimError, ValidationError
from .profiler import comparison_summary
from .runio import (
    bottleneck_table,
    check_run_dir,
    read_bottleneck,
    write_run_outputs,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def run_scenario(config: ScenarioConfig, out_dir: str | Path) -> RunResult:
    result = Engine(config).run()
    write_run_outputs(result, out_dir)
    return result


def compare_scenario(config: ScenarioConfig, out_dir: str | Path) -> tuple[RunResult, RunResult, dict]:
    """Run baseline (autoscaling and migration off) vs treatment with one seed."""
    out = Path(out_dir)
    baseline_cfg = with_migration_enabled(with_autoscaler_enabled(config, False), False)
    treatment_cfg = with_autoscaler_enabled(config, True)
    baseline = run_scenario(baseline_cfg, out / "baseline")
    treatment = run_scenario(treatment_cfg, out / "treatment")
    summary = comparison_summary(baseline.stats, treatment.stats)
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return baseline, treatment, summary


def _load(args) -> ScenarioConfig:
    config = load_scenario(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    validate_scenario(config)
    return config


def _cmd_run(args) -> int:
    config = _load(args)
    out_dir = args.out or config.outputs
    result = run_scenario(config, out_dir)
    if not args.quiet:
        stats = result.stats
        mean = "na" if stats.mean_e2e is None else f"{stats.mean_e2e:.4f}"
        print(f"run complete: {result.completed}/{result.admitted} requests, "
              f"mean e2e {mean} s, throughput {stats.throughput:.4f} qps")
        print(f"outputs: {Path(out_dir)}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = _load(args)
    out_dir = Path(args.out or config.outputs)
    baseline, treatment, summary = compare_scenario(config, out_dir)
    if not args.quiet:
        b, t, r = summary["baseline"], summary["treatment"], summary["ratios"]
        print(f"baseline : mean e2e {b['mean_e2e_s']:.4f} s, {b['throughput_qps']:.4f} qps")
        print(f"treatment: mean e2e {t['mean_e2e_s']:.4f} s, {t['throughput_qps']:.4f} qps")
        print(f"ratios   : latency {r['mean_e2e']:.4f}, throughput {r['throughput']:.4f}")
        print(f"outputs: {out_dir}")
    return EXIT_OK


def _cmd_report(args) -> int:
    run_dir = check_run_dir(args.run_dir)
    doc = read_bottleneck(run_dir)
    table = bottleneck_table(doc)
    (run_dir / "bottleneck_table.csv").write_text(table, encoding="utf-8")
    if not args.quiet:
        if doc.get("bottleneck_layer") is None:
            print("no bottleneck report: not every layer observed a batch")
        else:
            print(f"bottleneck layer: {doc['bottleneck_layer']}")
            ranking = doc["ranking"][:5]
            layers = {row["layer_id"]: row for row in doc["layers"]}
            print("top layers by max batch latency:")
            for layer_id in ranking:
                row = layers[layer_id]
                print(f"  layer {layer_id:3d}: max {row['max_latency_s']:.4f} s "
                      f"(p95 {row['p95_s']:.4f} s, ratio_to_min {row['ratio_to_min']:.1f})")
        print(f"table: {run_dir / 'bottleneck_table.csv'}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    _load(args)
    if not args.quiet:
        print("config OK")
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="layersim",
        description="Discrete-event simulator of per-layer LLM inference serving",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="scenario JSON file")
            p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
            p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--quiet", action="store_true", help="suppress the summary line")

    p_run = sub.add_parser("run", help="execute a scenario and write output files")
    add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="run baseline (no autoscaling) vs treatment")
    add_common(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_rep = sub.add_parser("report", help="bottleneck report for a completed run directory")
    p_rep.add_argument("run_dir", help="directory written by `layersim run`")
    add_common(p_rep, needs_config=False)
    p_rep.set_defaults(func=_cmd_report)

    p_val = sub.add_parser("validate", help="parse and validate a scenario file")
    add_common(p_val)
    p_val.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
