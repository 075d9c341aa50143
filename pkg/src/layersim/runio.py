"""Run-directory I/O: the four profiler output files plus the run manifest.

Floats are written with repr() so identical runs produce byte-identical
files and values round-trip exactly.
"""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

from . import __version__
from .engine import RunResult
from .errors import IncompleteRunDir

REQUESTS_FILE = "requests.csv"
TIMESERIES_FILE = "timeseries.csv"
DECISIONS_FILE = "decisions.csv"
BOTTLENECK_FILE = "bottleneck.json"
MANIFEST_FILE = "manifest.json"

REQUIRED_FILES = (REQUESTS_FILE, TIMESERIES_FILE, DECISIONS_FILE, BOTTLENECK_FILE, MANIFEST_FILE)

REQUESTS_HEADER = ["request_id", "arrival_time_s", "ttft_s", "e2e_s",
                   "mean_tpot_s", "input_tokens", "output_tokens"]
TIMESERIES_HEADER = ["time_s", "layer_id", "replica_id", "utilization", "queue_len"]
DECISIONS_HEADER = ["time_s", "kind", "layer_id", "detail"]


def write_run_outputs(result: RunResult, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / REQUESTS_FILE, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REQUESTS_HEADER)
        for r in result.records:
            writer.writerow([
                r.request_id, repr(r.arrival_time), repr(r.ttft), repr(r.e2e_latency),
                repr(r.mean_tpot), r.input_len, r.output_len,
            ])

    with open(out / TIMESERIES_FILE, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TIMESERIES_HEADER)
        for time_s, layer_id, replica_id, utilization, queue_len in result.timeseries_rows:
            writer.writerow([repr(time_s), layer_id, replica_id, repr(utilization), queue_len])

    with open(out / DECISIONS_FILE, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DECISIONS_HEADER)
        for time_s, kind, layer_id, detail in result.decision_rows:
            writer.writerow([repr(time_s), kind, layer_id, detail])

    if result.bottleneck is not None:
        bottleneck_doc = result.bottleneck.to_dict()
    else:
        bottleneck_doc = {"bottleneck_layer": None, "ranking": [], "layers": [],
                          "note": "not every layer observed a batch"}
    (out / BOTTLENECK_FILE).write_text(
        json.dumps(bottleneck_doc, indent=2) + "\n", encoding="utf-8"
    )

    manifest = {
        "config_hash": result.config_hash,
        "workload_hash": result.workload_hash,
        "seed": result.config.seed,
        "duration_s": result.config.duration,
        "admitted": result.admitted,
        "completed": result.completed,
        "in_system_at_end": result.in_system,
        "versions": {
            "layersim": __version__,
            "python": platform.python_version(),
        },
    }
    (out / MANIFEST_FILE).write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    return out


def check_run_dir(run_dir: str | Path) -> Path:
    run = Path(run_dir)
    if not run.is_dir():
        raise IncompleteRunDir(f"{run}: not a directory")
    missing = [name for name in REQUIRED_FILES if not (run / name).is_file()]
    if missing:
        raise IncompleteRunDir(f"{run}: missing {', '.join(missing)}")
    return run


def read_bottleneck(run_dir: str | Path) -> dict:
    run = check_run_dir(run_dir)
    return json.loads((run / BOTTLENECK_FILE).read_text(encoding="utf-8"))


def read_manifest(run_dir: str | Path) -> dict:
    run = check_run_dir(run_dir)
    return json.loads((run / MANIFEST_FILE).read_text(encoding="utf-8"))


def bottleneck_table(doc: dict) -> str:
    """Plot-ready per-layer table (CSV text) from a bottleneck report doc."""
    lines = ["layer_id,max_latency_s,p50_s,p95_s,skewness,ratio_to_min"]
    for row in doc.get("layers", []):
        skew = "" if row["skewness"] is None else repr(row["skewness"])
        lines.append(
            f"{row['layer_id']},{row['max_latency_s']!r},{row['p50_s']!r},"
            f"{row['p95_s']!r},{skew},{row['ratio_to_min']!r}"
        )
    return "\n".join(lines) + "\n"
