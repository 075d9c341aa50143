#!/usr/bin/env python3
"""Run the bottleneck-identification scenario and print the per-layer table.

Writes the run into runs/fig3/ and shows the layers ranked by maximum batch
latency: one cost-inflated layer dominating every other by orders of
magnitude.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from layersim.cli import main  # noqa: E402

SCENARIO = Path(__file__).resolve().parents[1] / "scenarios" / "paper_fig3_bottleneck.json"
OUT = Path("runs/fig3")


def run() -> int:
    rc = main(["run", "--config", str(SCENARIO), "--out", str(OUT), "--quiet"])
    if rc != 0:
        return rc
    rc = main(["report", str(OUT), "--quiet"])
    if rc != 0:
        return rc
    doc = json.loads((OUT / "bottleneck.json").read_text())
    layers = {row["layer_id"]: row for row in doc["layers"]}
    print(f"{'layer':>5} {'max_latency_s':>14} {'p95_s':>10} {'ratio_to_min':>13}")
    for layer_id in doc["ranking"][:8]:
        row = layers[layer_id]
        print(f"{layer_id:>5} {row['max_latency_s']:>14.4f} {row['p95_s']:>10.4f} "
              f"{row['ratio_to_min']:>13.1f}")
    print("  ...")
    bottleneck = doc["bottleneck_layer"]
    ratio_27_30 = layers[27]["max_latency_s"] / layers[30]["max_latency_s"]
    print(f"\nbottleneck layer: {bottleneck}")
    print(f"max latency ratio layer 27 : layer 30 = {ratio_27_30:.0f}x")
    print(f"full table: {OUT / 'bottleneck_table.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
