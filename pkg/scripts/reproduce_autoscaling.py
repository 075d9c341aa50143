#!/usr/bin/env python3
"""Run the batch-62 autoscaling comparison and print both arms plus ratios.

Writes runs/fig4/{baseline,treatment}/ and comparison.json. The baseline arm
disables autoscaling; the treatment arm lets the HPA loop scale the
bottleneck layer out.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from layersim.cli import main  # noqa: E402

SCENARIO = Path(__file__).resolve().parents[1] / "scenarios" / "paper_fig4_batch62.json"
OUT = Path("runs/fig4")


def run() -> int:
    rc = main(["compare", "--config", str(SCENARIO), "--out", str(OUT), "--quiet"])
    if rc != 0:
        return rc
    summary = json.loads((OUT / "comparison.json").read_text())
    for arm in ("baseline", "treatment"):
        stats = summary[arm]
        print(f"{arm:>9}: mean e2e {stats['mean_e2e_s']:7.2f} s   "
              f"p95 {stats['p95_e2e_s']:7.2f} s   "
              f"throughput {stats['throughput_qps']:5.2f} qps   "
              f"({stats['completed']} completed)")
    ratios = summary["ratios"]
    print(f"\nratios (treatment/baseline): "
          f"mean e2e {ratios['mean_e2e']:.3f}, throughput {ratios['throughput']:.3f}")
    decisions = (OUT / "treatment" / "decisions.csv").read_text().splitlines()[1:]
    scale_ups = [row for row in decisions if "ScaleDecision" in row and "spawned=['L027" in row]
    print(f"layer-27 scale-outs in treatment arm: {len(scale_ups)}")
    print(f"outputs: {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
