"""A short generate-score-feedback run with the default five-model ensemble.

Usage: python demos/desk_run.py [epochs] [candidates per model]
The full acceptance run is 10 epochs x 200 candidates (about a minute).
"""

import json
import os
import sys
import tempfile

from molforge.orchestrator import parse_config, run

here = os.path.dirname(os.path.abspath(__file__))
epochs = int(sys.argv[1]) if len(sys.argv) > 1 else 3
per_model = int(sys.argv[2]) if len(sys.argv) > 2 else 50
out = tempfile.mkdtemp(prefix="molforge_demo_")
cfg = parse_config(json.dumps({
    "seed": 42,
    "reference_ligands": os.path.join(here, "..", "tests", "data", "seed_1k.smi"),
    "output_dir": out,
    "budgets": {"epochs": epochs, "candidates_per_model_per_epoch": per_model},
}))
res = run(cfg, threads=1, progress=None)
for row in res.top_by_epoch:
    print(f"epoch {row['epoch']:2d}  top-100 mean reward {row['top_mean']:.4f}  distinct valid {row['distinct_valid']}")
for mid, rows in res.model_stats.items():
    last = rows[-1]
    print(f"{mid:8s} validity {last['validity']:.2f}  new unique {last['uniqueness']:.2f}  mean reward {last['mean_reward']:.3f}")
print("best five:")
for f in res.ranked[:5]:
    print(f"  {f.report.reward:.3f}  {f.report.canonical_smiles}  ({f.source_model}, epoch {f.epoch})")
print("outputs in", out)
