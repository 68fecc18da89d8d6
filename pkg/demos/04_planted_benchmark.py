"""Calibrate the harness metrics on a corpus whose errors are planted.

Every record carries exactly one known behavior, so the reported metrics can
be checked against arithmetic instead of against another implementation.

Run:  python demos/04_planted_benchmark.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from toolcall_rl import emit_report, evaluate, generate_universe, plant_corpus

universe = generate_universe(seed=0, n_tools=4, max_params=2)
mix = {"invalid-json": 0.10, "extraneous-text": 0.10, "wrong-name": 0.20, "extra-call": 0.10}
corpus = plant_corpus(universe, seed=11, n_records=1000, error_mix=mix)

print("planted mix:", mix)
print("observed rates:", dict(sorted(corpus.rates.items())))
print()

report = evaluate(corpus.dataset(), corpus.completions())
print(emit_report(report, fmt="table"))

print("Cross-check against the plant:")
print("  JSON validity should be 1 - invalid - extraneous = 0.80 ->", report.json_validity)
print("  Overall accuracy should be the perfect remainder  = 0.50 ->", report.overall_accuracy)

print()
print("A few planted records and how they scored:")
by_id = {row.id: row for row in report.rows}
shown: set[str] = set()
for planted in corpus.records:
    if planted.tag in shown:
        continue
    shown.add(planted.tag)
    row = by_id[planted.record.id]
    preview = planted.completion[:64] + ("..." if len(planted.completion) > 64 else "")
    print(f"  [{planted.tag:>15}] r_final={row.r_final:<8} {preview}")
    if len(shown) == 5:
        break
