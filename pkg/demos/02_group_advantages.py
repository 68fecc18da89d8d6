"""How group-relative standardization turns raw rewards into update weights.

Run:  python demos/02_group_advantages.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from toolcall_rl import group_advantages

print("A group is the set of sampled completions for one query; each reward is")
print("standardized against the group's own mean and spread, so the best sample")
print("in a mediocre group still gets pushed up and there is no learned critic.")
print()

groups = {
    "one winner":           [1, 0, 0, 0, 0, 0, 0, 0],
    "one loser":            [1, 1, 1, 1, 1, 1, 1, 0],
    "graded partial credit":[1.0, 0.5625, 0.5625, 0.5, 0.125, 0.125, 0.0, 0.0],
    "all identical":        [0.5625] * 8,
    "head to head":         [1, 0],
}

for label, rewards in groups.items():
    adv = group_advantages(rewards)
    cells = "  ".join(f"{a:+.3f}" for a in adv)
    print(f"{label:>22}: rewards {rewards}")
    print(f"{'':>22}  advantages {cells}")
    print()

print("Invariances: shifting or positively scaling every reward changes nothing,")
print("because the group statistics absorb it.")
base = np.array([0.9, 0.4, 0.4, 0.1])
for variant, values in [
    ("base", base),
    ("shifted +5", base + 5.0),
    ("scaled x37", base * 37.0),
]:
    print(f"  {variant:>11}: {np.round(group_advantages(values), 6)}")
