"""Train the toy policy until the reward shaping has removed every error mode.

The tabular policy starts uniform over all its failure modes: a coin-flip on
emitting chat text around the payload, a coin-flip on emitting an extra call,
a uniform guess over tool names, and uniform guesses over argument values.
Watch the extraneous-text rate collapse first (it is the harshest penalty),
then the rest climb to a perfect 1.0.

Run:  python demos/03_toy_training_run.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from toolcall_rl import TrainerConfig, curve_stats, default_universe, train_toy_policy

config = TrainerConfig(group_size=8, learning_rate=0.015, max_steps=2000, seed=42)
universe = default_universe()
print(f"universe: {len(universe.tools)} tools, {len(universe.templates)} query templates")
print(f"config:   group_size={config.group_size} lr={config.learning_rate} "
      f"steps={config.max_steps} seed={config.seed}")
print()

curve, policy = train_toy_policy(config, universe)

print(f"{'steps':>11} | {'mean reward':>11} | {'extraneous':>10} | {'mean chars':>10}")
print("-" * 53)
for window in curve_stats(curve, window=200):
    span = f"{window.start}-{window.stop - 1}"
    print(
        f"{span:>11} | {window.reward_mean:>11.4f} | "
        f"{window.extraneous_rate:>10.4f} | {window.mean_completion_chars:>10.1f}"
    )

print()
print("Completion length falls with the extraneous rate: the chat wrapper and the")
print("extra call are the only sources of surplus characters.")

print()
print("What the trained policy emits for each query now:")
import numpy as np

rng = np.random.default_rng(7)
for index, template in enumerate(universe.templates):
    text, _ = policy.sample(index, rng)
    print(f"  {template.text}")
    print(f"    -> {text}")
