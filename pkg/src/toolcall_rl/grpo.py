"""Group-relative advantages and a deterministic toy policy-gradient trainer.

The advantage of a completion is its reward standardized against the mean and
population standard deviation of its sample group, which stands in for a
learned critic.  The toy trainer drives that signal end to end without any
language model: a tabular policy holds categorical logits per query template
covering every way the generator can err (extraneous text, wrong tool name,
wrong argument values, an extra call), samples a group per step, scores it
with the tool-call reward, and ascends plain REINFORCE on the logits.  No KL
term and no clipping; the reward alone does the shaping.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .calls import Outcome, ToolCall, serialize_calls
from .rewards import RewardWeights, reward_batch
from .synth import SynthUniverse, default_universe

__all__ = [
    "GroupSample",
    "ToyPolicy",
    "TrainerConfig",
    "TrainingCurve",
    "WindowStats",
    "curve_stats",
    "group_advantages",
    "train_toy_policy",
]

_STD_FLOOR = 1e-8


def group_advantages(rewards: Sequence[float]) -> np.ndarray:
    """Standardize rewards within one sample group.

    Returns (r - mean) / population std, or all zeros when the group is flat
    (std below 1e-8), so a degenerate group produces no learning signal
    instead of a division blow-up.
    """
    values = np.asarray(rewards, dtype=np.float64)
    if values.ndim != 1 or values.size < 2:
        raise ValueError(f"need a 1-d group of at least 2 rewards, got shape {values.shape}")
    std = float(values.std())
    if std < _STD_FLOOR:
        return np.zeros_like(values)
    return (values - values.mean()) / std


@dataclass(frozen=True)
class GroupSample:
    """One query's sampled group: completions, rewards, and their advantages."""

    query_id: int | str
    completions: tuple[str, ...]
    rewards: tuple[float, ...]
    advantages: tuple[float, ...]

    @classmethod
    def from_rewards(
        cls, query_id: int | str, completions: Sequence[str], rewards: Sequence[float]
    ) -> "GroupSample":
        if len(completions) != len(rewards):
            raise ValueError("completions and rewards must have equal length")
        advantages = group_advantages(rewards)
        return cls(
            query_id=query_id,
            completions=tuple(completions),
            rewards=tuple(float(r) for r in rewards),
            advantages=tuple(float(a) for a in advantages),
        )


@dataclass(frozen=True)
class TrainerConfig:
    group_size: int = 8
    learning_rate: float = 0.015
    max_steps: int = 2000
    seed: int = 42
    weights: RewardWeights = field(default_factory=RewardWeights)

    def __post_init__(self) -> None:
        if self.group_size < 2:
            raise ValueError(f"group_size must be at least 2, got {self.group_size}")
        # Zero is allowed so a no-update control run stays expressible.
        if not self.learning_rate >= 0:
            raise ValueError(f"learning_rate must be non-negative, got {self.learning_rate}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be positive, got {self.max_steps}")
        if self.seed < 0:
            raise ValueError(f"seed must be unsigned, got {self.seed}")


_EXTRANEOUS_PREFIX = "Sure! "


class ToyPolicy:
    """Tabular softmax policy over synthetic tool-call completions.

    Each query template owns independent categorical heads: an
    emit-extraneous-text flag, a call-count choice (the expected single call
    or one extra), a tool-name choice over the whole universe, and one value
    choice per argument slot drawn from that parameter's value pool.  All
    logits start at zero, so every error mode begins uniformly likely.
    """

    def __init__(
        self,
        universe: SynthUniverse,
        *,
        emit_extraneous: bool = True,
        emit_extra_calls: bool = True,
    ) -> None:
        if not universe.templates:
            raise ValueError("universe has no query templates")
        self.universe = universe
        self.emit_extraneous = emit_extraneous
        self.emit_extra_calls = emit_extra_calls
        self.tables: list[dict[str, np.ndarray]] = []
        for template in universe.templates:
            call = template.answers[0]
            heads: dict[str, np.ndarray] = {}
            if emit_extraneous:
                heads["extraneous"] = np.zeros(2)
            if emit_extra_calls:
                heads["count"] = np.zeros(2)
            heads["name"] = np.zeros(len(universe.tools))
            for param in call.arguments:
                pool = universe.pools[(call.name, param)]
                heads[f"arg:{param}"] = np.zeros(len(pool))
            self.tables.append(heads)

    @staticmethod
    def _softmax(logits: np.ndarray) -> np.ndarray:
        shifted = logits - logits.max()
        weights = np.exp(shifted)
        return weights / weights.sum()

    def probabilities(self, template_index: int) -> dict[str, np.ndarray]:
        return {key: self._softmax(logits) for key, logits in self.tables[template_index].items()}

    def sample(
        self, template_index: int, rng: np.random.Generator
    ) -> tuple[str, list[tuple[str, int]]]:
        """Draw one completion; returns (text, the categorical decisions taken)."""
        template = self.universe.templates[template_index]
        call = template.answers[0]
        heads = self.tables[template_index]
        decisions: list[tuple[str, int]] = []

        def draw(key: str) -> int:
            probs = self._softmax(heads[key])
            choice = int(rng.choice(len(probs), p=probs))
            decisions.append((key, choice))
            return choice

        extraneous = draw("extraneous") if self.emit_extraneous else 0
        count = draw("count") + 1 if self.emit_extra_calls else 1
        calls = []
        for _ in range(count):
            name = self.universe.tools[draw("name")].name
            arguments = {
                param: self.universe.pools[(call.name, param)][draw(f"arg:{param}")]
                for param in call.arguments
            }
            calls.append(ToolCall(name, arguments))
        text = serialize_calls(calls)
        if extraneous:
            text = _EXTRANEOUS_PREFIX + text
        return text, decisions


@dataclass(frozen=True)
class TrainingCurve:
    """Per-step aggregates of one training run."""

    mean_reward: np.ndarray
    extraneous_rate: np.ndarray
    mean_completion_chars: np.ndarray

    def __len__(self) -> int:
        return len(self.mean_reward)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["step", "mean_reward", "extraneous_rate", "mean_completion_chars"])
            for step in range(len(self)):
                writer.writerow(
                    [
                        step,
                        repr(float(self.mean_reward[step])),
                        repr(float(self.extraneous_rate[step])),
                        repr(float(self.mean_completion_chars[step])),
                    ]
                )

    @classmethod
    def from_csv(cls, path: str | Path) -> "TrainingCurve":
        rewards: list[float] = []
        extraneous: list[float] = []
        chars: list[float] = []
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            required = {"step", "mean_reward", "extraneous_rate", "mean_completion_chars"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise ValueError(f"curve file must have columns {sorted(required)}")
            for row in reader:
                rewards.append(float(row["mean_reward"]))
                extraneous.append(float(row["extraneous_rate"]))
                chars.append(float(row["mean_completion_chars"]))
        return cls(np.array(rewards), np.array(extraneous), np.array(chars))


def train_toy_policy(
    config: TrainerConfig,
    universe: SynthUniverse | None = None,
    policy: ToyPolicy | None = None,
) -> tuple[TrainingCurve, ToyPolicy]:
    """Run the toy trainer and return its curve plus the final policy.

    Each step samples one template, draws ``group_size`` completions, scores
    them, standardizes rewards within the group, and nudges every categorical
    decision's logits by advantage times the softmax score gradient.  Fully
    deterministic for a given config and universe.
    """
    if universe is None:
        universe = default_universe()
    if policy is None:
        policy = ToyPolicy(universe)
    rng = np.random.default_rng(config.seed)
    n_templates = len(policy.tables)

    mean_rewards = np.zeros(config.max_steps)
    extraneous_rates = np.zeros(config.max_steps)
    mean_chars = np.zeros(config.max_steps)

    for step in range(config.max_steps):
        template_index = int(rng.integers(n_templates))
        template = universe.templates[template_index]
        samples = [policy.sample(template_index, rng) for _ in range(config.group_size)]
        completions = [text for text, _ in samples]
        breakdowns = reward_batch(
            completions, [list(template.answers)] * config.group_size, config.weights
        )
        rewards = [b.r_final for b in breakdowns]
        group = GroupSample.from_rewards(template_index, completions, rewards)

        heads = policy.tables[template_index]
        probs = {key: ToyPolicy._softmax(logits) for key, logits in heads.items()}
        grads = {key: np.zeros_like(logits) for key, logits in heads.items()}
        for (_, decisions), advantage in zip(samples, group.advantages):
            if advantage == 0.0:
                continue
            for key, choice in decisions:
                grad = -probs[key].copy()
                grad[choice] += 1.0
                grads[key] += advantage * grad
        for key, grad in grads.items():
            heads[key] += config.learning_rate * grad

        mean_rewards[step] = np.mean(rewards)
        extraneous_rates[step] = np.mean(
            [b.outcome == Outcome.EXTRANEOUS_TEXT.value for b in breakdowns]
        )
        mean_chars[step] = np.mean([len(text) for text in completions])

    return TrainingCurve(mean_rewards, extraneous_rates, mean_chars), policy


@dataclass(frozen=True)
class WindowStats:
    start: int
    stop: int
    reward_mean: float
    reward_min: float
    reward_max: float
    extraneous_rate: float
    mean_completion_chars: float


def curve_stats(curve: TrainingCurve, window: int = 100) -> list[WindowStats]:
    """Windowed aggregates of a training curve.

    A window larger than the curve collapses to a single window over all
    steps; a trailing partial window is kept.
    """
    n_steps = len(curve)
    if n_steps == 0:
        raise ValueError("curve is empty")
    if window < 1:
        raise ValueError(f"window must be positive, got {window}")
    window = min(window, n_steps)
    stats: list[WindowStats] = []
    for start in range(0, n_steps, window):
        stop = min(start + window, n_steps)
        rewards = curve.mean_reward[start:stop]
        stats.append(
            WindowStats(
                start=start,
                stop=stop,
                reward_mean=float(rewards.mean()),
                reward_min=float(rewards.min()),
                reward_max=float(rewards.max()),
                extraneous_rate=float(curve.extraneous_rate[start:stop].mean()),
                mean_completion_chars=float(curve.mean_completion_chars[start:stop].mean()),
            )
        )
    return stats
