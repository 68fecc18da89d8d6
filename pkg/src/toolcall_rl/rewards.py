"""Reward composition for predicted tool calls.

Three weighted components: a flat credit for emitting one clean JSON payload,
a per-call credit for correctly predicted function names, and a per-call
argument agreement score.  Name and argument credit are scaled down when more
calls are predicted than expected, and the whole reward collapses to zero for
extraneous text, invalid JSON, or empty output.

Component arithmetic runs on exact rationals and converts to float only at
the boundary, so a perfect prediction scores exactly 1.0 under the default
weights and the zero rule has no tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .calls import Outcome, ToolCall, canonical_equal, parse_completion

__all__ = [
    "DEFAULT_WEIGHTS",
    "MatchReport",
    "RewardBreakdown",
    "RewardWeights",
    "compute_reward",
    "is_exact_match",
    "match_calls",
    "reward_batch",
]


@dataclass(frozen=True)
class RewardWeights:
    """Component weights.

    Defaults put half the credit on argument accuracy, which is the hardest
    sub-skill, and only a sliver on JSON validity.  Raising ``w_json`` back to
    0.5 (and shrinking the others) reproduces the early-curriculum setting
    where well-formed output is still the thing being learned.
    """

    w_json: float = 0.125
    w_fn: float = 0.375
    w_args: float = 0.5

    def __post_init__(self) -> None:
        for name in ("w_json", "w_fn", "w_args"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"{name} must be a number, got {value!r}")
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {value!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w_json, self.w_fn, self.w_args)


DEFAULT_WEIGHTS = RewardWeights()


@dataclass(frozen=True)
class MatchReport:
    """One-to-one pairing of predicted against expected calls.

    Pairs only calls with equal names; ``pairs`` holds
    ``(expected_index, predicted_index, agreement)`` triples where
    ``agreement`` is the exact fraction of expected argument keys whose
    predicted values match canonically (1 when the expected call takes no
    arguments).  ``scaling_factor`` is 1 unless more calls were predicted
    than expected.
    """

    n_expected: int
    n_predicted: int
    n_correct_functions: int
    pairs: tuple[tuple[int, int, Fraction], ...]
    scaling_factor: Fraction

    def agreement_total(self) -> Fraction:
        return sum((a for _, _, a in self.pairs), Fraction(0))


@dataclass(frozen=True)
class RewardBreakdown:
    """All reward components for one completion.

    ``r_final`` is always the float sum ``r_fn_scaled + r_args_scaled +
    r_json``, except for the hard zero on extraneous text, invalid JSON, and
    empty output.  ``match`` is present only when the completion parsed as a
    call list.
    """

    r_json: float
    r_fn: float
    r_args: float
    r_fn_scaled: float
    r_args_scaled: float
    r_final: float
    outcome: str
    match: MatchReport | None = None

    def to_dict(self) -> dict:
        payload: dict = {
            "r_json": self.r_json,
            "r_fn": self.r_fn,
            "r_args": self.r_args,
            "r_fn_scaled": self.r_fn_scaled,
            "r_args_scaled": self.r_args_scaled,
            "r_final": self.r_final,
            "outcome": self.outcome,
        }
        if self.match is not None:
            payload["match"] = {
                "n_expected": self.match.n_expected,
                "n_predicted": self.match.n_predicted,
                "n_correct_functions": self.match.n_correct_functions,
                "pairs": [[e, p, float(a)] for e, p, a in self.match.pairs],
                "scaling_factor": float(self.match.scaling_factor),
            }
        return payload


def _agreement(expected: ToolCall, predicted: ToolCall) -> Fraction:
    # Extra predicted keys are ignored; only expected keys are scored.
    if not expected.arguments:
        return Fraction(1)
    hits = sum(
        1
        for key, value in expected.arguments.items()
        if key in predicted.arguments and canonical_equal(predicted.arguments[key], value)
    )
    return Fraction(hits, len(expected.arguments))


# Above this many calls sharing one name, assignment falls back to greedy.
_EXHAUSTIVE_LIMIT = 6


def _best_assignment(matrix: list[list[Fraction]]) -> list[tuple[int, int]]:
    """Exhaustive search maximizing (total agreement, pair count).

    Branches are visited in lexicographic order of the resulting pair
    sequence, so keeping the first strict improvement makes ties resolve to
    the lexicographically smallest optimum.
    """
    n_rows, n_cols = len(matrix), len(matrix[0])
    best: list[tuple[int, int]] = []
    best_key = (Fraction(-1), -1)
    chosen: list[tuple[int, int]] = []
    col_used = [False] * n_cols

    def walk(row: int, total: Fraction) -> None:
        nonlocal best, best_key
        if row == n_rows:
            key = (total, len(chosen))
            if key > best_key:
                best_key = key
                best = list(chosen)
            return
        for col in range(n_cols):
            if col_used[col]:
                continue
            col_used[col] = True
            chosen.append((row, col))
            walk(row + 1, total + matrix[row][col])
            chosen.pop()
            col_used[col] = False
        walk(row + 1, total)  # leave this expected call unmatched

    walk(0, Fraction(0))
    return best


def _greedy_assignment(matrix: list[list[Fraction]]) -> list[tuple[int, int]]:
    n_rows, n_cols = len(matrix), len(matrix[0])
    ranked = sorted(
        ((-matrix[row][col], row, col) for row in range(n_rows) for col in range(n_cols))
    )
    row_used = [False] * n_rows
    col_used = [False] * n_cols
    picked: list[tuple[int, int]] = []
    for _, row, col in ranked:
        if row_used[row] or col_used[col]:
            continue
        row_used[row] = True
        col_used[col] = True
        picked.append((row, col))
    picked.sort()
    return picked


def match_calls(expected: list[ToolCall], predicted: list[ToolCall]) -> MatchReport:
    """Pair predicted calls with expected calls for best-case credit.

    The assignment maximizes total argument agreement, then the number of
    pairs (a correctly named call with wrong arguments still counts as a
    correct name), with ties broken toward the lexicographically smallest
    (expected index, predicted index) sequence.  Name groups are independent,
    searched exhaustively up to six calls per side and greedily beyond.
    """
    by_name: dict[str, tuple[list[int], list[int]]] = {}
    for i, call in enumerate(expected):
        by_name.setdefault(call.name, ([], []))[0].append(i)
    for j, call in enumerate(predicted):
        by_name.setdefault(call.name, ([], []))[1].append(j)

    pairs: list[tuple[int, int, Fraction]] = []
    for exp_idx, pred_idx in by_name.values():
        if not exp_idx or not pred_idx:
            continue
        matrix = [[_agreement(expected[i], predicted[j]) for j in pred_idx] for i in exp_idx]
        if max(len(exp_idx), len(pred_idx)) <= _EXHAUSTIVE_LIMIT:
            local = _best_assignment(matrix)
        else:
            local = _greedy_assignment(matrix)
        pairs.extend((exp_idx[row], pred_idx[col], matrix[row][col]) for row, col in local)
    pairs.sort(key=lambda pair: (pair[0], pair[1]))

    n_expected, n_predicted = len(expected), len(predicted)
    if n_predicted > n_expected:
        scaling = Fraction(max(n_expected, 1), n_predicted)
    else:
        scaling = Fraction(1)
    return MatchReport(n_expected, n_predicted, len(pairs), tuple(pairs), scaling)


_ZERO_OUTCOMES = (Outcome.EXTRANEOUS_TEXT, Outcome.INVALID_JSON, Outcome.EMPTY)


def compute_reward(
    raw: str,
    expected: list[ToolCall],
    weights: RewardWeights = DEFAULT_WEIGHTS,
) -> RewardBreakdown:
    """Score one raw completion against the expected call list.

    Extraneous text, invalid JSON, and empty output are hard zeroes.  A
    parseable payload that is not a call list earns the JSON credit alone.
    Otherwise name and argument credit accrue per matched call, scaled down
    by expected/predicted when the model over-generates.  An empty expected
    list answered with an empty call list is a perfect response and earns
    full name and argument credit.
    """
    outcome = parse_completion(raw)
    if outcome.kind in _ZERO_OUTCOMES:
        return RewardBreakdown(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, outcome.kind.value)

    w_json = Fraction(weights.w_json)
    if outcome.kind is Outcome.NON_CONFORMING:
        r_json = float(w_json)
        return RewardBreakdown(r_json, 0.0, 0.0, 0.0, 0.0, r_json, outcome.kind.value)

    report = match_calls(expected, list(outcome.calls))
    w_fn = Fraction(weights.w_fn)
    w_args = Fraction(weights.w_args)
    if report.n_expected == 0 and report.n_predicted == 0:
        r_fn = w_fn
        r_args = w_args
    else:
        denom = max(report.n_expected, 1)
        r_fn = w_fn * report.n_correct_functions / denom
        r_args = w_args * report.agreement_total() / denom
    r_fn_scaled = r_fn * report.scaling_factor
    r_args_scaled = r_args * report.scaling_factor

    r_json_f = float(w_json)
    r_fn_scaled_f = float(r_fn_scaled)
    r_args_scaled_f = float(r_args_scaled)
    return RewardBreakdown(
        r_json=r_json_f,
        r_fn=float(r_fn),
        r_args=float(r_args),
        r_fn_scaled=r_fn_scaled_f,
        r_args_scaled=r_args_scaled_f,
        r_final=r_fn_scaled_f + r_args_scaled_f + r_json_f,
        outcome=outcome.kind.value,
        match=report,
    )


def is_exact_match(breakdown: RewardBreakdown) -> bool:
    """True when every expected call was matched perfectly with no extras.

    Equivalent to ``r_final == 1.0`` under the default weights, and
    independent of the weights the breakdown was computed with.
    """
    report = breakdown.match
    if breakdown.outcome != Outcome.CALLS.value or report is None:
        return False
    return (
        report.n_expected == report.n_predicted == report.n_correct_functions
        and report.agreement_total() == report.n_expected
    )


def reward_batch(
    raws: list[str],
    expected: list[list[ToolCall]],
    weights: RewardWeights = DEFAULT_WEIGHTS,
) -> list[RewardBreakdown]:
    """Element-wise compute_reward, order preserving."""
    if len(raws) != len(expected):
        raise ValueError(
            f"size mismatch: {len(raws)} completions vs {len(expected)} answer lists"
        )
    return [compute_reward(raw, answer, weights) for raw, answer in zip(raws, expected)]
