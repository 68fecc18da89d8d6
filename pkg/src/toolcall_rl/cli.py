"""Command-line surface: score, evaluate, gen-synth, train-toy, report.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .calls import call_from_dict
from .grpo import TrainerConfig, TrainingCurve, curve_stats, train_toy_policy
from .harness import (
    EvalReport,
    emit_report,
    evaluate,
    load_completions,
    load_dataset,
    split_sample,
)
from .rewards import RewardWeights, compute_reward
from .synth import generate_universe, plant_corpus


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _parse_weights(text: str) -> RewardWeights:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--weights expects w_json,w_fn,w_args, got {text!r}")
    try:
        w_json, w_fn, w_args = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--weights values must be numbers, got {text!r}") from None
    return RewardWeights(w_json=w_json, w_fn=w_fn, w_args=w_args)


def _parse_expected(text: str) -> list:
    payload = json.loads(text)
    if not isinstance(payload, list):
        raise ValueError("expected answer must be a JSON array of call objects")
    return [call_from_dict(item) for item in payload]


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8", errors="replace")


def _write_or_print(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _cmd_score(args: argparse.Namespace) -> int:
    weights = _parse_weights(args.weights)
    if args.batch:
        for line_no, line in enumerate(_read_text(args.batch).splitlines(), start=1):
            if not line.strip():
                continue
            row = json.loads(line)
            if not isinstance(row, dict) or "completion" not in row or "answers" not in row:
                raise ValueError(f"batch line {line_no}: need 'completion' and 'answers'")
            answers = row["answers"]
            if isinstance(answers, str):
                answers = json.loads(answers)
            expected = [call_from_dict(item) for item in answers]
            breakdown = compute_reward(row["completion"], expected, weights)
            print(json.dumps(breakdown.to_dict(), sort_keys=True))
        return 0

    if args.completion is not None:
        raw = args.completion
    elif args.completion_file:
        raw = _read_text(args.completion_file)
    else:
        raise UsageError("provide --completion or --completion-file")
    if args.expected is not None:
        expected = _parse_expected(args.expected)
    elif args.expected_file:
        expected = _parse_expected(_read_text(args.expected_file))
    else:
        raise UsageError("provide --expected or --expected-file")
    breakdown = compute_reward(raw, expected, weights)
    print(json.dumps(breakdown.to_dict(), sort_keys=True, indent=2))
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    weights = _parse_weights(args.weights)
    malformed: list[str] = []
    records = load_dataset(args.dataset, fmt=args.dataset_format, malformed=malformed)
    if malformed:
        print(f"malformed records skipped: {len(malformed)}", file=sys.stderr)
        for message in malformed:
            print(f"  {message}", file=sys.stderr)
    if args.train_n is not None or args.test_n is not None:
        train_n = args.train_n or 0
        test_n = args.test_n if args.test_n is not None else len(records) - train_n
        _, records = split_sample(records, train_n, test_n, args.seed)
    completions = load_completions(args.completions)
    report = evaluate(records, completions, weights, lenient_validity=args.lenient_validity)
    _write_or_print(emit_report(report, fmt=args.format), args.out)
    return 0


def _cmd_gen_synth(args: argparse.Namespace) -> int:
    universe = generate_universe(
        seed=args.universe_seed,
        n_tools=args.n_tools,
        max_params=args.max_params,
        pool_size=args.pool_size,
    )
    error_mix = json.loads(args.error_mix)
    if not isinstance(error_mix, dict):
        raise ValueError("--error-mix must be a JSON object of tag fractions")
    corpus = plant_corpus(universe, seed=args.seed, n_records=args.n_records, error_mix=error_mix)
    corpus.write(args.out_dataset, args.out_completions)
    print(json.dumps({"n_records": args.n_records, "rates": corpus.rates}, sort_keys=True))
    return 0


def _cmd_train_toy(args: argparse.Namespace) -> int:
    config = TrainerConfig(
        group_size=args.group_size,
        learning_rate=args.lr,
        max_steps=args.steps,
        seed=args.seed,
        weights=_parse_weights(args.weights),
    )
    universe = generate_universe(
        seed=args.universe_seed,
        n_tools=args.n_tools,
        max_params=args.max_params,
        pool_size=args.pool_size,
    )
    curve, _ = train_toy_policy(config, universe)
    if args.curve_out:
        curve.to_csv(args.curve_out)
    windows = curve_stats(curve, window=args.window)
    first, last = windows[0], windows[-1]
    print(
        json.dumps(
            {
                "steps": len(curve),
                "first_window_mean_reward": first.reward_mean,
                "final_window_mean_reward": last.reward_mean,
                "final_window_extraneous_rate": last.extraneous_rate,
                "final_window_mean_completion_chars": last.mean_completion_chars,
            },
            sort_keys=True,
        )
    )
    return 0


def _render_windows(windows, fmt: str) -> str:
    if fmt == "json":
        rows = [vars(w) for w in windows]
        return json.dumps(rows, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        lines = ["start,stop,reward_mean,reward_min,reward_max,extraneous_rate,mean_completion_chars"]
        for w in windows:
            lines.append(
                f"{w.start},{w.stop},{w.reward_mean!r},{w.reward_min!r},"
                f"{w.reward_max!r},{w.extraneous_rate!r},{w.mean_completion_chars!r}"
            )
        return "\n".join(lines) + "\n"
    header = (
        f"| {'steps':>11} | {'reward mean':>11} | {'reward min':>10} | "
        f"{'reward max':>10} | {'extraneous':>10} | {'mean chars':>10} |"
    )
    lines = [header, "|" + "-" * (len(header) - 2) + "|"]
    for w in windows:
        span = f"{w.start}-{w.stop - 1}"
        lines.append(
            f"| {span:>11} | {w.reward_mean:>11.4f} | {w.reward_min:>10.4f} | "
            f"{w.reward_max:>10.4f} | {w.extraneous_rate:>10.4f} | {w.mean_completion_chars:>10.2f} |"
        )
    return "\n".join(lines) + "\n"


def _cmd_report(args: argparse.Namespace) -> int:
    if (args.curve is None) == (args.eval is None):
        raise UsageError("provide exactly one of --curve or --eval")
    if args.curve:
        curve = TrainingCurve.from_csv(args.curve)
        text = _render_windows(curve_stats(curve, window=args.window), args.format)
    else:
        payload = json.loads(_read_text(args.eval))
        report = EvalReport.from_dict(payload)
        text = emit_report(report, fmt=args.format)
    _write_or_print(text, args.out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="toolcall-rl", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_weights(p):
        p.add_argument("--weights", default="0.125,0.375,0.5", help="w_json,w_fn,w_args")

    p = sub.add_parser("score", help="score one completion against one expected answer")
    p.add_argument("--completion", help="raw completion text")
    p.add_argument("--completion-file", help="file holding the raw completion")
    p.add_argument("--expected", help="expected answer as a JSON array of call objects")
    p.add_argument("--expected-file", help="file holding the expected answer array")
    p.add_argument("--batch", help="JSONL of {completion, answers} rows; one result per line")
    add_weights(p)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("evaluate", help="score a completions file against a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--completions", required=True, help="JSONL of {id, completion}")
    p.add_argument("--dataset-format", default="auto", choices=["auto", "jsonl", "json"])
    p.add_argument("--format", default="table", choices=["table", "json", "csv"])
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--train-n", type=int, default=None)
    p.add_argument("--test-n", type=int, default=None, help="evaluate only this held-out slice")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lenient-validity", action="store_true",
                   help="count JSON embedded in extraneous text as valid (comparison only)")
    add_weights(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("gen-synth", help="generate a synthetic corpus with planted errors")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--universe-seed", type=int, default=0)
    p.add_argument("--n-tools", type=int, default=4)
    p.add_argument("--max-params", type=int, default=2)
    p.add_argument("--pool-size", type=int, default=3)
    p.add_argument("--n-records", type=int, required=True)
    p.add_argument("--error-mix", default="{}", help='JSON object, e.g. {"extraneous-text": 0.1}')
    p.add_argument("--out-dataset", required=True)
    p.add_argument("--out-completions", required=True)
    p.set_defaults(func=_cmd_gen_synth)

    p = sub.add_parser("train-toy", help="run the deterministic toy trainer")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--group-size", type=int, default=8)
    p.add_argument("--lr", type=float, default=0.015)
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--universe-seed", type=int, default=0)
    p.add_argument("--n-tools", type=int, default=4)
    p.add_argument("--max-params", type=int, default=2)
    p.add_argument("--pool-size", type=int, default=3)
    p.add_argument("--curve-out", help="write the per-step curve CSV here")
    add_weights(p)
    p.set_defaults(func=_cmd_train_toy)

    p = sub.add_parser("report", help="render a curve CSV or an evaluation report")
    p.add_argument("--curve", help="curve CSV from train-toy")
    p.add_argument("--eval", help="JSON report from evaluate --format json")
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--format", default="table", choices=["table", "json", "csv"])
    p.add_argument("--out")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("no command given (try --help)")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
