import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

SRC = Path(__file__).resolve().parents[1] / "src"
GOLDEN_EXPECTED = (
    '[{"name":"qr_code_image","arguments":{"size":7,"url":"example.com"}},'
    '{"name":"ec","arguments":{"password":"Secure123","penalty":0.3,"format":"json"}}]'
)
GOLDEN_BASE = (
    '[{"name":"qr_code_image_generator","arguments":{"url":"example.com"}},'
    '{"name":"ec","arguments":{"password":"Secure123","penalty":0.3,"format":"json"}}]'
)


def run_cli(*args: str, expect: int = 0) -> subprocess.CompletedProcess:
    env = dict(os.environ)
    env["PYTHONPATH"] = str(SRC) + os.pathsep + env.get("PYTHONPATH", "")
    proc = subprocess.run(
        [sys.executable, "-m", "toolcall_rl", *args],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode == expect, f"exit {proc.returncode}: {proc.stderr}\n{proc.stdout}"
    return proc


def test_version():
    proc = run_cli("--version")
    assert proc.stdout.strip() == "0.1.0"


def test_score_golden_pair():
    proc = run_cli("score", "--completion", GOLDEN_BASE, "--expected", GOLDEN_EXPECTED)
    payload = json.loads(proc.stdout)
    assert payload["r_json"] == 0.125
    assert payload["r_fn"] == 0.1875
    assert payload["r_args"] == 0.25
    assert payload["r_final"] == 0.5625
    assert payload["outcome"] == "calls"
    assert payload["match"]["scaling_factor"] == 1.0


def test_score_perfect_and_extraneous():
    proc = run_cli("score", "--completion", GOLDEN_EXPECTED, "--expected", GOLDEN_EXPECTED)
    assert json.loads(proc.stdout)["r_final"] == 1.0
    proc = run_cli(
        "score", "--completion", "Note: " + GOLDEN_EXPECTED, "--expected", GOLDEN_EXPECTED
    )
    assert json.loads(proc.stdout)["r_final"] == 0.0


def test_score_custom_weights():
    proc = run_cli(
        "score",
        "--completion",
        '{"answer": 1}',
        "--expected",
        "[]",
        "--weights",
        "0.5,0.375,0.125",
    )
    assert json.loads(proc.stdout)["r_final"] == 0.5


def test_score_from_files(tmp_path):
    completion = tmp_path / "completion.txt"
    completion.write_text(GOLDEN_BASE)
    expected = tmp_path / "expected.json"
    expected.write_text(GOLDEN_EXPECTED)
    proc = run_cli(
        "score", "--completion-file", str(completion), "--expected-file", str(expected)
    )
    assert json.loads(proc.stdout)["r_final"] == 0.5625


def test_score_batch_preserves_order(tmp_path):
    batch = tmp_path / "batch.jsonl"
    rows = [
        {"completion": GOLDEN_BASE, "answers": json.loads(GOLDEN_EXPECTED)},
        {"completion": "junk", "answers": json.loads(GOLDEN_EXPECTED)},
        {"completion": "[]", "answers": []},
    ]
    batch.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    proc = run_cli("score", "--batch", str(batch))
    finals = [json.loads(line)["r_final"] for line in proc.stdout.strip().splitlines()]
    assert finals == [0.5625, 0.0, 1.0]


def test_exit_codes():
    run_cli("no-such-command", expect=1)
    run_cli("score", "--expected", "[]", expect=1)  # no completion source
    run_cli(
        "score", "--completion-file", "/definitely/missing.txt", "--expected", "[]", expect=2
    )
    run_cli("score", "--completion", "[]", "--expected", "{not json", expect=3)
    run_cli("score", "--completion", "[]", "--expected", '[{"oops": 1}]', expect=3)
    run_cli("score", "--completion", "[]", "--expected", "[]", "--weights", "1,2", expect=1)
    run_cli(expect=1)  # no command


def test_gen_synth_then_evaluate_end_to_end(tmp_path):
    dataset = tmp_path / "ds.jsonl"
    completions = tmp_path / "comp.jsonl"
    proc = run_cli(
        "gen-synth",
        "--n-records",
        "200",
        "--error-mix",
        '{"invalid-json": 0.1, "extraneous-text": 0.1, "wrong-name": 0.2}',
        "--out-dataset",
        str(dataset),
        "--out-completions",
        str(completions),
    )
    rates = json.loads(proc.stdout)["rates"]
    assert rates["invalid-json"] == 0.1
    assert rates["perfect"] == 0.6

    report_path = tmp_path / "report.json"
    run_cli(
        "evaluate",
        "--dataset",
        str(dataset),
        "--completions",
        str(completions),
        "--format",
        "json",
        "--out",
        str(report_path),
    )
    report = json.loads(report_path.read_text())
    assert report["n_records"] == 200
    assert report["json_validity"] == 0.8
    assert report["overall_accuracy"] == 0.6

    proc = run_cli("report", "--eval", str(report_path), "--format", "table")
    assert "JSON Validity" in proc.stdout
    assert "Overall Accuracy" in proc.stdout
    assert "80.00%" in proc.stdout


def test_evaluate_table_to_stdout(tmp_path):
    dataset = tmp_path / "ds.jsonl"
    completions = tmp_path / "comp.jsonl"
    run_cli(
        "gen-synth", "--n-records", "10", "--error-mix", "{}",
        "--out-dataset", str(dataset), "--out-completions", str(completions),
    )
    proc = run_cli("evaluate", "--dataset", str(dataset), "--completions", str(completions))
    assert "100.00%" in proc.stdout


def test_evaluate_with_split(tmp_path):
    dataset = tmp_path / "ds.jsonl"
    completions = tmp_path / "comp.jsonl"
    run_cli(
        "gen-synth", "--n-records", "50", "--error-mix", "{}",
        "--out-dataset", str(dataset), "--out-completions", str(completions),
    )
    proc = run_cli(
        "evaluate", "--dataset", str(dataset), "--completions", str(completions),
        "--train-n", "40", "--test-n", "10", "--seed", "7", "--format", "json",
    )
    report = json.loads(proc.stdout)
    assert report["n_records"] == 10


def test_train_toy_writes_curve_and_report_renders(tmp_path):
    curve_path = tmp_path / "curve.csv"
    proc = run_cli(
        "train-toy", "--steps", "40", "--window", "20", "--curve-out", str(curve_path)
    )
    summary = json.loads(proc.stdout)
    assert summary["steps"] == 40
    lines = curve_path.read_text().strip().splitlines()
    assert len(lines) == 41  # header + one row per step
    assert lines[0] == "step,mean_reward,extraneous_rate,mean_completion_chars"

    proc = run_cli("report", "--curve", str(curve_path), "--window", "20")
    assert "reward mean" in proc.stdout
    proc = run_cli("report", "--curve", str(curve_path), "--format", "csv")
    assert proc.stdout.startswith("start,stop,reward_mean")


def test_report_requires_exactly_one_input(tmp_path):
    run_cli("report", expect=1)
    curve = tmp_path / "c.csv"
    curve.write_text("step,mean_reward,extraneous_rate,mean_completion_chars\n0,1.0,0.0,2.0\n")
    run_cli("report", "--curve", str(curve), "--eval", str(curve), expect=1)


def test_gen_synth_validation_errors(tmp_path):
    run_cli(
        "gen-synth", "--n-records", "10", "--error-mix", '{"wrong-name": 2.0}',
        "--out-dataset", str(tmp_path / "d"), "--out-completions", str(tmp_path / "c"),
        expect=3,
    )
