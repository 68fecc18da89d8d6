"""Dataset ingestion, split sampling, batch scoring, and report emission.

Records follow the common function-calling dataset shape: an integer id, a
natural-language query, the expected answer call list, and the catalog of
available tools.  The ``answers`` and ``tools`` fields are accepted either as
in-line JSON values or as JSON-encoded strings, since public datasets ship
them stringified.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .calls import JsonValue, Outcome, ParamSpec, ToolCall, ToolSpec, call_from_dict
from .rewards import RewardBreakdown, RewardWeights, compute_reward, is_exact_match

__all__ = [
    "DatasetRecord",
    "EvalReport",
    "RecordResult",
    "emit_report",
    "evaluate",
    "load_completions",
    "load_dataset",
    "record_from_dict",
    "record_to_dict",
    "split_sample",
    "write_completions",
    "write_records",
]


@dataclass(frozen=True)
class DatasetRecord:
    id: int
    query: str
    answers: list[ToolCall]
    tools: list[ToolSpec]


def _decode_field(value: JsonValue, name: str) -> JsonValue:
    if isinstance(value, str):
        try:
            value = json.loads(value)
        except ValueError as exc:
            raise ValueError(f"field {name!r} is not decodable JSON: {exc}") from exc
    return value


def _tool_from_dict(item: JsonValue) -> ToolSpec:
    if not isinstance(item, dict) or not isinstance(item.get("name"), str) or not item["name"]:
        raise ValueError("tool entry must be an object with a non-empty 'name'")
    parameters: dict[str, ParamSpec] = {}
    raw_params = item.get("parameters", {})
    if not isinstance(raw_params, dict):
        raise ValueError("tool 'parameters' must be an object")
    for key, spec in raw_params.items():
        if not isinstance(spec, dict):
            raise ValueError(f"parameter {key!r} must be an object")
        type_tag = str(spec.get("type", "string"))
        if "required" in spec:
            required = bool(spec["required"])
        else:
            # Public catalogs mark optional parameters inside the type string.
            required = "optional" not in type_tag
        parameters[key] = ParamSpec(
            type=type_tag,
            required=required,
            description=str(spec.get("description", "")),
        )
    return ToolSpec(
        name=item["name"],
        description=str(item.get("description", "")),
        parameters=parameters,
    )


def record_from_dict(item: JsonValue) -> DatasetRecord:
    """Decode one dataset row, tolerating stringified answers/tools."""
    if not isinstance(item, dict):
        raise ValueError("record must be an object")
    for required in ("id", "query", "answers", "tools"):
        if required not in item:
            raise ValueError(f"record is missing required field {required!r}")
    record_id = item["id"]
    if isinstance(record_id, bool) or not isinstance(record_id, int):
        raise ValueError(f"record id must be an integer, got {record_id!r}")
    query = item["query"]
    if not isinstance(query, str):
        raise ValueError("record 'query' must be a string")
    answers = _decode_field(item["answers"], "answers")
    if not isinstance(answers, list):
        raise ValueError("record 'answers' must be an array")
    tools = _decode_field(item["tools"], "tools")
    if not isinstance(tools, list):
        raise ValueError("record 'tools' must be an array")
    return DatasetRecord(
        id=record_id,
        query=query,
        answers=[call_from_dict(entry) for entry in answers],
        tools=[_tool_from_dict(entry) for entry in tools],
    )


def record_to_dict(record: DatasetRecord) -> dict:
    return {
        "id": record.id,
        "query": record.query,
        "answers": [call.to_dict() for call in record.answers],
        "tools": [tool.to_dict() for tool in record.tools],
    }


def load_dataset(
    path: str | Path,
    fmt: str = "auto",
    malformed: list[str] | None = None,
) -> list[DatasetRecord]:
    """Load records from a JSON-lines file or a single JSON array.

    Malformed rows are skipped; pass a list as ``malformed`` to collect one
    message per skipped row (with its line number or array index).
    """
    if fmt not in ("auto", "jsonl", "json", "json-lines", "single-json-array"):
        raise ValueError(f"unknown dataset format {fmt!r}")
    text = Path(path).read_text(encoding="utf-8")
    if fmt == "auto":
        head = text.lstrip()[:1]
        fmt = "json" if head == "[" else "jsonl"
    sink = malformed if malformed is not None else []

    records: list[DatasetRecord] = []
    if fmt in ("json", "single-json-array"):
        payload = json.loads(text) if text.strip() else []
        if not isinstance(payload, list):
            raise ValueError("dataset file is not a JSON array")
        for index, item in enumerate(payload):
            try:
                records.append(record_from_dict(item))
            except ValueError as exc:
                sink.append(f"index {index}: {exc}")
    else:
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(record_from_dict(json.loads(line)))
            except ValueError as exc:
                sink.append(f"line {line_no}: {exc}")
    return records


def write_records(records: Iterable[DatasetRecord], path: str | Path, fmt: str = "jsonl") -> None:
    if fmt not in ("jsonl", "json"):
        raise ValueError(f"unknown dataset format {fmt!r}")
    rows = [record_to_dict(record) for record in records]
    with open(path, "w", encoding="utf-8") as handle:
        if fmt == "json":
            json.dump(rows, handle, ensure_ascii=False, indent=2)
            handle.write("\n")
        else:
            for row in rows:
                handle.write(json.dumps(row, ensure_ascii=False) + "\n")


def load_completions(path: str | Path, malformed: list[str] | None = None) -> dict[int, str]:
    """Load a JSON-lines file of {id, completion} rows; extra keys are ignored."""
    sink = malformed if malformed is not None else []
    completions: dict[int, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            if not isinstance(row, dict) or "id" not in row or "completion" not in row:
                raise ValueError("row must be an object with 'id' and 'completion'")
            record_id = row["id"]
            if isinstance(record_id, bool) or not isinstance(record_id, int):
                raise ValueError(f"id must be an integer, got {record_id!r}")
            if not isinstance(row["completion"], str):
                raise ValueError("completion must be a string")
            completions[record_id] = row["completion"]
        except ValueError as exc:
            sink.append(f"line {line_no}: {exc}")
    return completions


def write_completions(
    completions: Mapping[int, str],
    path: str | Path,
    tags: Mapping[int, str] | None = None,
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record_id, completion in completions.items():
            row: dict = {"id": record_id, "completion": completion}
            if tags is not None and record_id in tags:
                row["tag"] = tags[record_id]
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")


def split_sample(
    records: list[DatasetRecord], train_n: int, test_n: int, seed: int
) -> tuple[list[DatasetRecord], list[DatasetRecord]]:
    """Draw disjoint, seed-reproducible train/test subsets."""
    if train_n < 0 or test_n < 0:
        raise ValueError("split sizes must be non-negative")
    if train_n + test_n > len(records):
        raise ValueError(
            f"cannot draw {train_n} train + {test_n} test from {len(records)} records"
        )
    indices = list(range(len(records)))
    random.Random(seed).shuffle(indices)
    train = [records[i] for i in indices[:train_n]]
    test = [records[i] for i in indices[train_n : train_n + test_n]]
    return train, test


@dataclass(frozen=True)
class RecordResult:
    id: int
    outcome: str
    r_final: float
    exact: bool
    completion_chars: int
    missing: bool

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "outcome": self.outcome,
            "r_final": self.r_final,
            "exact": self.exact,
            "completion_chars": self.completion_chars,
            "missing": self.missing,
        }


@dataclass(frozen=True)
class EvalReport:
    """Aggregate metrics plus per-record rows they are recomputable from."""

    n_records: int
    json_validity: float
    overall_accuracy: float
    mean_reward: float
    mean_completion_chars: float
    missing_completions: int
    rows: tuple[RecordResult, ...]

    def to_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "json_validity": self.json_validity,
            "overall_accuracy": self.overall_accuracy,
            "mean_reward": self.mean_reward,
            "mean_completion_chars": self.mean_completion_chars,
            "missing_completions": self.missing_completions,
            "rows": [row.to_dict() for row in self.rows],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "EvalReport":
        rows = tuple(
            RecordResult(
                id=row["id"],
                outcome=row["outcome"],
                r_final=row["r_final"],
                exact=row["exact"],
                completion_chars=row["completion_chars"],
                missing=row["missing"],
            )
            for row in payload["rows"]
        )
        return cls(
            n_records=payload["n_records"],
            json_validity=payload["json_validity"],
            overall_accuracy=payload["overall_accuracy"],
            mean_reward=payload["mean_reward"],
            mean_completion_chars=payload["mean_completion_chars"],
            missing_completions=payload["missing_completions"],
            rows=rows,
        )


_VALID_OUTCOMES = frozenset({Outcome.CALLS.value, Outcome.NON_CONFORMING.value})


def evaluate(
    records: list[DatasetRecord],
    completions: Mapping[int, str],
    weights: RewardWeights | None = None,
    lenient_validity: bool = False,
) -> EvalReport:
    """Score every record's completion and aggregate the two headline metrics.

    JSON validity is strict by default: the whole trimmed completion must
    parse as one JSON value, so JSON wrapped in extraneous text counts as
    invalid.  With ``lenient_validity`` a completion containing any parseable
    JSON value also counts, for comparison only; scoring is unaffected.
    Overall accuracy is the fraction of completions whose call list matches
    the expected answer perfectly (final reward 1.0 under default weights).
    Records without a completion are scored as empty and counted.
    """
    weights = weights if weights is not None else RewardWeights()
    rows: list[RecordResult] = []
    valid = 0
    exact_count = 0
    reward_sum = 0.0
    chars_sum = 0
    missing_count = 0
    for record in records:
        raw = completions.get(record.id)
        missing = raw is None
        if missing:
            missing_count += 1
            raw = ""
        breakdown: RewardBreakdown = compute_reward(raw, record.answers, weights)
        exact = is_exact_match(breakdown)
        is_valid = breakdown.outcome in _VALID_OUTCOMES or (
            lenient_validity and breakdown.outcome == Outcome.EXTRANEOUS_TEXT.value
        )
        valid += is_valid
        exact_count += exact
        reward_sum += breakdown.r_final
        chars_sum += len(raw)
        rows.append(
            RecordResult(
                id=record.id,
                outcome=breakdown.outcome,
                r_final=breakdown.r_final,
                exact=exact,
                completion_chars=len(raw),
                missing=missing,
            )
        )

    n = len(records)
    report = EvalReport(
        n_records=n,
        json_validity=valid / n if n else 0.0,
        overall_accuracy=exact_count / n if n else 0.0,
        mean_reward=reward_sum / n if n else 0.0,
        mean_completion_chars=chars_sum / n if n else 0.0,
        missing_completions=missing_count,
        rows=tuple(rows),
    )
    # A perfect score requires a clean parse, so this can never trip; keep it
    # as a loud alarm if the parser and scorer ever drift apart.
    if report.json_validity < report.overall_accuracy:
        raise AssertionError("json_validity fell below overall_accuracy")
    return report


def render_report(report: EvalReport, fmt: str = "table") -> str:
    """Render a report as a human table, deterministic JSON, or row CSV."""
    if fmt in ("table", "human-table"):
        validity = f"{report.json_validity:.2%}"
        accuracy = f"{report.overall_accuracy:.2%}"
        lines = [
            "| JSON Validity | Overall Accuracy |",
            "|---------------|------------------|",
            f"| {validity:>13} | {accuracy:>16} |",
            "",
            f"records: {report.n_records}",
            f"mean reward: {report.mean_reward:.6f}",
            f"mean completion chars: {report.mean_completion_chars:.2f}",
            f"missing completions: {report.missing_completions}",
        ]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        lines = ["id,outcome,r_final,exact,completion_chars,missing"]
        for row in report.rows:
            lines.append(
                f"{row.id},{row.outcome},{row.r_final!r},"
                f"{int(row.exact)},{row.completion_chars},{int(row.missing)}"
            )
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(report: EvalReport, fmt: str = "table", path: str | Path | None = None) -> str:
    """Serialize a report; writes to ``path`` when given, returns the text."""
    text = render_report(report, fmt)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
