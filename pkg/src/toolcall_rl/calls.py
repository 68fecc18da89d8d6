"""Tool-call domain model and strict completion classification.

A raw completion earns the ``CALLS`` classification only when its entire
trimmed text parses as exactly one JSON value that is either a single call
object or an array of call objects.  Any non-whitespace character outside an
otherwise parseable JSON payload makes the whole completion extraneous text.
Classification is total: every string maps to exactly one outcome and the
parser never raises.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

__all__ = [
    "JsonValue",
    "Outcome",
    "ParseOutcome",
    "ParamSpec",
    "ToolCall",
    "ToolSpec",
    "call_from_dict",
    "calls_equal",
    "canonical_equal",
    "parse_completion",
    "serialize_calls",
]

# Anything json.loads can produce: None, bool, int, float, str, list, dict.
JsonValue = Any


@dataclass(frozen=True)
class ToolCall:
    """One function invocation: a non-empty name plus an ordered argument map."""

    name: str
    arguments: dict[str, JsonValue]

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("tool call name must be a non-empty string")

    def to_dict(self) -> dict[str, JsonValue]:
        return {"name": self.name, "arguments": self.arguments}


@dataclass(frozen=True)
class ParamSpec:
    """Declared shape of one tool parameter."""

    type: str = "string"
    required: bool = True
    description: str = ""


@dataclass(frozen=True)
class ToolSpec:
    """Catalog entry for one callable tool.

    Carried alongside dataset records for fidelity; scoring never consults it.
    """

    name: str
    description: str = ""
    parameters: dict[str, ParamSpec] = field(default_factory=dict)

    def to_dict(self) -> dict[str, JsonValue]:
        return {
            "name": self.name,
            "description": self.description,
            "parameters": {
                key: {"type": p.type, "required": p.required, "description": p.description}
                for key, p in self.parameters.items()
            },
        }


class Outcome(str, Enum):
    """Classification tag for a raw completion."""

    CALLS = "calls"
    EXTRANEOUS_TEXT = "extraneous_text"
    INVALID_JSON = "invalid_json"
    EMPTY = "empty"
    NON_CONFORMING = "non_conforming"


@dataclass(frozen=True)
class ParseOutcome:
    """Result of classifying one completion; exactly one variant applies.

    ``calls`` is populated only for the ``CALLS`` kind, ``reason`` only for
    ``NON_CONFORMING``.
    """

    kind: Outcome
    calls: tuple[ToolCall, ...] = ()
    reason: str = ""

    @property
    def is_calls(self) -> bool:
        return self.kind is Outcome.CALLS


def _reject_constant(name: str) -> None:
    raise ValueError(f"non-standard JSON constant: {name}")


_DECODER = json.JSONDecoder(parse_constant=_reject_constant)

# Characters that can begin a JSON value; everything else cannot anchor one.
_VALUE_STARTS = frozenset('{["-0123456789tfn')


def parse_completion(raw: str) -> ParseOutcome:
    """Classify a raw completion string.

    Whitespace framing is tolerated; all other framing counts as extraneous
    text.  A single top-level call object normalizes to a one-element list.
    Parseable JSON that is not a call list (wrong keys, extra keys, bare
    values) is non-conforming rather than invalid, so callers can decide how
    much credit syntactic validity alone deserves.
    """
    text = raw.strip()
    if not text:
        return ParseOutcome(Outcome.EMPTY)
    try:
        payload = json.loads(text, parse_constant=_reject_constant)
    except (ValueError, RecursionError):
        if _contains_json_value(text):
            return ParseOutcome(Outcome.EXTRANEOUS_TEXT)
        return ParseOutcome(Outcome.INVALID_JSON)
    return _classify_payload(payload)


def _contains_json_value(text: str) -> bool:
    # Quadratic in the worst case, but completions are short and the scan
    # stops at the first parseable value.
    for start, char in enumerate(text):
        if char not in _VALUE_STARTS:
            continue
        try:
            _DECODER.raw_decode(text, start)
        except (ValueError, RecursionError):
            continue
        return True
    return False


def _classify_payload(payload: JsonValue) -> ParseOutcome:
    if isinstance(payload, list):
        calls: list[ToolCall] = []
        for index, item in enumerate(payload):
            call, problem = _as_call(item)
            if call is None:
                return ParseOutcome(Outcome.NON_CONFORMING, reason=f"element {index}: {problem}")
            calls.append(call)
        return ParseOutcome(Outcome.CALLS, calls=tuple(calls))
    if isinstance(payload, dict):
        call, problem = _as_call(payload)
        if call is None:
            return ParseOutcome(Outcome.NON_CONFORMING, reason=problem)
        return ParseOutcome(Outcome.CALLS, calls=(call,))
    return ParseOutcome(
        Outcome.NON_CONFORMING,
        reason="top-level value is not a call object or an array of call objects",
    )


def _as_call(item: JsonValue) -> tuple[ToolCall | None, str]:
    if not isinstance(item, dict):
        return None, "not an object"
    if set(item) != {"name", "arguments"}:
        return None, 'keys must be exactly {"name", "arguments"}'
    name = item["name"]
    arguments = item["arguments"]
    if not isinstance(name, str) or not name:
        return None, "name must be a non-empty string"
    if not isinstance(arguments, dict):
        return None, "arguments must be an object"
    return ToolCall(name, arguments), ""


def call_from_dict(item: JsonValue) -> ToolCall:
    """Build a ToolCall from a decoded JSON object, or raise ValueError."""
    call, problem = _as_call(item)
    if call is None:
        raise ValueError(f"not a call object: {problem}")
    return call


def serialize_calls(calls: list[ToolCall] | tuple[ToolCall, ...]) -> str:
    """Render a call list as the canonical JSON array form."""
    return json.dumps([call.to_dict() for call in calls], ensure_ascii=False, allow_nan=False)


def canonical_equal(a: JsonValue, b: JsonValue) -> bool:
    """Structural value equality for decoded JSON.

    Numbers compare by value (7 equals 7.0), strings are case sensitive, maps
    ignore key order, arrays do not.  Booleans are their own type and never
    equal 0 or 1.  NaN equals NaN so the relation stays reflexive on every
    representable value.
    """
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        a_nan = isinstance(a, float) and math.isnan(a)
        b_nan = isinstance(b, float) and math.isnan(b)
        if a_nan or b_nan:
            return a_nan and b_nan
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(canonical_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(canonical_equal(value, b[key]) for key, value in a.items())
    return False


def calls_equal(a: ToolCall, b: ToolCall) -> bool:
    """Name equality plus canonical equality of the full argument maps."""
    return a.name == b.name and canonical_equal(a.arguments, b.arguments)
