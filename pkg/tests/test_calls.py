import json
import random

import pytest

from toolcall_rl import (
    Outcome,
    ToolCall,
    calls_equal,
    canonical_equal,
    parse_completion,
    serialize_calls,
)

from fuzz import equivalent_variant, random_call_list, random_json_value, random_junk

VALID_LIST = '[{"name":"f","arguments":{}}]'
VALID_OBJECT = '{"name":"f","arguments":{"x":1}}'


@pytest.mark.parametrize(
    ("raw", "kind"),
    [
        ("", Outcome.EMPTY),
        ("   \n\t ", Outcome.EMPTY),
        (VALID_LIST, Outcome.CALLS),
        (f"  {VALID_LIST}  \n", Outcome.CALLS),
        (VALID_OBJECT, Outcome.CALLS),
        ("[]", Outcome.CALLS),
        (f"Sure, here is the call: {VALID_LIST}", Outcome.EXTRANEOUS_TEXT),
        (f"{VALID_LIST} extra", Outcome.EXTRANEOUS_TEXT),
        (f"```json\n{VALID_LIST}\n```", Outcome.EXTRANEOUS_TEXT),
        (f"{VALID_LIST}{VALID_LIST}", Outcome.EXTRANEOUS_TEXT),
        ("definitely not a payload", Outcome.INVALID_JSON),
        ("[{", Outcome.INVALID_JSON),
        ("{]", Outcome.INVALID_JSON),
        ('{"name":"f"}', Outcome.NON_CONFORMING),
        ('{"name":"f","arguments":{},"id":1}', Outcome.NON_CONFORMING),
        ('{"name":"","arguments":{}}', Outcome.NON_CONFORMING),
        ('{"name":1,"arguments":{}}', Outcome.NON_CONFORMING),
        ('{"name":"f","arguments":[]}', Outcome.NON_CONFORMING),
        ('[{"name":"f","arguments":{}},{"oops":1}]', Outcome.NON_CONFORMING),
        ('{"a": 1}', Outcome.NON_CONFORMING),
        ('"just a string"', Outcome.NON_CONFORMING),
        ("42", Outcome.NON_CONFORMING),
        ("null", Outcome.NON_CONFORMING),
        ("[1, 2]", Outcome.NON_CONFORMING),
        ("NaN", Outcome.INVALID_JSON),
        ("Infinity", Outcome.INVALID_JSON),
    ],
)
def test_classification(raw, kind):
    assert parse_completion(raw).kind is kind


def test_single_object_normalizes_to_one_element_list():
    outcome = parse_completion(VALID_OBJECT)
    assert outcome.kind is Outcome.CALLS
    assert len(outcome.calls) == 1
    assert outcome.calls[0] == ToolCall("f", {"x": 1})


def test_array_parses_in_order_with_duplicate_names():
    raw = '[{"name":"f","arguments":{"x":1}},{"name":"f","arguments":{"x":2}}]'
    outcome = parse_completion(raw)
    assert [c.arguments["x"] for c in outcome.calls] == [1, 2]


def test_nested_argument_values_survive():
    raw = '[{"name":"f","arguments":{"cfg":{"a":[1,2,{"b":null}]},"flag":true}}]'
    outcome = parse_completion(raw)
    assert outcome.calls[0].arguments == {"cfg": {"a": [1, 2, {"b": None}]}, "flag": True}


def test_non_conforming_reason_is_populated():
    outcome = parse_completion('{"name":"f"}')
    assert outcome.kind is Outcome.NON_CONFORMING
    assert "name" in outcome.reason or "keys" in outcome.reason


def test_tool_call_rejects_empty_name():
    with pytest.raises(ValueError):
        ToolCall("", {})


def test_round_trip_fuzz():
    rng = random.Random(101)
    for _ in range(300):
        calls = random_call_list(rng)
        outcome = parse_completion(serialize_calls(calls))
        assert outcome.kind is Outcome.CALLS
        assert list(outcome.calls) == calls
        assert all(calls_equal(a, b) for a, b in zip(outcome.calls, calls))


def test_any_non_whitespace_framing_is_extraneous():
    rng = random.Random(102)
    for _ in range(300):
        calls = random_call_list(rng)
        text = serialize_calls(calls)
        junk = random_junk(rng)
        assert parse_completion(junk + text).kind is Outcome.EXTRANEOUS_TEXT
        assert parse_completion(text + junk).kind is Outcome.EXTRANEOUS_TEXT


def test_classification_is_total_over_arbitrary_bytes():
    rng = random.Random(103)
    kinds = set()
    for _ in range(1000):
        blob = bytes(rng.randrange(256) for _ in range(rng.randrange(40)))
        outcome = parse_completion(blob.decode("utf-8", errors="replace"))
        assert isinstance(outcome.kind, Outcome)
        kinds.add(outcome.kind)
    assert Outcome.INVALID_JSON in kinds  # the fuzzer actually hit the hard cases
    assert Outcome.EMPTY in kinds


def test_canonical_equal_examples():
    assert canonical_equal(7, 7.0)
    assert canonical_equal(0.3, 0.3)
    assert not canonical_equal("Secure123", "secure123")
    assert canonical_equal({"a": 1, "b": 2}, {"b": 2, "a": 1})
    assert not canonical_equal([1, 2], [2, 1])
    assert not canonical_equal(True, 1)
    assert not canonical_equal(False, 0)
    assert not canonical_equal(None, 0)
    assert not canonical_equal("1", 1)
    assert canonical_equal(None, None)
    assert canonical_equal(
        {"a": [1, {"b": 2.0}]},
        {"a": [1.0, {"b": 2}]},
    )


def test_canonical_equal_is_an_equivalence_relation():
    rng = random.Random(104)
    for _ in range(500):
        a = random_json_value(rng)
        b = equivalent_variant(a, rng)
        c = equivalent_variant(b, rng)
        assert canonical_equal(a, a)
        assert canonical_equal(a, b) and canonical_equal(b, a)
        assert canonical_equal(b, c)
        assert canonical_equal(a, c)  # transitivity along the chain
    for _ in range(500):
        a = random_json_value(rng)
        b = random_json_value(rng)
        assert canonical_equal(a, b) == canonical_equal(b, a)


def test_serialized_form_is_plain_json():
    calls = [ToolCall("f", {"x": 1, "y": "two"})]
    payload = json.loads(serialize_calls(calls))
    assert payload == [{"name": "f", "arguments": {"x": 1, "y": "two"}}]
