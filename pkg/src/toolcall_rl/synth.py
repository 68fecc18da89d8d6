"""Deterministic synthetic tool universes and corpora with planted errors.

Each corpus record carries exactly one planted behavior (perfect output or a
single named error mode), so the reward and both harness metrics are known in
closed form for every record.  Quotas use floor plus largest-remainder
rounding, which makes planted rates exact at any corpus size.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .calls import JsonValue, ParamSpec, ToolCall, ToolSpec, serialize_calls
from .harness import DatasetRecord, write_completions, write_records

__all__ = [
    "ERROR_TAGS",
    "PERFECT_TAG",
    "PlantedCorpus",
    "PlantedRecord",
    "QueryTemplate",
    "SynthUniverse",
    "default_universe",
    "generate_universe",
    "plant_corpus",
]

_TOOL_WORDS = (
    "archive", "beacon", "cipher", "dispatch", "ember", "flume", "gauge",
    "harbor", "isobar", "jigsaw", "kestrel", "lattice", "marble", "nectar",
    "orbit", "prism", "quartz", "relay", "summit", "tracer", "umbra",
    "vault", "willow", "xenon", "yonder", "zephyr",
)
_PARAM_WORDS = (
    "amount", "batch", "color", "depth", "extent", "format", "grade",
    "height", "inset", "jitter", "kind", "limit", "mode", "north",
    "offset", "phase", "quota", "rate", "span", "tier", "unit", "width",
)
_INT_POOL = (1, 2, 7, 12, 31, 44, 58, 63)
_STR_POOL = ("alpha", "bravo", "coral", "dune", "evergreen", "fig", "garnet", "harvest")
_FLOAT_POOL = (0.25, 0.5, 0.75, 1.5, 2.25, 3.5, 4.75, 6.5)

PERFECT_TAG = "perfect"
ERROR_TAGS = (
    "extraneous-text",
    "invalid-json",
    "wrong-name",
    "wrong-arg-value",
    "missing-arg",
    "extra-call",
)
_TAG_ALIASES = {"extraneous": "extraneous-text"}
_ARG_DEPENDENT_TAGS = frozenset({"wrong-arg-value", "missing-arg"})

_EXTRANEOUS_PREFIXES = ("Here is the call you asked for: ", "Okay, running that now. ")
_EXTRANEOUS_SUFFIXES = (" Let me know if that works.", " Task complete.")
_INVALID_FRAGMENTS = ("[{", "{]", "[}")


@dataclass(frozen=True)
class QueryTemplate:
    text: str
    answers: tuple[ToolCall, ...]


@dataclass(frozen=True)
class SynthUniverse:
    tools: tuple[ToolSpec, ...]
    templates: tuple[QueryTemplate, ...]
    pools: dict[tuple[str, str], tuple[JsonValue, ...]]


def _tool_names(n_tools: int) -> list[str]:
    names: list[str] = []
    round_no = 0
    while len(names) < n_tools:
        for word in _TOOL_WORDS:
            names.append(word if round_no == 0 else f"{word}{round_no}")
            if len(names) == n_tools:
                break
        round_no += 1
    return names


def generate_universe(
    seed: int, n_tools: int, max_params: int, pool_size: int = 3
) -> SynthUniverse:
    """Build a deterministic universe of tools, value pools, and one query
    template per tool.

    Tool and parameter names come from disjoint word lists so they can never
    collide.  When ``max_params`` is positive every tool gets at least one
    parameter, which keeps every error mode plantable.
    """
    if n_tools < 1:
        raise ValueError(f"need at least one tool, got {n_tools}")
    if max_params < 0:
        raise ValueError(f"max_params must be non-negative, got {max_params}")
    if not 1 <= pool_size <= len(_INT_POOL):
        raise ValueError(f"pool_size must be in 1..{len(_INT_POOL)}, got {pool_size}")

    rng = random.Random(seed)
    archetypes = (
        ("integer", _INT_POOL),
        ("string", _STR_POOL),
        ("number", _FLOAT_POOL),
    )
    tools: list[ToolSpec] = []
    templates: list[QueryTemplate] = []
    pools: dict[tuple[str, str], tuple[JsonValue, ...]] = {}
    for name in _tool_names(n_tools):
        n_params = rng.randint(1, max_params) if max_params else 0
        params = rng.sample(_PARAM_WORDS, n_params)
        spec_params: dict[str, ParamSpec] = {}
        expected_args: dict[str, JsonValue] = {}
        for param in params:
            type_tag, base = archetypes[rng.randrange(len(archetypes))]
            offset = rng.randrange(len(base))
            pool = tuple(base[(offset + k) % len(base)] for k in range(pool_size))
            pools[(name, param)] = pool
            spec_params[param] = ParamSpec(type=type_tag, description=f"Value for {param}.")
            expected_args[param] = pool[rng.randrange(len(pool))]
        tools.append(ToolSpec(name=name, description=f"Synthetic tool {name}.", parameters=spec_params))
        call = ToolCall(name, expected_args)
        if expected_args:
            wants = "; ".join(f"{param} set to {value}" for param, value in expected_args.items())
            text = f"Run {name} with {wants}."
        else:
            text = f"Run {name}."
        templates.append(QueryTemplate(text=text, answers=(call,)))
    return SynthUniverse(tools=tuple(tools), templates=tuple(templates), pools=pools)


def default_universe() -> SynthUniverse:
    """The fixed universe the toy trainer and demos run on."""
    return generate_universe(seed=0, n_tools=4, max_params=2)


@dataclass(frozen=True)
class PlantedRecord:
    record: DatasetRecord
    completion: str
    tag: str


@dataclass(frozen=True)
class PlantedCorpus:
    records: tuple[PlantedRecord, ...]
    rates: dict[str, float]

    def dataset(self) -> list[DatasetRecord]:
        return [planted.record for planted in self.records]

    def completions(self) -> dict[int, str]:
        return {planted.record.id: planted.completion for planted in self.records}

    def tags(self) -> dict[int, str]:
        return {planted.record.id: planted.tag for planted in self.records}

    def write(self, dataset_path, completions_path, fmt: str = "jsonl") -> None:
        write_records(self.dataset(), dataset_path, fmt=fmt)
        write_completions(self.completions(), completions_path, tags=self.tags())


def _quotas(error_mix: dict[str, float], n_records: int) -> dict[str, int]:
    # Floor first, then hand out the remainder by largest fractional part;
    # ties resolve in mix insertion order.
    targets = {tag: fraction * n_records for tag, fraction in error_mix.items()}
    base = {tag: int(math.floor(target + 1e-9)) for tag, target in targets.items()}
    leftover = int(math.floor(sum(targets.values()) + 1e-9)) - sum(base.values())
    if leftover > 0:
        ranked = sorted(
            targets,
            key=lambda tag: (-(targets[tag] - base[tag]), list(targets).index(tag)),
        )
        for tag in ranked[:leftover]:
            base[tag] += 1
    return base


def _mutate_value(value: JsonValue) -> JsonValue:
    if isinstance(value, bool):
        return not value
    if isinstance(value, int):
        return value + 1
    if isinstance(value, float):
        return value + 1.0
    if isinstance(value, str):
        return value + "_x"
    return "mutated"


def plant_corpus(
    universe: SynthUniverse,
    seed: int,
    n_records: int,
    error_mix: dict[str, float],
) -> PlantedCorpus:
    """Generate records whose completions carry exactly one planted behavior.

    ``error_mix`` maps error tags to fractions summing to at most 1; the
    remainder of the corpus gets perfect completions.  Identical inputs give
    an identical corpus, tags included.
    """
    if n_records < 0:
        raise ValueError("n_records must be non-negative")
    mix: dict[str, float] = {}
    for tag, fraction in error_mix.items():
        canonical = _TAG_ALIASES.get(tag, tag)
        if canonical not in ERROR_TAGS:
            raise ValueError(f"unknown error tag {tag!r}; known: {ERROR_TAGS}")
        if canonical in mix:
            raise ValueError(f"duplicate error tag {tag!r}")
        if not 0.0 <= fraction <= 1.0:
            raise ValueError(f"fraction for {tag!r} must be in [0, 1], got {fraction}")
        mix[canonical] = fraction
    if sum(mix.values()) > 1.0 + 1e-9:
        raise ValueError(f"error fractions sum to {sum(mix.values())}, above 1")

    quotas = _quotas(mix, n_records)
    tags: list[str] = []
    for tag, count in quotas.items():
        tags.extend([tag] * count)
    tags.extend([PERFECT_TAG] * (n_records - len(tags)))

    rng = random.Random(seed)
    rng.shuffle(tags)

    arg_templates = [t for t in universe.templates if t.answers[0].arguments]
    needs_args = _ARG_DEPENDENT_TAGS.intersection(quotas)
    if needs_args and not arg_templates:
        raise ValueError(
            f"tags {sorted(needs_args)} need templates with arguments, but the universe has none"
        )

    records: list[PlantedRecord] = []
    tools = list(universe.tools)
    for record_id, tag in enumerate(tags):
        if tag in _ARG_DEPENDENT_TAGS:
            template = arg_templates[rng.randrange(len(arg_templates))]
        else:
            template = universe.templates[rng.randrange(len(universe.templates))]
        call = template.answers[0]
        completion = _plant_completion(call, tag, rng)
        record = DatasetRecord(
            id=record_id, query=template.text, answers=[call], tools=tools
        )
        records.append(PlantedRecord(record=record, completion=completion, tag=tag))

    counts: dict[str, int] = {}
    for tag in tags:
        counts[tag] = counts.get(tag, 0) + 1
    rates = {tag: count / n_records for tag, count in counts.items()} if n_records else {}
    return PlantedCorpus(records=tuple(records), rates=rates)


def _plant_completion(call: ToolCall, tag: str, rng: random.Random) -> str:
    perfect = serialize_calls([call])
    if tag == PERFECT_TAG:
        return perfect
    if tag == "extraneous-text":
        if rng.random() < 0.5:
            return _EXTRANEOUS_PREFIXES[rng.randrange(len(_EXTRANEOUS_PREFIXES))] + perfect
        return perfect + _EXTRANEOUS_SUFFIXES[rng.randrange(len(_EXTRANEOUS_SUFFIXES))]
    if tag == "invalid-json":
        return _INVALID_FRAGMENTS[rng.randrange(len(_INVALID_FRAGMENTS))]
    if tag == "wrong-name":
        return serialize_calls([ToolCall(call.name + "_alt", call.arguments)])
    if tag == "wrong-arg-value":
        param = list(call.arguments)[rng.randrange(len(call.arguments))]
        mutated = dict(call.arguments)
        mutated[param] = _mutate_value(mutated[param])
        return serialize_calls([ToolCall(call.name, mutated)])
    if tag == "missing-arg":
        param = list(call.arguments)[rng.randrange(len(call.arguments))]
        reduced = {key: value for key, value in call.arguments.items() if key != param}
        return serialize_calls([ToolCall(call.name, reduced)])
    if tag == "extra-call":
        return serialize_calls([call, ToolCall(call.name + "_extra", {})])
    raise ValueError(f"unknown tag {tag!r}")
