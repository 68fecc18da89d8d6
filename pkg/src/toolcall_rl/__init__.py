"""Strict scoring for structured tool-call completions, group-relative
advantage math, synthetic corpora with planted errors, and an evaluation
harness with a deterministic toy trainer."""

__version__ = "0.1.0"

from .calls import (
    JsonValue,
    Outcome,
    ParamSpec,
    ParseOutcome,
    ToolCall,
    ToolSpec,
    call_from_dict,
    calls_equal,
    canonical_equal,
    parse_completion,
    serialize_calls,
)
from .rewards import (
    DEFAULT_WEIGHTS,
    MatchReport,
    RewardBreakdown,
    RewardWeights,
    compute_reward,
    is_exact_match,
    match_calls,
    reward_batch,
)
from .grpo import (
    GroupSample,
    ToyPolicy,
    TrainerConfig,
    TrainingCurve,
    WindowStats,
    curve_stats,
    group_advantages,
    train_toy_policy,
)
from .synth import (
    ERROR_TAGS,
    PERFECT_TAG,
    PlantedCorpus,
    PlantedRecord,
    QueryTemplate,
    SynthUniverse,
    default_universe,
    generate_universe,
    plant_corpus,
)
from .harness import (
    DatasetRecord,
    EvalReport,
    RecordResult,
    emit_report,
    evaluate,
    load_completions,
    load_dataset,
    record_from_dict,
    record_to_dict,
    split_sample,
    write_completions,
    write_records,
)

__all__ = [
    "__version__",
    # calls
    "JsonValue", "Outcome", "ParamSpec", "ParseOutcome", "ToolCall", "ToolSpec",
    "call_from_dict", "calls_equal", "canonical_equal", "parse_completion", "serialize_calls",
    # rewards
    "DEFAULT_WEIGHTS", "MatchReport", "RewardBreakdown", "RewardWeights",
    "compute_reward", "is_exact_match", "match_calls", "reward_batch",
    # grpo
    "GroupSample", "ToyPolicy", "TrainerConfig", "TrainingCurve", "WindowStats",
    "curve_stats", "group_advantages", "train_toy_policy",
    # synth
    "ERROR_TAGS", "PERFECT_TAG", "PlantedCorpus", "PlantedRecord", "QueryTemplate",
    "SynthUniverse", "default_universe", "generate_universe", "plant_corpus",
    # harness
    "DatasetRecord", "EvalReport", "RecordResult", "emit_report", "evaluate",
    "load_completions", "load_dataset", "record_from_dict", "record_to_dict",
    "split_sample", "write_completions", "write_records",
]
