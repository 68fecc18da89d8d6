"""Walk through the reward function one behavior at a time.

Run:  python demos/01_reward_anatomy.py
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from toolcall_rl import RewardWeights, ToolCall, compute_reward, serialize_calls

EXPECTED = [
    ToolCall("qr_code_image", {"size": 7, "url": "example.com"}),
    ToolCall("ec", {"password": "Secure123", "penalty": 0.3, "format": "json"}),
]


def show(label: str, raw: str, weights: RewardWeights | None = None) -> None:
    breakdown = compute_reward(raw, EXPECTED, weights or RewardWeights())
    print(f"--- {label}")
    print(f"    completion: {raw[:72]}{'...' if len(raw) > 72 else ''}")
    print(
        f"    outcome={breakdown.outcome}  r_json={breakdown.r_json}  "
        f"r_fn'={breakdown.r_fn_scaled}  r_args'={breakdown.r_args_scaled}  "
        f"=> r_final={breakdown.r_final}"
    )


print("Expected answer:")
print(" ", serialize_calls(EXPECTED))
print()

# A perfect completion collects every component: 0.125 + 0.375 + 0.5 = 1.0.
show("perfect", serialize_calls(EXPECTED))

# One wrong tool name and one missing argument: the second call still earns
# its share of the name and argument credit, the first earns nothing.
partial = [
    ToolCall("qr_code_image_generator", {"url": "example.com"}),
    ToolCall("ec", {"password": "Secure123", "penalty": 0.3, "format": "json"}),
]
show("wrong name + dropped argument", serialize_calls(partial))

# Any prose around the payload zeroes the whole reward, no partial credit.
show("chat preamble", "Sure, here is the call: " + serialize_calls(EXPECTED))
show("trailing remark", serialize_calls(EXPECTED) + " Hope that helps!")

# Over-generation: a third, unasked-for call scales name+argument credit by
# expected/predicted = 2/3.
padded = EXPECTED + [ToolCall("extra_lookup", {})]
show("one extra call", serialize_calls(padded))

# Parseable JSON that is not a call list keeps only the JSON credit.
show("well-formed but not a call list", json.dumps({"answer": 42}))

# Broken or empty output is a hard zero.
show("truncated JSON", "[{")
show("empty", "")

# Early-curriculum weights: while a model is still learning to emit JSON at
# all, validity carries 0.5 and the other components shrink.
early = RewardWeights(w_json=0.5, w_fn=0.25, w_args=0.25)
print()
print("Same completions under early-curriculum weights (0.5 / 0.25 / 0.25):")
show("well-formed but not a call list", json.dumps({"answer": 42}), early)
show("perfect", serialize_calls(EXPECTED), early)
