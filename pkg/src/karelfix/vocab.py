"""The closed Karel token vocabulary.

Every program is a sequence of words drawn from this 42-token set; the
tokenizer rejects anything else. Token identity is the plain string, and
``TOKEN_IDS`` fixes the canonical ordering used wherever a deterministic
token order is needed (tie-breaking, the compiled edit-distance kernel).
"""

from __future__ import annotations

ACTIONS: tuple[str, ...] = ("move", "turnLeft", "turnRight", "pickMarker", "putMarker")

ATOMIC_CONDITIONS: tuple[str, ...] = (
    "frontIsClear",
    "leftIsClear",
    "rightIsClear",
    "markersPresent",
    "noMarkersPresent",
)

NOT = "not"
CONDITION_WORDS: tuple[str, ...] = ATOMIC_CONDITIONS + (NOT,)

KEYWORDS: tuple[str, ...] = ("def", "run", "if", "ifelse", "else", "while", "repeat")

MAX_REPEAT = 19
NUMERALS: tuple[str, ...] = tuple(str(n) for n in range(MAX_REPEAT + 1))

DELIMITERS: tuple[str, ...] = ("(", ")", "{", "}")

VOCABULARY: tuple[str, ...] = ACTIONS + CONDITION_WORDS + KEYWORDS + NUMERALS + DELIMITERS
VOCAB_SIZE: int = len(VOCABULARY)

TOKEN_IDS: dict[str, int] = {tok: i for i, tok in enumerate(VOCABULARY)}

ACTION_SET = frozenset(ACTIONS)
ATOMIC_CONDITION_SET = frozenset(ATOMIC_CONDITIONS)
NUMERAL_SET = frozenset(NUMERALS)
CONTROL_KEYWORDS = frozenset({"if", "ifelse", "while", "repeat"})


def token_ids(tokens) -> list[int]:
    """Map a token sequence to canonical vocabulary ids."""
    return [TOKEN_IDS[t] for t in tokens]
