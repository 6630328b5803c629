"""Token-level edit scripts with a source pointer.

A script is applied by scanning the source with a pointer: KEEP emits the
current token and advances, REPLACE emits its payload and advances,
DELETE advances without emitting, and INSERT emits its payload without
advancing, so any number of insertions can precede the same source token.
A script fits a source of length L exactly when its KEEP/DELETE/REPLACE
count is L.

``min_edit_script`` produces the canonical minimal script: its non-KEEP
count equals the Levenshtein distance, and ties in the DP are broken by
preferring KEEP over REPLACE over DELETE over INSERT for the op that ends
each script prefix. That places insertions before the op that consumes
the token they precede, e.g. ``[move] -> [move, move]`` yields
``INSERT[move], KEEP``.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import Optional, Sequence

from . import kernels
from .vocab import TOKEN_IDS, VOCAB_SIZE, VOCABULARY

KEEP = "KEEP"
DELETE = "DELETE"
INSERT = "INSERT"
REPLACE = "REPLACE"


class ScriptLengthMismatch(ValueError):
    def __init__(self, consumed: int, source_len: int):
        super().__init__(f"script consumes {consumed} tokens, source has {source_len}")
        self.consumed = consumed
        self.source_len = source_len


@dataclass(frozen=True)
class EditOp:
    kind: str
    token: Optional[str] = None

    def __post_init__(self):
        if self.kind in (KEEP, DELETE):
            if self.token is not None:
                raise ValueError(f"{self.kind} takes no token")
        elif self.kind in (INSERT, REPLACE):
            if self.token not in TOKEN_IDS:
                raise ValueError(f"{self.kind} needs a vocabulary token, got {self.token!r}")
        else:
            raise ValueError(f"unknown edit op kind {self.kind!r}")

    def __str__(self):
        return self.kind if self.token is None else f"{self.kind}[{self.token}]"


EditScript = tuple[EditOp, ...]

OP_KEEP = EditOp(KEEP)
OP_DELETE = EditOp(DELETE)


def insert(token: str) -> EditOp:
    return EditOp(INSERT, token)


def replace(token: str) -> EditOp:
    return EditOp(REPLACE, token)


def op_universe() -> tuple[EditOp, ...]:
    """All distinct edit operations: KEEP, DELETE, INSERT[t], REPLACE[t]."""
    ops = [OP_KEEP, OP_DELETE]
    ops += [insert(t) for t in VOCABULARY]
    ops += [replace(t) for t in VOCABULARY]
    assert len(ops) == 2 * VOCAB_SIZE + 2
    return tuple(ops)


def consumed_length(script: Sequence[EditOp]) -> int:
    return sum(1 for op in script if op.kind != INSERT)


def apply_edits(src: Sequence[str], script: Sequence[EditOp]) -> tuple[str, ...]:
    """Apply a script to a token sequence under the pointer semantics."""
    need = consumed_length(script)
    if need != len(src):
        raise ScriptLengthMismatch(need, len(src))
    out: list[str] = []
    p = 0
    for op in script:
        if op.kind == KEEP:
            out.append(src[p])
            p += 1
        elif op.kind == REPLACE:
            out.append(op.token)
            p += 1
        elif op.kind == DELETE:
            p += 1
        else:
            out.append(op.token)
    return tuple(out)


def edit_distance(src: Sequence[str], tgt: Sequence[str]) -> int:
    """Token-level Levenshtein distance (unit-cost insert/delete/substitute)."""
    return kernels.levenshtein(
        array("i", [TOKEN_IDS[t] for t in src]),
        array("i", [TOKEN_IDS[t] for t in tgt]),
    )


def min_edit_script(src: Sequence[str], tgt: Sequence[str]) -> EditScript:
    """Canonical minimal script turning src into tgt (see module docs)."""
    n, m = len(src), len(tgt)
    # dp[i][j] = distance between src[:i] and tgt[:j]
    dp = [list(range(m + 1))]
    for i in range(1, n + 1):
        row = [i] + [0] * m
        prev = dp[i - 1]
        si = src[i - 1]
        for j in range(1, m + 1):
            row[j] = min(
                prev[j] + 1,  # delete
                row[j - 1] + 1,  # insert
                prev[j - 1] + (si != tgt[j - 1]),  # keep / replace
            )
        dp.append(row)

    # trace back from (n, m); the preference order picks the op that ends
    # the script at each cell: KEEP > REPLACE > DELETE > INSERT
    ops: list[EditOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = dp[i][j]
        if i > 0 and j > 0 and src[i - 1] == tgt[j - 1] and dp[i - 1][j - 1] == here:
            ops.append(OP_KEEP)
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and dp[i - 1][j - 1] + 1 == here:
            ops.append(replace(tgt[j - 1]))
            i -= 1
            j -= 1
        elif i > 0 and dp[i - 1][j] + 1 == here:
            ops.append(OP_DELETE)
            i -= 1
        else:
            ops.append(insert(tgt[j - 1]))
            j -= 1
    ops.reverse()
    return tuple(ops)


# --- text form (CLI and golden files) ---------------------------------------


def script_to_text(script: Sequence[EditOp]) -> str:
    return ",".join(str(op) for op in script)


def script_from_text(text: str) -> EditScript:
    ops = []
    text = text.strip()
    if not text:
        return ()
    for part in text.split(","):
        part = part.strip()
        if part.endswith("]") and "[" in part:
            kind, _, payload = part.partition("[")
            ops.append(EditOp(kind, payload[:-1]))
        else:
            ops.append(EditOp(part))
    return tuple(ops)
