"""Grammar-based random program generation under explicit size limits.

Statements are drawn top-down with an exact token budget, so every sample
respects ``max_total_tokens`` by construction and parses back to itself.
Sampled conditions are an atom or a single ``not`` over an atom; deeper
negation stays parseable but is never generated, which keeps every sampled
condition inside the parameter domain of the mutation operators.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .syntax import Action, CondAtom, If, IfElse, Not, Prog, Repeat, While, annotate
from .vocab import ACTIONS, ATOMIC_CONDITIONS, MAX_REPEAT

# frame tokens: kw ( cond/num ) { }  /  ifelse adds } else { around branch two
_FRAME_LOOP = 6
_FRAME_IFELSE = 9
_PROG_FRAME = 4


@dataclass(frozen=True)
class SampleLimits:
    max_depth: int = 3
    max_body_len: int = 4
    max_total_tokens: int = 32
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1 or self.max_body_len < 1 or self.max_total_tokens < 5:
            raise ValueError(f"limits too small: {self}")


def sample_program(limits: SampleLimits) -> Prog:
    """Draw one valid program; deterministic for a fixed seed."""
    rng = random.Random(limits.rng_seed)
    body, _ = _gen_body(rng, limits, depth=1, budget=limits.max_total_tokens - _PROG_FRAME)
    return annotate(Prog(tuple(body)))


def _gen_cond(rng: random.Random, budget: int):
    negate = budget >= 2 and rng.random() < 0.25
    atom = CondAtom(rng.choice(ATOMIC_CONDITIONS))
    if negate:
        return Not(atom), 2
    return atom, 1


def _gen_body(rng: random.Random, limits: SampleLimits, depth: int, budget: int):
    stmts = []
    used = 0
    for _ in range(rng.randint(0, limits.max_body_len)):
        stmt, cost = _gen_stmt(rng, limits, depth, budget - used)
        if stmt is None:
            break
        stmts.append(stmt)
        used += cost
    return stmts, used


def _gen_stmt(rng: random.Random, limits: SampleLimits, depth: int, budget: int):
    kinds = []
    weights = []
    if budget >= 1:
        kinds.append("action")
        weights.append(4)
    if depth < limits.max_depth:
        if budget >= _FRAME_LOOP:
            kinds += ["while", "repeat", "if"]
            weights += [1, 1, 1]
        if budget >= _FRAME_IFELSE:
            kinds.append("ifelse")
            weights.append(1)
    if not kinds:
        return None, 0
    kind = rng.choices(kinds, weights=weights)[0]

    if kind == "action":
        return Action(rng.choice(ACTIONS)), 1
    if kind == "repeat":
        times = rng.randint(0, MAX_REPEAT)
        body, used = _gen_body(rng, limits, depth + 1, budget - _FRAME_LOOP)
        return Repeat(times, tuple(body)), _FRAME_LOOP + used
    if kind == "ifelse":
        cond, cond_cost = _gen_cond(rng, budget - _FRAME_IFELSE + 1)
        remaining = budget - _FRAME_IFELSE - (cond_cost - 1)
        then_body, used_a = _gen_body(rng, limits, depth + 1, remaining)
        else_body, used_b = _gen_body(rng, limits, depth + 1, remaining - used_a)
        return (
            IfElse(cond, tuple(then_body), tuple(else_body)),
            _FRAME_IFELSE + (cond_cost - 1) + used_a + used_b,
        )
    cond, cond_cost = _gen_cond(rng, budget - _FRAME_LOOP + 1)
    body, used = _gen_body(rng, limits, depth + 1, budget - _FRAME_LOOP - (cond_cost - 1))
    cls = While if kind == "while" else If
    return cls(cond, tuple(body)), _FRAME_LOOP + (cond_cost - 1) + used
