"""Synthesis/repair search drivers over pluggable candidate sources.

A candidate source exposes ``synthesize(spec)`` and ``debug(program,
spec)``, each returning at most ``beam`` parseable token sequences. The
two drivers share one expansion budget ``k`` (one expansion = selecting a
candidate and testing its pass rate):

* best-first keeps every program seen in a frontier, repeatedly expands
  the unexpanded program with the highest pass rate, and falls back to
  the best frontier program when the budget ends, so a perfect program
  produced on the final debugger call is still returned;
* greedy only follows the debugger output of the current program and
  stops (returning the best program seen) when that output has nothing
  new to offer.

Ties are broken by higher pass rate, then shallower derivation depth,
then earlier insertion order; programs are deduplicated by exact token
sequence. Pass-rate termination uses the spec only; held-out pairs never
reach a search.

Sources are expected to emit parseable programs (the plugin client
filters external noise itself), but the drivers stay total when one does
not: a token sequence that fails to parse scores zero and remains in the
frontier, where a later debugger call may still repair it.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Protocol, Sequence, runtime_checkable

from .edits import KEEP, OP_KEEP, apply_edits, consumed_length, edit_distance, min_edit_script
from .interp import DEFAULT_STEP_LIMIT, Spec, pass_rate
from .mutations import applicable_mutations, apply_mutation, _count_and_pick
from .sampler import SampleLimits, sample_program
from .syntax import ParseError, TokenSeq, UnknownTokenError, flatten, parse
from .vocab import TOKEN_IDS

logger = logging.getLogger(__name__)

BEST_FIRST = "best_first"
GREEDY = "greedy"


class EmptyFrontierError(RuntimeError):
    """The synthesizer produced no candidates; the source is broken."""


@runtime_checkable
class CandidateSource(Protocol):
    beam: Optional[int]

    def synthesize(self, spec: Spec) -> list[TokenSeq]: ...

    def debug(self, program: TokenSeq, spec: Spec) -> list[TokenSeq]: ...


@dataclass(frozen=True)
class SearchConfig:
    k: int = 100
    beam: int = 32
    mode: str = BEST_FIRST
    step_limit: int = DEFAULT_STEP_LIMIT

    def __post_init__(self):
        if self.k < 1 or self.beam < 1:
            raise ValueError(f"bad search config {self}")
        if self.mode not in (BEST_FIRST, GREEDY):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class SearchOutcome:
    result: TokenSeq
    success: bool
    expansions_used: int
    programs_expanded: int
    trajectory: list[tuple[TokenSeq, Fraction]]
    stuck: bool = False


@dataclass
class _Entry:
    tokens: TokenSeq
    rate: Fraction
    depth: int
    order: int
    expanded: bool = False

    @property
    def rank(self):
        # max() key: higher rate, then shallower depth, then earlier order
        return (self.rate, -self.depth, -self.order)


def program_rate(tokens: TokenSeq, spec: Spec, step_limit: int) -> Fraction:
    """Pass rate of a token sequence; zero when it does not parse."""
    try:
        program = parse(tokens)
    except (ParseError, UnknownTokenError):
        return Fraction(0)
    return pass_rate(program, spec, step_limit)


class _Frontier:
    def __init__(self, spec: Spec, step_limit: int):
        self.spec = spec
        self.step_limit = step_limit
        self.entries: dict[TokenSeq, _Entry] = {}
        self._rate_cache: dict[TokenSeq, Fraction] = {}

    def rate(self, tokens: TokenSeq) -> Fraction:
        got = self._rate_cache.get(tokens)
        if got is None:
            got = program_rate(tokens, self.spec, self.step_limit)
            self._rate_cache[tokens] = got
        return got

    def add(self, tokens: TokenSeq, depth: int) -> None:
        if tokens not in self.entries:
            self.entries[tokens] = _Entry(tokens, self.rate(tokens), depth, len(self.entries))

    def best_unexpanded(self) -> Optional[_Entry]:
        pending = [e for e in self.entries.values() if not e.expanded]
        return max(pending, key=lambda e: e.rank) if pending else None

    def best_overall(self) -> _Entry:
        return max(self.entries.values(), key=lambda e: e.rank)


def _clipped(candidates: Sequence[TokenSeq], beam: Optional[int]) -> list[TokenSeq]:
    out = [tuple(cand) for cand in candidates]
    if beam is not None and len(out) > beam:
        out = out[:beam]
    return out


def best_first_search(
    synthesizer: CandidateSource,
    debugger: CandidateSource,
    spec: Spec,
    cfg: SearchConfig,
) -> SearchOutcome:
    if cfg.mode != BEST_FIRST:
        raise ValueError(f"config mode is {cfg.mode!r}")
    frontier = _Frontier(spec, cfg.step_limit)
    initial = _clipped(synthesizer.synthesize(spec), synthesizer.beam)
    if not initial:
        raise EmptyFrontierError("synthesizer returned no parseable candidates")
    for tokens in initial:
        frontier.add(tokens, depth=0)

    trajectory: list[tuple[TokenSeq, Fraction]] = []
    expansions = 0
    for _ in range(cfg.k):
        entry = frontier.best_unexpanded()
        if entry is None:
            break
        expansions += 1
        entry.expanded = True
        trajectory.append((entry.tokens, entry.rate))
        if entry.rate == 1:
            return SearchOutcome(
                entry.tokens, True, expansions, len(frontier.entries), trajectory
            )
        for tokens in _clipped(debugger.debug(entry.tokens, spec), debugger.beam):
            frontier.add(tokens, depth=entry.depth + 1)

    best = frontier.best_overall()
    return SearchOutcome(
        best.tokens, best.rate == 1, expansions, len(frontier.entries), trajectory
    )


def greedy_search(
    synthesizer: CandidateSource,
    debugger: CandidateSource,
    spec: Spec,
    cfg: SearchConfig,
) -> SearchOutcome:
    if cfg.mode != GREEDY:
        raise ValueError(f"config mode is {cfg.mode!r}")
    frontier = _Frontier(spec, cfg.step_limit)  # reused for rating and dedup keys
    initial = _clipped(synthesizer.synthesize(spec), synthesizer.beam)
    if not initial:
        raise EmptyFrontierError("synthesizer returned no parseable candidates")

    seen: set[TokenSeq] = set()
    ranked = sorted(
        initial,
        key=lambda t: (frontier.rate(t), -initial.index(t)),
        reverse=True,
    )
    current = ranked[0]
    trajectory = [(current, frontier.rate(current))]
    expansions = 1
    materialized = len(set(initial))
    best = current

    def better(a: TokenSeq, b: TokenSeq) -> TokenSeq:
        return a if frontier.rate(a) >= frontier.rate(b) else b

    stuck = False
    while frontier.rate(current) != 1 and expansions < cfg.k:
        candidates = [
            t
            for t in _clipped(debugger.debug(current, spec), debugger.beam)
            if t not in seen
        ]
        materialized += len(set(candidates))
        if not candidates:
            stuck = True
            logger.warning("greedy search stuck after %d expansions", expansions)
            break
        current = max(
            candidates,
            key=lambda t: (frontier.rate(t), -candidates.index(t)),
        )
        seen.add(current)
        best = better(best, current)
        expansions += 1
        trajectory.append((current, frontier.rate(current)))

    # on a stuck stop, fall back to the best program seen so far; a plain
    # budget stop returns the last selection
    result = best if stuck else current
    return SearchOutcome(
        result, frontier.rate(result) == 1, expansions, materialized, trajectory, stuck=stuck
    )


def run_search(
    synthesizer: CandidateSource, debugger: CandidateSource, spec: Spec, cfg: SearchConfig
) -> SearchOutcome:
    fn = best_first_search if cfg.mode == BEST_FIRST else greedy_search
    return fn(synthesizer, debugger, spec, cfg)


# --- built-in sources --------------------------------------------------------


class ConstantSynthesizer:
    """Always proposes the given programs (used to seed repair searches)."""

    def __init__(self, programs: Sequence[TokenSeq], beam: Optional[int] = None):
        self.programs = [tuple(p) for p in programs]
        self.beam = beam if beam is not None else max(len(self.programs), 1)

    def synthesize(self, spec: Spec) -> list[TokenSeq]:
        return list(self.programs)

    def debug(self, program: TokenSeq, spec: Spec) -> list[TokenSeq]:
        return []


class NullDebugger:
    """Never proposes anything."""

    beam = 1

    def synthesize(self, spec: Spec) -> list[TokenSeq]:
        return []

    def debug(self, program: TokenSeq, spec: Spec) -> list[TokenSeq]:
        return []


class RandomProgramSynthesizer:
    """Samples beam-many random programs per call; deterministic per seed."""

    def __init__(self, beam: int, limits: SampleLimits = SampleLimits(), seed: int = 0):
        self.beam = beam
        self.limits = limits
        self._rng = random.Random(seed)

    def synthesize(self, spec: Spec) -> list[TokenSeq]:
        out = []
        for _ in range(self.beam):
            limits = SampleLimits(
                self.limits.max_depth,
                self.limits.max_body_len,
                self.limits.max_total_tokens,
                rng_seed=self._rng.getrandbits(63),
            )
            out.append(flatten(sample_program(limits)))
        return out

    def debug(self, program: TokenSeq, spec: Spec) -> list[TokenSeq]:
        return []


class RandomEditDebugger:
    """Proposes beam-many single random mutations of the input program."""

    def __init__(self, beam: int, seed: int = 0):
        self.beam = beam
        self._rng = random.Random(seed)

    def synthesize(self, spec: Spec) -> list[TokenSeq]:
        return []

    def debug(self, program: TokenSeq, spec: Spec) -> list[TokenSeq]:
        ast = parse(program)
        return [
            flatten(apply_mutation(ast, _count_and_pick(ast, self._rng)))
            for _ in range(self.beam)
        ]


class EnumerativeDebugger:
    """Scores the program and all of its single-mutation neighbors by pass
    rate and returns the top beam, ranked by (pass rate desc, edit distance
    to the input asc, canonical token order)."""

    def __init__(self, beam: Optional[int] = None, step_limit: int = DEFAULT_STEP_LIMIT):
        self.beam = beam
        self.step_limit = step_limit

    def synthesize(self, spec: Spec) -> list[TokenSeq]:
        return []

    def debug(self, program: TokenSeq, spec: Spec) -> list[TokenSeq]:
        program = tuple(program)
        ast = parse(program)
        pool = {program}
        for m in applicable_mutations(ast):
            pool.add(flatten(apply_mutation(ast, m)))

        def key(tokens: TokenSeq):
            return (
                -pass_rate(parse(tokens), spec, self.step_limit),
                edit_distance(program, tokens),
                tuple(TOKEN_IDS[t] for t in tokens),
            )

        ranked = sorted(pool, key=key)
        return ranked if self.beam is None else ranked[: self.beam]


class OracleDebugger:
    """Test fixture: each debug call moves one minimal edit toward a
    fixed target program, so repeated calls reach it in exactly
    edit_distance steps."""

    beam = 1

    def __init__(self, target: TokenSeq):
        self.target = tuple(target)
        parse(self.target)

    def synthesize(self, spec: Spec) -> list[TokenSeq]:
        return [self.target]

    def debug(self, program: TokenSeq, spec: Spec) -> list[TokenSeq]:
        program = tuple(program)
        script = min_edit_script(program, self.target)
        first_edit = next((i for i, op in enumerate(script) if op.kind != KEEP), None)
        if first_edit is None:
            return [self.target]
        prefix = script[: first_edit + 1]
        keeps = (OP_KEEP,) * (len(program) - consumed_length(prefix))
        return [apply_edits(program, prefix + keeps)]
