import random
from fractions import Fraction

import pytest

from karelfix.dataset import gen_dataset
from karelfix.edits import edit_distance
from karelfix.interp import Spec, pass_rate
from karelfix.mutations import build_repair_benchmark
from karelfix.sampler import SampleLimits, sample_program
from karelfix.search import (
    BEST_FIRST,
    GREEDY,
    ConstantSynthesizer,
    EmptyFrontierError,
    EnumerativeDebugger,
    NullDebugger,
    OracleDebugger,
    RandomEditDebugger,
    RandomProgramSynthesizer,
    SearchConfig,
    best_first_search,
    greedy_search,
)
from karelfix.syntax import flatten, parse, parse_text, tokenize
from karelfix.world import World

# fixed 2x4 corridor spec: reach the right wall from two starting columns
_IN1 = World(2, 4, 0, 0, "E")
_IN2 = World(2, 4, 0, 1, "E")
_OUT = World(2, 4, 0, 3, "E")
CORRIDOR = Spec(((_IN1, _OUT), (_IN2, _OUT)))

P_WHILE = "def run { while ( frontIsClear ) { move } }"
P_MM = "def run { move move }"
P_MMM = "def run { move move move }"
P_M = "def run { move }"
P_TL = "def run { turnLeft }"
P_EMPTY = "def run { }"


class ScriptedSource:
    """Candidate source driven by literal program-text tables."""

    def __init__(self, synth=(), debug_map=None, beam=8):
        self.synth = list(synth)
        self.debug_map = dict(debug_map or {})
        self.beam = beam

    def synthesize(self, spec):
        return [tokenize(t) for t in self.synth]

    def debug(self, program, spec):
        return [tokenize(t) for t in self.debug_map.get(" ".join(program), [])]


def test_corridor_rates_are_as_designed():
    rates = {
        P_WHILE: Fraction(1),
        P_MM: Fraction(1, 2),
        P_MMM: Fraction(1, 2),
        P_M: Fraction(0),
        P_TL: Fraction(0),
        P_EMPTY: Fraction(0),
    }
    for text, expected in rates.items():
        assert pass_rate(parse_text(text), CORRIDOR) == expected


def _transcript(outcome):
    return [(" ".join(p), r) for p, r in outcome.trajectory]


def test_best_first_transcript_instance_one():
    source = ScriptedSource(
        synth=[P_MM, P_M],
        debug_map={P_MM: [P_MMM, P_EMPTY], P_MMM: [P_WHILE]},
    )
    out = best_first_search(source, source, CORRIDOR, SearchConfig(k=10, beam=8))
    assert _transcript(out) == [
        (P_MM, Fraction(1, 2)),
        (P_MMM, Fraction(1, 2)),
        (P_WHILE, Fraction(1)),
    ]
    assert out.success and out.result == tokenize(P_WHILE)
    assert out.expansions_used == 3
    assert out.programs_expanded == 5


def test_best_first_transcript_instance_two_final_step_result():
    # the perfect program arrives on the last allowed expansion and is
    # returned by the closing argmax without being expanded itself
    source = ScriptedSource(synth=[P_M], debug_map={P_M: [P_WHILE]})
    out = best_first_search(source, source, CORRIDOR, SearchConfig(k=1, beam=8))
    assert _transcript(out) == [(P_M, Fraction(0))]
    assert out.success and out.result == tokenize(P_WHILE)
    assert out.expansions_used == 1
    assert out.programs_expanded == 2


def test_best_first_transcript_instance_three_exhausted_frontier():
    source = ScriptedSource(synth=[P_M, P_TL], debug_map={P_TL: [P_EMPTY]})
    out = best_first_search(source, source, CORRIDOR, SearchConfig(k=10, beam=8))
    assert _transcript(out) == [
        (P_M, Fraction(0)),
        (P_TL, Fraction(0)),
        (P_EMPTY, Fraction(0)),
    ]
    assert not out.success
    # ties resolve by depth then insertion order: the first synthesized wins
    assert out.result == tokenize(P_M)
    assert out.expansions_used == 3
    assert out.programs_expanded == 3


def test_greedy_follows_debugger_chain():
    source = ScriptedSource(
        synth=[P_MM, P_M],
        debug_map={P_MM: [P_MMM, P_EMPTY], P_MMM: [P_WHILE]},
    )
    out = greedy_search(source, source, CORRIDOR, SearchConfig(k=10, beam=8, mode=GREEDY))
    assert _transcript(out) == [
        (P_MM, Fraction(1, 2)),
        (P_MMM, Fraction(1, 2)),
        (P_WHILE, Fraction(1)),
    ]
    assert out.success and out.expansions_used == 3


def test_greedy_reports_stuck_and_returns_best_seen():
    source = ScriptedSource(synth=[P_MM], debug_map={P_MM: [P_M], P_M: [P_M]})
    out = greedy_search(source, source, CORRIDOR, SearchConfig(k=10, beam=8, mode=GREEDY))
    assert out.stuck
    assert not out.success
    assert out.result == tokenize(P_MM)  # best seen, not the dead end
    assert out.expansions_used == 2


def test_greedy_with_null_debugger_returns_synth_best():
    source = ScriptedSource(synth=[P_MM, P_M])
    out = greedy_search(source, NullDebugger(), CORRIDOR, SearchConfig(k=5, beam=8, mode=GREEDY))
    assert out.result == tokenize(P_MM)
    assert not out.success and out.stuck


def test_mode_mismatch_rejected():
    source = ScriptedSource(synth=[P_M])
    with pytest.raises(ValueError):
        best_first_search(source, source, CORRIDOR, SearchConfig(mode=GREEDY))
    with pytest.raises(ValueError):
        greedy_search(source, source, CORRIDOR, SearchConfig(mode=BEST_FIRST))


def test_empty_frontier_raises():
    source = ScriptedSource(synth=[])
    with pytest.raises(EmptyFrontierError):
        best_first_search(source, source, CORRIDOR, SearchConfig(k=3, beam=4))
    with pytest.raises(EmptyFrontierError):
        greedy_search(source, source, CORRIDOR, SearchConfig(k=3, beam=4, mode=GREEDY))


def test_unparseable_candidates_score_zero_but_stay_reachable():
    class Raw:
        beam = 8

        def synthesize(self, spec):
            return [tokenize(P_M), ("def", "run", "{", "move"), tokenize(P_WHILE)]

        def debug(self, program, spec):
            return []

    source = Raw()
    out = best_first_search(source, source, CORRIDOR, SearchConfig(k=3, beam=8))
    assert out.success and out.result == tokenize(P_WHILE)
    assert out.programs_expanded == 3  # the broken sequence is retained, rated 0


def test_immediate_success_takes_one_expansion():
    source = ScriptedSource(synth=[P_WHILE])
    out = best_first_search(source, source, CORRIDOR, SearchConfig(k=100, beam=8))
    assert out.success and out.expansions_used == 1
    assert out.programs_expanded == 1


def _oracle_cases(n):
    tasks = gen_dataset(n, SampleLimits(max_total_tokens=24), rng_seed=31)
    rng = random.Random(17)
    for task in tasks:
        broken = flatten(sample_program(SampleLimits(rng_seed=rng.getrandbits(32))))
        yield task, broken


def satisfying_distance(broken, target, spec):
    """Edit distance from `broken` to the first program satisfying `spec`
    along the oracle's edit path (the path ends at `target`, which
    satisfies by construction). Each path step is exactly one edit."""
    from karelfix.search import program_rate

    oracle = OracleDebugger(target)
    current, d = broken, 0
    while program_rate(current, spec, 1000) != 1:
        (current,) = oracle.debug(current, spec)
        d += 1
    return d


@pytest.mark.parametrize("mode", [BEST_FIRST, GREEDY])
def test_oracle_debugger_reaches_a_satisfier_in_distance_plus_one(mode):
    for task, broken in _oracle_cases(25):
        gold = flatten(task.gold)
        d = satisfying_distance(broken, gold, task.spec)
        cfg = SearchConfig(k=edit_distance(broken, gold) + 2, beam=4, mode=mode)
        synth = ConstantSynthesizer([broken])
        oracle = OracleDebugger(gold)
        search = best_first_search if mode == BEST_FIRST else greedy_search
        out = search(synth, oracle, task.spec, cfg)
        assert out.success
        assert out.expansions_used == d + 1


def test_oracle_best_first_and_greedy_agree():
    for task, broken in _oracle_cases(10):
        gold = flatten(task.gold)
        d = edit_distance(broken, gold)
        synth = ConstantSynthesizer([broken])
        a = best_first_search(
            synth, OracleDebugger(gold), task.spec, SearchConfig(k=d + 2, beam=4)
        )
        b = greedy_search(
            synth, OracleDebugger(gold), task.spec, SearchConfig(k=d + 2, beam=4, mode=GREEDY)
        )
        assert a.result == b.result
        assert a.success == b.success
        assert a.expansions_used == b.expansions_used


def test_oracle_on_target_returns_target():
    gold = tokenize(P_WHILE)
    oracle = OracleDebugger(gold)
    assert oracle.debug(gold, CORRIDOR) == [gold]


def test_oracle_each_call_reduces_distance_by_one():
    gold = tokenize(P_WHILE)
    oracle = OracleDebugger(gold)
    current = tokenize("def run { turnLeft move }")
    d = edit_distance(current, gold)
    for expected in range(d - 1, -1, -1):
        (current,) = oracle.debug(current, CORRIDOR)
        assert edit_distance(current, gold) == expected
    assert current == gold


def test_budget_law_with_random_sources():
    tasks = gen_dataset(3, SampleLimits(max_total_tokens=20), rng_seed=77)
    for i, task in enumerate(tasks):
        cfg = SearchConfig(k=12, beam=6)
        synth = RandomProgramSynthesizer(beam=6, seed=i)
        dbg = RandomEditDebugger(beam=6, seed=i + 100)
        out = best_first_search(synth, dbg, task.spec, cfg)
        assert out.expansions_used <= cfg.k
        assert out.programs_expanded <= 6 + cfg.k * cfg.beam
        if out.success:
            assert pass_rate(parse(out.result), task.spec) == 1


def test_enumerative_debugger_repairs_single_mutation():
    tasks = gen_dataset(4, SampleLimits(max_total_tokens=20), rng_seed=5)
    repair = build_repair_benchmark(tasks, (1, 1), rng_seed=9)
    dbg = EnumerativeDebugger(beam=None)
    for rt in repair:
        if rt.flagged_equivalent:
            continue
        candidates = dbg.debug(flatten(rt.broken), rt.spec)
        assert flatten(rt.gold) in candidates
        top = candidates[0]
        assert pass_rate(parse(top), rt.spec) == Fraction(1)


def test_enumerative_debugger_keeps_passing_input_on_top():
    gold = parse_text(P_WHILE)
    dbg = EnumerativeDebugger(beam=None)
    candidates = dbg.debug(flatten(gold), CORRIDOR)
    assert candidates[0] == flatten(gold)
    assert pass_rate(parse(candidates[0]), CORRIDOR) == Fraction(1)


def test_enumerative_debugger_beam_one():
    dbg = EnumerativeDebugger(beam=1)
    assert len(dbg.debug(tokenize(P_M), CORRIDOR)) == 1


def test_search_termination_with_adversarial_source():
    class Firehose:
        beam = 4

        def synthesize(self, spec):
            return [tokenize(P_M)]

        def debug(self, program, spec):
            return [tokenize(P_M), tokenize(P_TL), tokenize(P_EMPTY), tokenize(P_MM)]

    out = best_first_search(Firehose(), Firehose(), CORRIDOR, SearchConfig(k=7, beam=4))
    assert out.expansions_used <= 7
