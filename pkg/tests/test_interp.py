import random
from fractions import Fraction

import pytest

from golden_interp import GOLDEN_CASES, check_case, make_world
from helpers import empty_world

from karelfix import kernels
from karelfix.interp import (
    Ok,
    Spec,
    Timeout,
    execute,
    execute_fast,
    pass_rate,
    spec_from_obj,
    spec_to_obj,
)
from karelfix.sampler import SampleLimits, sample_program
from karelfix.syntax import parse_text
from karelfix.world import World, sample_world


@pytest.mark.parametrize("case", GOLDEN_CASES, ids=[c[0] for c in GOLDEN_CASES])
def test_golden_oracle_cases(case):
    _, program_text, world_kw, step_limit, expected = case
    check_case(parse_text(program_text), make_world(world_kw), step_limit, expected)


def test_golden_suite_is_large_enough():
    assert len(GOLDEN_CASES) >= 25


def test_determinism_bit_for_bit():
    prog = parse_text("def run { while ( frontIsClear ) { move putMarker } }")
    w = sample_world(11)
    a = execute(prog, w, 50)
    b = execute(prog, w, 50)
    assert a == b


@pytest.mark.parametrize("seed", range(200))
def test_traced_and_fast_paths_agree(seed):
    rng = random.Random(seed)
    prog = sample_program(SampleLimits(rng_seed=rng.getrandbits(32)))
    world = sample_world(rng.getrandbits(32))
    limit = rng.choice([3, 20, 1000])
    final, trace = execute(prog, world, limit)
    fast_final, fast_status, fast_actions = execute_fast(prog, world, limit)
    assert fast_status == trace.status
    assert fast_final == final
    if isinstance(trace.status, Ok):
        assert fast_actions == len(trace.events) - 1


def test_kernel_implementations_agree():
    from array import array

    from karelfix.bytecode import compile_prog
    from karelfix.interp import _encode_grids
    from karelfix.world import DIR_TO_INT

    impls = kernels.implementations()
    assert "pure" in impls
    for seed in range(100):
        prog = sample_program(SampleLimits(rng_seed=seed))
        world = sample_world(seed + 9000)
        code = compile_prog(prog)
        obstacles, markers0 = _encode_grids(world)
        results = []
        for impl in impls.values():
            markers = bytearray(markers0)
            results.append(
                (
                    impl.run(
                        code.code, world.h, world.w, world.robot_r, world.robot_c,
                        DIR_TO_INT[world.robot_dir], obstacles, markers, 50,
                        array("i", [0] * code.n_slots), array("i", [0] * code.n_slots),
                    ),
                    bytes(markers),
                )
            )
        assert all(r == results[0] for r in results)


def test_conservation_properties():
    for seed in range(60):
        prog = sample_program(SampleLimits(rng_seed=seed))
        world = sample_world(seed + 1000)
        _, trace = execute(prog, world, 200)
        prev = trace.events[0].state
        for ev in trace.events[1:]:
            cur = ev.state
            assert cur.obstacles == prev.obstacles
            moved = (cur.robot_r, cur.robot_c) != (prev.robot_r, prev.robot_c)
            turned = cur.robot_dir != prev.robot_dir
            marker_delta = sum(cur.markers.values()) - sum(prev.markers.values())
            assert [moved, turned, marker_delta != 0].count(True) <= 1
            if moved:
                assert abs(cur.robot_r - prev.robot_r) + abs(cur.robot_c - prev.robot_c) == 1
            assert marker_delta in (-1, 0, 1)
            prev = cur


def test_loop_free_trace_length():
    prog = parse_text("def run { move move turnLeft putMarker }")
    w = empty_world(5, 5, 2, 1, "E")
    _, trace = execute(prog, w)
    assert len(trace.events) == 5


def test_pass_rate_self_consistency():
    prog = parse_text("def run { putMarker move }")
    inputs = [empty_world(4, 4, 1, 1, "E"), empty_world(4, 4, 2, 2, "S")]
    pairs = []
    for inp in inputs:
        final, trace = execute(prog, inp)
        assert isinstance(trace.status, Ok)
        pairs.append((inp, final))
    spec = Spec(tuple(pairs))
    assert pass_rate(prog, spec) == Fraction(1)


def test_pass_rate_three_of_five():
    prog = parse_text("def run { move }")
    pairs = []
    for i in range(3):  # satisfied: true executed output
        inp = empty_world(4, 4, i, 0, "E")
        final, _ = execute(prog, inp)
        pairs.append((inp, final))
    for i in range(2):  # unsatisfied: wrong direction in expected output
        inp = empty_world(4, 4, i, 0, "E")
        final, _ = execute(prog, inp)
        wrong = World(4, 4, final.robot_r, final.robot_c, "S")
        pairs.append((inp, wrong))
    spec = Spec(tuple(pairs))
    assert pass_rate(prog, spec) == Fraction(3, 5)


def test_pass_rate_crash_counts_zero():
    prog = parse_text("def run { pickMarker }")
    inp = empty_world()
    spec = Spec(((inp, inp),))
    assert pass_rate(prog, spec) == Fraction(0)


def test_pass_rate_monotone_under_restriction():
    prog = parse_text("def run { move }")
    good_in = empty_world(4, 4, 1, 1, "E")
    good_out, _ = execute(prog, good_in)
    bad_in = empty_world(4, 4, 2, 2, "E")
    spec = Spec(((good_in, good_out), (bad_in, bad_in)))
    restricted = Spec(((good_in, good_out),))
    assert pass_rate(prog, restricted) >= pass_rate(prog, spec)


def test_spec_validation():
    with pytest.raises(ValueError):
        Spec(())
    with pytest.raises(ValueError):
        Spec(((empty_world(3, 3), empty_world(4, 4, 1, 1)),))


def test_spec_json_round_trip():
    inp = sample_world(5, dims=(4, 6))
    out = sample_world(6, dims=(4, 6))
    spec = Spec(((inp, out),))
    assert spec_from_obj(spec_to_obj(spec)) == spec


def test_timeout_counts_executed_actions_only():
    prog = parse_text("def run { repeat ( 5 ) { move } }")
    w = World(2, 18, 0, 0, "E")
    final, trace = execute(prog, w, step_limit=5)
    assert isinstance(trace.status, Ok)
    final, trace = execute(prog, w, step_limit=4)
    assert trace.status == Timeout(4)
    assert final is None


def test_active_controls_match_ast_nesting():
    # the dynamic control stack must equal the static path of control
    # keywords for every produced event
    for seed in range(80):
        prog = sample_program(SampleLimits(rng_seed=seed, max_depth=4))
        world = sample_world(seed + 5000)
        _, trace = execute(prog, world, 100)
        expected = _static_control_map(prog)
        for ev in trace.events[1:]:
            assert ev.active_control_tokens == expected[ev.producing_token]


def _static_control_map(prog):
    """Action token index -> set of enclosing control keyword token indices."""
    out = {}

    def walk(node, above):
        from karelfix.syntax import Action, If, IfElse, Repeat, While

        if isinstance(node, Action):
            out[node.span[0]] = frozenset(above)
            return
        if isinstance(node, (While, Repeat, If)):
            for s in node.body:
                walk(s, above | {node.span[0]})
        elif isinstance(node, IfElse):
            for s in node.then_body + node.else_body:
                walk(s, above | {node.span[0]})

    for s in prog.body:
        walk(s, frozenset())
    return out
