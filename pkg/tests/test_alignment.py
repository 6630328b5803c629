import json
import random
from fractions import Fraction

import numpy as np
import pytest

from helpers import empty_world

from karelfix.alignment import (
    AlignmentGraph,
    DimensionMismatch,
    TokenRangeMismatch,
    aggregate,
    build_alignment,
    feature_from_bytes,
    feature_to_bytes,
    featurize_state,
)
from karelfix.interp import Trace, TraceEvent, execute
from karelfix.sampler import SampleLimits, sample_program
from karelfix.syntax import parse_text
from karelfix.world import World, sample_world


def _trace(program, world, step_limit=100):
    return execute(program, world, step_limit)[1]


def test_single_action_alignment():
    prog = parse_text("def run { move }")
    trace = _trace(prog, empty_world())
    graph = build_alignment(prog, [trace])
    assert graph.edges == ((1, 1, 3),)
    assert graph.n_tokens == 5


def test_repeat_links_keyword_and_action():
    prog = parse_text("def run { repeat ( 2 ) { move } }")
    trace = _trace(prog, empty_world(4, 4, 1, 0, "E"))
    graph = build_alignment(prog, [trace])
    assert set(graph.edges) == {(1, 1, 8), (1, 1, 3), (1, 2, 8), (1, 2, 3)}


def test_straight_line_edge_count_equals_events():
    prog = parse_text("def run { putMarker move turnLeft }")
    traces = [_trace(prog, empty_world()), _trace(prog, empty_world(4, 4, 0, 0, "S"))]
    graph = build_alignment(prog, traces)
    non_initial = sum(len(t.events) - 1 for t in traces)
    assert len(graph.edges) == non_initial


def test_examples_are_one_based():
    prog = parse_text("def run { move }")
    trace = _trace(prog, empty_world())
    graph = build_alignment(prog, [trace, trace, trace])
    assert {u for u, _, _ in graph.edges} == {1, 2, 3}


def test_token_range_mismatch_detected():
    prog = parse_text("def run { move }")
    trace = _trace(prog, empty_world())
    bogus = Trace(
        trace.events[:1] + (TraceEvent(trace.events[1].state, 99, frozenset()),),
        trace.status,
    )
    with pytest.raises(TokenRangeMismatch):
        build_alignment(prog, [bogus])


@pytest.mark.parametrize("seed", range(120))
def test_degree_law(seed):
    rng = random.Random(seed)
    prog = sample_program(SampleLimits(rng_seed=rng.getrandbits(32), max_depth=4))
    world = sample_world(rng.getrandbits(32))
    _, trace = execute(prog, world, 100)
    graph = build_alignment(prog, [trace])
    degree = {}
    for u, t, i in graph.edges:
        degree[(u, t)] = degree.get((u, t), 0) + 1
    depth = _nesting_depths(prog)
    for t, event in enumerate(trace.events):
        if event.producing_token is None:
            continue
        assert degree[(1, t)] == 1 + depth[event.producing_token]


def _nesting_depths(prog):
    from karelfix.syntax import Action, If, IfElse, Repeat, While

    out = {}

    def walk(stmts, d):
        for node in stmts:
            if isinstance(node, Action):
                out[node.span[0]] = d
            elif isinstance(node, IfElse):
                walk(node.then_body, d + 1)
                walk(node.else_body, d + 1)
            elif isinstance(node, (While, Repeat, If)):
                walk(node.body, d + 1)

    walk(prog.body, 0)
    return out


def test_aggregate_singleton_is_identity():
    graph = AlignmentGraph(((1, 1, 3),), n_tokens=5)
    vectors = {(1, 1): (Fraction(2), Fraction(5))}
    out = aggregate(graph, vectors)
    assert out[3] == (Fraction(2), Fraction(5))
    assert out[0] == (0, 0)


def test_aggregate_one_hot_matches_brute_force():
    rng = random.Random(0)
    for _ in range(30):
        prog = sample_program(SampleLimits(rng_seed=rng.getrandbits(32)))
        world = sample_world(rng.getrandbits(32))
        _, trace = execute(prog, world, 60)
        graph = build_alignment(prog, [trace])
        states = sorted({(u, t) for u, t, _ in graph.edges})
        if not states:
            continue
        dim = len(states)
        vectors = {
            s: tuple(Fraction(int(i == k)) for k in range(dim))
            for i, s in enumerate(states)
        }
        got = aggregate(graph, vectors)
        for i in range(graph.n_tokens):
            incident = [s for (u, t, j) in graph.edges if j == i for s in [(u, t)]]
            if not incident:
                assert got[i] == (0,) * dim
                continue
            expected = tuple(
                Fraction(sum(vectors[s][k] for s in incident), len(incident))
                for k in range(dim)
            )
            assert got[i] == expected


def test_aggregate_is_linear():
    prog = parse_text("def run { repeat ( 3 ) { move putMarker } }")
    _, trace = execute(prog, empty_world(6, 6, 1, 0, "E"))
    graph = build_alignment(prog, [trace])
    states = {(u, t) for u, t, _ in graph.edges}
    rng = random.Random(5)
    x = {s: (Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-5, 5))) for s in states}
    y = {s: (Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-5, 5))) for s in states}
    alpha, beta = Fraction(3, 7), Fraction(-2, 5)
    combo = {s: tuple(alpha * a + beta * b for a, b in zip(x[s], y[s])) for s in states}
    gx, gy, gc = aggregate(graph, x), aggregate(graph, y), aggregate(graph, combo)
    for i in range(graph.n_tokens):
        assert gc[i] == tuple(alpha * a + beta * b for a, b in zip(gx[i], gy[i]))


def test_aggregate_dimension_mismatch():
    graph = AlignmentGraph(((1, 1, 3),), n_tokens=5)
    with pytest.raises(DimensionMismatch):
        aggregate(graph, {(1, 1): (1, 2), (1, 2): (1, 2, 3)})
    with pytest.raises(DimensionMismatch):
        aggregate(graph, {(9, 9): (1, 2)})  # edge state missing


def test_graph_json_sorted():
    prog = parse_text("def run { repeat ( 2 ) { move } }")
    trace = _trace(prog, empty_world(4, 4, 1, 0, "E"))
    graph = build_alignment(prog, [trace])
    obj = json.loads(graph.to_json())
    assert obj["edges"] == sorted(obj["edges"])


def test_featurize_shape_and_blocks():
    w = empty_world(3, 3, 0, 0, "N")
    tensor = featurize_state(w, w, w)
    assert tensor.shape == (48, 18, 18)
    assert np.array_equal(tensor[0:16], tensor[16:32])
    assert np.array_equal(tensor[0:16], tensor[32:48])
    # facing north: channel 0 set at the robot cell only
    assert tensor[0, 0, 0] == 1.0
    assert tensor[1:4, 0, 0].sum() == 0.0
    assert tensor[0].sum() == 1.0


def test_featurize_channel_meanings():
    w = World(3, 4, 1, 2, "S", [(0, 0)], {(2, 3): 7})
    t = featurize_state(w, w, w)
    assert t[2, 1, 2] == 1.0  # south facing
    assert t[4, 0, 0] == 1.0  # obstacle
    assert t[6 + 6, 2, 3] == 1.0  # 7 markers -> channel 12
    # padding outside 3x4 carries the boundary feature in all three blocks
    for base in (0, 16, 32):
        assert t[base + 5, 3:, :].all()
        assert t[base + 5, :, 4:].all()
        assert t[base + 5, :3, :4].sum() == 0


def test_featurize_single_robot_per_state():
    for seed in range(25):
        w = sample_world(seed)
        t = featurize_state(w, w, w)
        for base in (0, 16, 32):  # one facing bit per 16-channel block
            assert t[base : base + 4].sum() == 1.0


def test_featurize_dimension_mismatch():
    a = empty_world(3, 3)
    b = empty_world(4, 4, 1, 1)
    with pytest.raises(DimensionMismatch):
        featurize_state(a, a, b)


def test_feature_binary_round_trip():
    w = sample_world(3)
    t = featurize_state(w, w, w)
    payload = feature_to_bytes(t)
    assert len(payload) == 8 + 48 * 18 * 18 * 4
    assert payload[:8] == bytes([48, 0, 18, 0, 18, 0, 0, 0])
    back = feature_from_bytes(payload)
    assert np.array_equal(back, t)
