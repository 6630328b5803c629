import random
from fractions import Fraction

import pytest

from karelfix.dataset import gen_dataset
from karelfix.interp import pass_rate
from karelfix.mutations import (
    CONDITION_FORMS,
    InapplicableMutation,
    Mutation,
    _count_and_pick,
    _groups,
    applicable_mutations,
    apply_mutation,
    build_repair_benchmark,
    mutate_n,
    repair_task_from_obj,
    repair_task_to_obj,
)
from karelfix.sampler import SampleLimits, sample_program
from karelfix.syntax import flatten, parse, parse_text, to_text


def test_condition_parameter_domain():
    assert len(CONDITION_FORMS) == 10
    assert ("frontIsClear",) in CONDITION_FORMS
    assert ("not", "noMarkersPresent") in CONDITION_FORMS


def test_enumeration_single_action_program():
    prog = parse_text("def run { move }")
    muts = applicable_mutations(prog)
    by_kind = {}
    for m in muts:
        by_kind.setdefault(m.kind, []).append(m)
    assert len(by_kind["insert"]) == 2 * 5
    assert len(by_kind["delete"]) == 1
    assert len(by_kind["replace"]) == 4
    # one span, wrapped as if/ifelse/while (10 conditions each) or repeat (20)
    assert len(by_kind["wrap"]) == 3 * 10 + 20
    assert "unwrap" not in by_kind
    assert "replaceControl" not in by_kind
    assert len(muts) == 65


def test_enumeration_empty_program():
    prog = parse_text("def run { }")
    muts = applicable_mutations(prog)
    assert [m.kind for m in muts] == ["insert"] * 5
    assert {m.action for m in muts} == {"move", "turnLeft", "turnRight", "pickMarker", "putMarker"}


def test_enumeration_control_program():
    prog = parse_text("def run { while ( frontIsClear ) { move } }")
    muts = applicable_mutations(prog)
    kinds = {m.kind for m in muts}
    assert {"insert", "delete", "replace", "wrap", "unwrap", "replaceControl"} <= kinds
    rc = [m for m in muts if m.kind == "replaceControl"]
    assert len(rc) == 9  # 10 condition forms minus the current one
    assert all(m.value != ("frontIsClear",) for m in rc)


def test_wrap_and_unwrap_are_token_inverses():
    prog = parse_text("def run { move }")
    wrap = Mutation("wrap", owner=(), slot=0, index=0, end=1, ctrl="repeat", value=4)
    wrapped = apply_mutation(prog, wrap)
    assert to_text(wrapped) == "def run { repeat ( 4 ) { move } }"
    unwrap = Mutation("unwrap", owner=(), slot=0, index=0)
    assert flatten(apply_mutation(wrapped, unwrap)) == flatten(prog)


def test_ifelse_wrap_puts_span_in_then_branch():
    prog = parse_text("def run { move turnLeft }")
    wrapped = apply_mutation(
        prog, Mutation("wrap", (), 0, 0, end=2, ctrl="ifelse", value=("not", "leftIsClear"))
    )
    assert to_text(wrapped) == "def run { ifelse ( not leftIsClear ) { move turnLeft } else { } }"
    back = apply_mutation(wrapped, Mutation("unwrap", (), 0, 0))
    assert flatten(back) == flatten(prog)


def test_unwrap_requires_invertible_shape():
    empty_body = parse_text("def run { while ( markersPresent ) { } }")
    assert all(m.kind != "unwrap" for m in applicable_mutations(empty_body))
    with pytest.raises(InapplicableMutation):
        apply_mutation(empty_body, Mutation("unwrap", (), 0, 0))

    two_branches = parse_text("def run { ifelse ( markersPresent ) { move } else { turnLeft } }")
    assert all(m.kind != "unwrap" for m in applicable_mutations(two_branches))


def test_replace_control_changes_only_the_value():
    prog = parse_text("def run { while ( frontIsClear ) { move } }")
    out = apply_mutation(prog, Mutation("replaceControl", (), 0, 0, value=("leftIsClear",)))
    assert to_text(out) == "def run { while ( leftIsClear ) { move } }"
    out = apply_mutation(prog, Mutation("replaceControl", (), 0, 0, value=("not", "frontIsClear")))
    assert to_text(out) == "def run { while ( not frontIsClear ) { move } }"
    with pytest.raises(InapplicableMutation):
        apply_mutation(prog, Mutation("replaceControl", (), 0, 0, value=("frontIsClear",)))


def test_replace_rejects_identity_action():
    prog = parse_text("def run { move }")
    with pytest.raises(InapplicableMutation):
        apply_mutation(prog, Mutation("replace", (), 0, 0, action="move"))


def test_delete_targets_actions_only():
    prog = parse_text("def run { repeat ( 2 ) { move } }")
    with pytest.raises(InapplicableMutation):
        apply_mutation(prog, Mutation("delete", (), 0, 0))


def test_nested_addressing():
    prog = parse_text("def run { ifelse ( markersPresent ) { move } else { turnLeft move } }")
    out = apply_mutation(prog, Mutation("delete", ((0, 0),), 1, 0))
    assert to_text(out) == "def run { ifelse ( markersPresent ) { move } else { move } }"


def test_count_based_picker_matches_enumeration():
    for seed in range(30):
        prog = sample_program(SampleLimits(rng_seed=seed))
        muts = applicable_mutations(prog)
        total = sum(g.count for g in _groups(prog))
        assert total == len(muts)
        rng = random.Random(seed)
        # the pick at index k must be exactly muts[k]
        k = rng.randrange(total)

        class _FixedRng:
            def randrange(self, n):
                assert n == total
                return k

        assert _count_and_pick(prog, _FixedRng()) == muts[k]


@pytest.mark.parametrize("seed", range(300))
def test_every_enumerated_mutation_preserves_validity(seed):
    prog = sample_program(SampleLimits(rng_seed=seed, max_total_tokens=20))
    for m in applicable_mutations(prog):
        mutated = apply_mutation(prog, m)
        assert parse(flatten(mutated)) == mutated


@pytest.mark.parametrize("seed", range(200))
def test_mutate_n_results_parse(seed):
    prog = sample_program(SampleLimits(rng_seed=seed))
    n = seed % 5 + 1
    out = mutate_n(prog, n, rng_seed=seed)
    assert parse(flatten(out)) == out
    assert mutate_n(prog, n, rng_seed=seed) == out  # deterministic


def test_mutate_n_rejects_nonpositive():
    with pytest.raises(ValueError):
        mutate_n(parse_text("def run { }"), 0, 1)


def test_mutation_kind_coverage_on_fixed_ast():
    prog = parse_text("def run { while ( frontIsClear ) { move } turnLeft }")
    seen = set()
    for seed in range(3000):
        rng = random.Random(seed)
        seen.add(_count_and_pick(prog, rng).kind)
    assert seen == {"insert", "delete", "replace", "wrap", "unwrap", "replaceControl"}


@pytest.mark.parametrize("seed", range(150))
def test_single_mutations_are_invertible(seed):
    rng = random.Random(seed)
    prog = sample_program(SampleLimits(rng_seed=rng.getrandbits(32), max_total_tokens=20))
    m = _count_and_pick(prog, rng)
    mutated = apply_mutation(prog, m)
    original = flatten(prog)
    assert any(
        flatten(apply_mutation(mutated, back)) == original
        for back in applicable_mutations(mutated)
    ), f"no inverse for {m}"


def _tiny_tasks(n=3):
    tasks = gen_dataset(n, SampleLimits(max_total_tokens=20), rng_seed=99)
    assert len(tasks) == n
    return tasks


def test_build_repair_benchmark_shape_and_flags():
    tasks = _tiny_tasks()
    repair = build_repair_benchmark(tasks, (1, 5), rng_seed=5)
    assert len(repair) == len(tasks) * 5
    for rt in repair:
        assert parse(flatten(rt.broken)) == rt.broken
        assert pass_rate(rt.gold, rt.spec) == Fraction(1)
        assert pass_rate(rt.gold, rt.held_out) == Fraction(1)
        if not rt.flagged_equivalent:
            assert pass_rate(rt.broken, rt.spec) < 1
        else:
            assert pass_rate(rt.broken, rt.spec) == Fraction(1)


def test_repair_benchmark_deterministic():
    tasks = _tiny_tasks(2)
    a = build_repair_benchmark(tasks, (1, 3), rng_seed=7)
    b = build_repair_benchmark(tasks, (1, 3), rng_seed=7)
    assert a == b


def test_repair_task_json_round_trip():
    tasks = _tiny_tasks(1)
    (rt,) = build_repair_benchmark(tasks, (2, 2), rng_seed=1)
    obj = repair_task_to_obj(rt)
    assert set(obj) == {"id", "n_mutations", "broken", "gold", "spec", "held_out"}
    back = repair_task_from_obj(obj)
    assert back == rt
