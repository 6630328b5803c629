"""Syntactic program mutations and the repair-benchmark generator.

Six mutation kinds over the AST, each preserving parseability:

* ``insert(gap, a)`` / ``delete(site)`` / ``replace(site, a)`` act on
  action statements (insert adds one at any gap of any block);
* ``wrap(span, t, v)`` folds a non-empty run of sibling statements into a
  new ``if``/``ifelse``/``while``/``repeat`` construct (the span becomes
  the body, or the then-branch with an empty else);
* ``unwrap(site)`` replaces a control statement with its body;
* ``replace_control(site, v)`` swaps the condition or repeat count.

Sites are child-index paths: a step ``(slot, index)`` descends into block
``slot`` of the current node (0 = body/then, 1 = else). Every applicable
mutation is undoable by a single applicable mutation on the result; to
keep that exact at the token level, ``unwrap`` is only applicable where
re-wrapping the released statements rebuilds the original node (non-empty
body; for ifelse, a non-empty then-branch and an empty else-branch).

Parameter domains: the 5 actions, repeat counts 0..19, and 10 condition
forms (each atom, plus ``not`` over each atom).
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace as dc_replace
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .interp import DEFAULT_STEP_LIMIT, Spec, pass_rate, spec_from_obj, spec_to_obj
from .syntax import (
    Action,
    CondAtom,
    If,
    IfElse,
    Not,
    Prog,
    Repeat,
    Stmt,
    While,
    annotate,
    parse_text,
    to_text,
)
from .vocab import ACTIONS, ATOMIC_CONDITIONS, MAX_REPEAT, NOT

logger = logging.getLogger(__name__)

StmtPath = tuple[tuple[int, int], ...]
CondForm = tuple[str, ...]
CtrlValue = Union[int, CondForm]

CONDITION_FORMS: tuple[CondForm, ...] = tuple(
    [(a,) for a in ATOMIC_CONDITIONS] + [(NOT, a) for a in ATOMIC_CONDITIONS]
)
REPEAT_VALUES: tuple[int, ...] = tuple(range(MAX_REPEAT + 1))
WRAP_TYPES = ("if", "ifelse", "while", "repeat")

INSERT, DELETE, REPLACE, WRAP, UNWRAP, REPLACE_CONTROL = (
    "insert",
    "delete",
    "replace",
    "wrap",
    "unwrap",
    "replaceControl",
)


class InapplicableMutation(ValueError):
    pass


@dataclass(frozen=True)
class Mutation:
    kind: str
    owner: StmtPath = ()
    slot: int = 0
    index: int = 0
    end: Optional[int] = None  # wrap span end (exclusive)
    action: Optional[str] = None
    ctrl: Optional[str] = None
    value: Optional[CtrlValue] = None


# --- tree navigation ---------------------------------------------------------


def _blocks_of(node) -> tuple[tuple[Stmt, ...], ...]:
    if isinstance(node, Prog):
        return (node.body,)
    if isinstance(node, (While, Repeat, If)):
        return (node.body,)
    if isinstance(node, IfElse):
        return (node.then_body, node.else_body)
    return ()


def _with_block(node, slot: int, stmts: tuple[Stmt, ...]):
    if isinstance(node, (Prog, While, Repeat, If)):
        assert slot == 0
        return dc_replace(node, body=stmts, span=None)
    assert isinstance(node, IfElse)
    if slot == 0:
        return dc_replace(node, then_body=stmts, span=None)
    return dc_replace(node, else_body=stmts, span=None)


def _get_node(prog: Prog, path: StmtPath):
    node = prog
    for slot, index in path:
        blocks = _blocks_of(node)
        if slot >= len(blocks) or not 0 <= index < len(blocks[slot]):
            raise InapplicableMutation(f"bad site {path}")
        node = blocks[slot][index]
    return node


def _rebuild(node, path: StmtPath, slot: int, new_block: tuple[Stmt, ...]):
    if not path:
        blocks = _blocks_of(node)
        if slot >= len(blocks):
            raise InapplicableMutation(f"node has no block {slot}")
        return _with_block(node, slot, new_block)
    (child_slot, index), rest = path[0], path[1:]
    blocks = _blocks_of(node)
    if child_slot >= len(blocks) or not 0 <= index < len(blocks[child_slot]):
        raise InapplicableMutation(f"bad site {path}")
    block = blocks[child_slot]
    child = _rebuild(block[index], rest, slot, new_block)
    return _with_block(node, child_slot, block[:index] + (child,) + block[index + 1 :])


def _cond_to_form(cond) -> Optional[CondForm]:
    if isinstance(cond, CondAtom):
        return (cond.name,)
    if isinstance(cond, Not) and isinstance(cond.inner, CondAtom):
        return (NOT, cond.inner.name)
    return None  # deeper negation: outside the mutation parameter domain


def _form_to_cond(form: CondForm):
    if len(form) == 1:
        return CondAtom(form[0])
    return Not(CondAtom(form[1]))


def _ctrl_value(node) -> Optional[CtrlValue]:
    if isinstance(node, Repeat):
        return node.times
    return _cond_to_form(node.cond)


def _make_ctrl(ctrl: str, value: CtrlValue, body: tuple[Stmt, ...]) -> Stmt:
    if ctrl == "repeat":
        if not isinstance(value, int) or not 0 <= value <= MAX_REPEAT:
            raise InapplicableMutation(f"bad repeat count {value!r}")
        return Repeat(value, body)
    if not isinstance(value, tuple) or value not in CONDITION_FORMS:
        raise InapplicableMutation(f"bad condition {value!r}")
    cond = _form_to_cond(value)
    if ctrl == "if":
        return If(cond, body)
    if ctrl == "while":
        return While(cond, body)
    if ctrl == "ifelse":
        return IfElse(cond, body, ())
    raise InapplicableMutation(f"bad control type {ctrl!r}")


def _unwrap_allowed(node) -> bool:
    if isinstance(node, (While, Repeat, If)):
        return len(node.body) > 0
    if isinstance(node, IfElse):
        return len(node.then_body) > 0 and len(node.else_body) == 0
    return False


def _walk_blocks(prog: Prog):
    """Yield (owner_path, slot, stmts) for every block, in token order."""

    def rec(node, path: StmtPath):
        for slot, stmts in enumerate(_blocks_of(node)):
            yield path, slot, stmts
            for i, s in enumerate(stmts):
                if not isinstance(s, Action):
                    yield from rec(s, path + ((slot, i),))

    yield from rec(prog, ())


# --- enumeration -------------------------------------------------------------


@dataclass(frozen=True)
class _Group:
    count: int
    build: Callable[[int], Mutation] = field(compare=False)


def _wrap_values(ctrl: str) -> Sequence[CtrlValue]:
    return REPEAT_VALUES if ctrl == "repeat" else CONDITION_FORMS


def _groups(prog: Prog) -> list[_Group]:
    blocks = list(_walk_blocks(prog))
    action_sites: list[tuple[StmtPath, int, int, str]] = []
    ctrl_sites: list[tuple[StmtPath, int, int, Stmt]] = []
    for path, slot, stmts in blocks:
        for i, s in enumerate(stmts):
            if isinstance(s, Action):
                action_sites.append((path, slot, i, s.name))
            else:
                ctrl_sites.append((path, slot, i, s))

    groups: list[_Group] = []

    for path, slot, stmts in blocks:
        for gap in range(len(stmts) + 1):
            groups.append(
                _Group(
                    len(ACTIONS),
                    lambda k, p=path, sl=slot, g=gap: Mutation(
                        INSERT, p, sl, g, action=ACTIONS[k]
                    ),
                )
            )

    for path, slot, i, _name in action_sites:
        groups.append(_Group(1, lambda k, p=path, sl=slot, ix=i: Mutation(DELETE, p, sl, ix)))

    for path, slot, i, name in action_sites:
        others = tuple(a for a in ACTIONS if a != name)
        groups.append(
            _Group(
                len(others),
                lambda k, p=path, sl=slot, ix=i, o=others: Mutation(
                    REPLACE, p, sl, ix, action=o[k]
                ),
            )
        )

    for path, slot, stmts in blocks:
        for start in range(len(stmts)):
            for end in range(start + 1, len(stmts) + 1):
                for ctrl in WRAP_TYPES:
                    values = _wrap_values(ctrl)
                    groups.append(
                        _Group(
                            len(values),
                            lambda k, p=path, sl=slot, s=start, e=end, c=ctrl, v=values: Mutation(
                                WRAP, p, sl, s, end=e, ctrl=c, value=v[k]
                            ),
                        )
                    )

    for path, slot, i, node in ctrl_sites:
        if _unwrap_allowed(node):
            groups.append(
                _Group(1, lambda k, p=path, sl=slot, ix=i: Mutation(UNWRAP, p, sl, ix))
            )

    for path, slot, i, node in ctrl_sites:
        current = _ctrl_value(node)
        domain = REPEAT_VALUES if isinstance(node, Repeat) else CONDITION_FORMS
        values = tuple(v for v in domain if v != current)
        groups.append(
            _Group(
                len(values),
                lambda k, p=path, sl=slot, ix=i, v=values: Mutation(
                    REPLACE_CONTROL, p, sl, ix, value=v[k]
                ),
            )
        )

    return groups


def applicable_mutations(prog: Prog) -> list[Mutation]:
    """Every applicable (kind, site, parameter) triple, in canonical order."""
    return [g.build(k) for g in _groups(prog) for k in range(g.count)]


def _count_and_pick(prog: Prog, rng: random.Random) -> Mutation:
    groups = _groups(prog)
    total = sum(g.count for g in groups)
    k = rng.randrange(total)
    for g in groups:
        if k < g.count:
            return g.build(k)
        k -= g.count
    raise AssertionError("unreachable")


# --- application -------------------------------------------------------------


def apply_mutation(prog: Prog, m: Mutation) -> Prog:
    """Apply one mutation, returning a new span-annotated program."""
    owner = _get_node(prog, m.owner)
    blocks = _blocks_of(owner)
    if m.slot >= len(blocks):
        raise InapplicableMutation(f"node has no block {m.slot}")
    stmts = blocks[m.slot]

    if m.kind == INSERT:
        if not 0 <= m.index <= len(stmts) or m.action not in ACTIONS:
            raise InapplicableMutation(f"bad insert {m}")
        new = stmts[: m.index] + (Action(m.action),) + stmts[m.index :]
    elif m.kind == DELETE:
        if not 0 <= m.index < len(stmts) or not isinstance(stmts[m.index], Action):
            raise InapplicableMutation(f"bad delete {m}")
        new = stmts[: m.index] + stmts[m.index + 1 :]
    elif m.kind == REPLACE:
        if (
            not 0 <= m.index < len(stmts)
            or not isinstance(stmts[m.index], Action)
            or m.action not in ACTIONS
            or stmts[m.index].name == m.action
        ):
            raise InapplicableMutation(f"bad replace {m}")
        new = stmts[: m.index] + (Action(m.action),) + stmts[m.index + 1 :]
    elif m.kind == WRAP:
        if m.end is None or not 0 <= m.index < m.end <= len(stmts):
            raise InapplicableMutation(f"bad wrap span {m}")
        wrapped = _make_ctrl(m.ctrl, m.value, stmts[m.index : m.end])
        new = stmts[: m.index] + (wrapped,) + stmts[m.end :]
    elif m.kind == UNWRAP:
        if not 0 <= m.index < len(stmts):
            raise InapplicableMutation(f"bad unwrap site {m}")
        node = stmts[m.index]
        if not _unwrap_allowed(node):
            raise InapplicableMutation(f"unwrap not applicable at {m}")
        released = node.then_body if isinstance(node, IfElse) else node.body
        new = stmts[: m.index] + released + stmts[m.index + 1 :]
    elif m.kind == REPLACE_CONTROL:
        if not 0 <= m.index < len(stmts):
            raise InapplicableMutation(f"bad site {m}")
        node = stmts[m.index]
        if isinstance(node, Action):
            raise InapplicableMutation("replaceControl targets control nodes")
        if m.value == _ctrl_value(node):
            raise InapplicableMutation("replaceControl must change the value")
        if isinstance(node, Repeat):
            if not isinstance(m.value, int) or not 0 <= m.value <= MAX_REPEAT:
                raise InapplicableMutation(f"bad repeat count {m.value!r}")
            swapped = dc_replace(node, times=m.value, span=None)
        else:
            if m.value not in CONDITION_FORMS:
                raise InapplicableMutation(f"bad condition {m.value!r}")
            swapped = dc_replace(node, cond=_form_to_cond(m.value), span=None)
        new = stmts[: m.index] + (swapped,) + stmts[m.index + 1 :]
    else:
        raise InapplicableMutation(f"unknown mutation kind {m.kind!r}")

    return annotate(_rebuild(prog, m.owner, m.slot, new))


def mutate_n(prog: Prog, n: int, rng_seed: int) -> Prog:
    """Apply n mutations, each uniform over the applicable set; seeded."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(rng_seed)
    for _ in range(n):
        prog = apply_mutation(prog, _count_and_pick(prog, rng))
    return prog


# --- repair benchmark --------------------------------------------------------

EQUIVALENT_REDRAW_ATTEMPTS = 20


@dataclass(frozen=True)
class RepairTask:
    id: str
    broken: Prog
    gold: Prog
    spec: Spec
    held_out: Spec
    n_mutations: int
    flagged_equivalent: bool = False


def build_repair_benchmark(
    tasks: Iterable,
    n_range: tuple[int, int] = (1, 5),
    rng_seed: int = 0,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> list[RepairTask]:
    """One RepairTask per (task, n) for n in the inclusive range.

    Mutants that still pass the whole spec are redrawn up to 20 times,
    then kept and flagged as semantically equivalent; the flagged
    fraction is reported on the module logger.
    """
    lo, hi = n_range
    if lo < 1 or hi < lo:
        raise ValueError(f"bad n_range {n_range}")
    rng = random.Random(rng_seed)
    out: list[RepairTask] = []
    flagged = 0
    for task in tasks:
        for n in range(lo, hi + 1):
            broken = None
            equivalent = True
            for _ in range(EQUIVALENT_REDRAW_ATTEMPTS):
                broken = mutate_n(task.gold, n, rng.getrandbits(63))
                if pass_rate(broken, task.spec, step_limit) != Fraction(1):
                    equivalent = False
                    break
            flagged += equivalent
            out.append(
                RepairTask(
                    id=f"{task.id}-m{n}",
                    broken=broken,
                    gold=task.gold,
                    spec=task.spec,
                    held_out=task.held_out,
                    n_mutations=n,
                    flagged_equivalent=equivalent,
                )
            )
    if out:
        logger.info(
            "repair benchmark: %d tasks, %d flagged semantically equivalent (%.1f%%)",
            len(out),
            flagged,
            100.0 * flagged / len(out),
        )
    return out


def repair_task_to_obj(task: RepairTask) -> dict:
    return {
        "id": task.id,
        "n_mutations": task.n_mutations,
        "broken": to_text(task.broken),
        "gold": to_text(task.gold),
        "spec": spec_to_obj(task.spec),
        "held_out": spec_to_obj(task.held_out),
    }


def repair_task_from_obj(obj: dict, step_limit: int = DEFAULT_STEP_LIMIT) -> RepairTask:
    """Rebuild a repair task; the equivalence flag is recomputed from the
    spec, which is exactly how it was assigned at generation time."""
    broken = parse_text(obj["broken"])
    spec = spec_from_obj(obj["spec"])
    return RepairTask(
        id=obj["id"],
        broken=broken,
        gold=parse_text(obj["gold"]),
        spec=spec,
        held_out=spec_from_obj(obj["held_out"]),
        n_mutations=obj["n_mutations"],
        flagged_equivalent=pass_rate(broken, spec, step_limit) == Fraction(1),
    )
