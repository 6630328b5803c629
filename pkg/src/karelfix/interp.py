"""Program execution: tracing interpreter, fast final-state runner, pass rate.

Two execution paths with identical semantics:

* ``execute`` walks the AST and records one trace event per executed
  action token, with the token index that produced it and the enclosing
  control-keyword token indices. This is the observable, test-oracle path.
* ``execute_fast`` runs the bytecode kernel and yields only the final
  state and status. ``pass_rate`` is built on it; scoring candidate
  programs against a spec is the hot loop of every search.

Failure semantics (total by design): moving into an obstacle or off the
grid, picking from an empty cell, or putting onto a 10-marker cell crash
the run; exceeding ``step_limit`` executed actions, or completing a while
iteration that executed no action while the guard held (the state cannot
have changed, so the loop is infinite), times it out. Crashed and timed
out runs have no final state and count as unsatisfied.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from array import array

from . import kernels
from .bytecode import (
    STATUS_MOVE_BLOCKED,
    STATUS_OK,
    STATUS_PICK_EMPTY,
    STATUS_PUT_FULL,
    STATUS_TIMEOUT,
    Compiled,
    compile_prog,
)
from .syntax import Action, If, IfElse, Not, Prog, Repeat, While
from .world import DIR_DELTAS, DIR_TO_INT, DIRECTIONS, World

DEFAULT_STEP_LIMIT = 1000

MOVE_BLOCKED = "MoveBlocked"
PICK_EMPTY = "PickEmpty"
PUT_FULL = "PutFull"


@dataclass(frozen=True)
class Ok:
    pass


@dataclass(frozen=True)
class Crash:
    reason: str
    at_step: int


@dataclass(frozen=True)
class Timeout:
    step_limit: int


ExecStatus = Union[Ok, Crash, Timeout]

_CRASH_REASONS = {
    STATUS_MOVE_BLOCKED: MOVE_BLOCKED,
    STATUS_PICK_EMPTY: PICK_EMPTY,
    STATUS_PUT_FULL: PUT_FULL,
}


@dataclass(frozen=True)
class TraceEvent:
    state: World
    producing_token: Optional[int]
    active_control_tokens: frozenset[int]


@dataclass(frozen=True)
class Trace:
    events: tuple[TraceEvent, ...]
    status: ExecStatus


@dataclass(frozen=True)
class Spec:
    """Input-output pairs specifying desired behavior."""

    pairs: tuple[tuple[World, World], ...]

    def __post_init__(self):
        if len(self.pairs) < 1:
            raise ValueError("a spec needs at least one pair")
        for inp, out in self.pairs:
            if (inp.h, inp.w) != (out.h, out.w):
                raise ValueError("input/output grid dims differ within a pair")

    @property
    def k(self) -> int:
        return len(self.pairs)


def spec_to_obj(spec: Spec) -> list[dict]:
    return [{"input": i.to_json_obj(), "output": o.to_json_obj()} for i, o in spec.pairs]


def spec_from_obj(obj) -> Spec:
    return Spec(
        tuple(
            (World.from_json_obj(p["input"]), World.from_json_obj(p["output"]))
            for p in obj
        )
    )


# --- traced interpreter ------------------------------------------------------


class _Halt(Exception):
    pass


class _Machine:
    def __init__(self, world: World, step_limit: int):
        self.h, self.w = world.h, world.w
        self.r, self.c = world.robot_r, world.robot_c
        self.d = DIR_TO_INT[world.robot_dir]
        self.obstacles = world.obstacles
        self.markers = dict(world.markers)
        self.step_limit = step_limit
        self.actions = 0
        self.controls: list[int] = []
        self.events: list[TraceEvent] = [TraceEvent(world, None, frozenset())]
        self.status: ExecStatus = Ok()

    def snapshot(self) -> World:
        return World(
            self.h, self.w, self.r, self.c, DIRECTIONS[self.d], self.obstacles, self.markers
        )

    def clear(self, d: int) -> bool:
        dr, dc = DIR_DELTAS[d]
        nr, nc = self.r + dr, self.c + dc
        return 0 <= nr < self.h and 0 <= nc < self.w and (nr, nc) not in self.obstacles

    def eval_cond(self, cond) -> bool:
        if isinstance(cond, Not):
            return not self.eval_cond(cond.inner)
        name = cond.name
        if name == "frontIsClear":
            return self.clear(self.d)
        if name == "leftIsClear":
            return self.clear((self.d + 3) & 3)
        if name == "rightIsClear":
            return self.clear((self.d + 1) & 3)
        here = self.markers.get((self.r, self.c), 0)
        return here > 0 if name == "markersPresent" else here == 0

    def crash(self, reason: str):
        self.status = Crash(reason, self.actions + 1)
        raise _Halt

    def do_action(self, node: Action) -> None:
        if self.actions >= self.step_limit:
            self.status = Timeout(self.step_limit)
            raise _Halt
        name = node.name
        if name == "move":
            if not self.clear(self.d):
                self.crash(MOVE_BLOCKED)
            dr, dc = DIR_DELTAS[self.d]
            self.r += dr
            self.c += dc
        elif name == "turnLeft":
            self.d = (self.d + 3) & 3
        elif name == "turnRight":
            self.d = (self.d + 1) & 3
        elif name == "pickMarker":
            cell = (self.r, self.c)
            n = self.markers.get(cell, 0)
            if n == 0:
                self.crash(PICK_EMPTY)
            if n == 1:
                del self.markers[cell]
            else:
                self.markers[cell] = n - 1
        else:  # putMarker
            cell = (self.r, self.c)
            n = self.markers.get(cell, 0)
            if n == 10:
                self.crash(PUT_FULL)
            self.markers[cell] = n + 1
        self.actions += 1
        self.events.append(
            TraceEvent(self.snapshot(), node.span[0], frozenset(self.controls))
        )

    def run_body(self, stmts) -> None:
        for node in stmts:
            if isinstance(node, Action):
                self.do_action(node)
            elif isinstance(node, If):
                if self.eval_cond(node.cond):
                    self.controls.append(node.span[0])
                    self.run_body(node.body)
                    self.controls.pop()
            elif isinstance(node, IfElse):
                branch = node.then_body if self.eval_cond(node.cond) else node.else_body
                self.controls.append(node.span[0])
                self.run_body(branch)
                self.controls.pop()
            elif isinstance(node, Repeat):
                self.controls.append(node.span[0])
                for _ in range(node.times):
                    self.run_body(node.body)
                self.controls.pop()
            elif isinstance(node, While):
                self.controls.append(node.span[0])
                while self.eval_cond(node.cond):
                    before = self.actions
                    self.run_body(node.body)
                    if self.actions == before:
                        # no action ran, so the guard cannot have changed
                        self.status = Timeout(self.step_limit)
                        raise _Halt
                self.controls.pop()
            else:  # pragma: no cover
                raise TypeError(f"not a statement: {node!r}")


def execute(
    program: Prog, world: World, step_limit: int = DEFAULT_STEP_LIMIT
) -> tuple[Optional[World], Trace]:
    """Run a program on one input, recording the full trace."""
    if step_limit < 1:
        raise ValueError("step_limit must be >= 1")
    if program.span is None:
        raise ValueError("program must be span-annotated (use syntax.annotate)")
    m = _Machine(world, step_limit)
    try:
        m.run_body(program.body)
    except _Halt:
        pass
    trace = Trace(tuple(m.events), m.status)
    final = m.events[-1].state if isinstance(m.status, Ok) else None
    return final, trace


# --- fast path ---------------------------------------------------------------


def _encode_grids(world: World) -> tuple[bytes, bytes]:
    obstacles = bytearray(world.h * world.w)
    for (r, c) in world.obstacles:
        obstacles[r * world.w + c] = 1
    markers = bytearray(world.h * world.w)
    for (r, c), n in world.markers.items():
        markers[r * world.w + c] = n
    return bytes(obstacles), bytes(markers)


def _run_compiled(code: Compiled, world: World, step_limit: int):
    obstacles, markers0 = _encode_grids(world)
    markers = bytearray(markers0)
    scratch = array("i", [0] * code.n_slots)
    snaps = array("i", [0] * code.n_slots)
    status, at_step, r, c, d, actions = kernels.run(
        code.code,
        world.h,
        world.w,
        world.robot_r,
        world.robot_c,
        DIR_TO_INT[world.robot_dir],
        obstacles,
        markers,
        step_limit,
        scratch,
        snaps,
    )
    return status, at_step, r, c, d, actions, markers


def _decode_status(status: int, at_step: int, step_limit: int) -> ExecStatus:
    if status == STATUS_OK:
        return Ok()
    if status == STATUS_TIMEOUT:
        return Timeout(step_limit)
    return Crash(_CRASH_REASONS[status], at_step)


def execute_fast(
    program: Prog, world: World, step_limit: int = DEFAULT_STEP_LIMIT
) -> tuple[Optional[World], ExecStatus, int]:
    """Kernel-backed execution: (final state or None, status, action count)."""
    code = compile_prog(program)
    status, at_step, r, c, d, actions, markers = _run_compiled(code, world, step_limit)
    if status != STATUS_OK:
        return None, _decode_status(status, at_step, step_limit), actions
    marker_map = {
        (i // world.w, i % world.w): n for i, n in enumerate(markers) if n
    }
    final = World(world.h, world.w, r, c, DIRECTIONS[d], world.obstacles, marker_map)
    return final, Ok(), actions


def _pair_satisfied(code: Compiled, inp: World, out: World, step_limit: int) -> bool:
    if inp.obstacles != out.obstacles:
        return False
    status, _, r, c, d, _, markers = _run_compiled(code, inp, step_limit)
    if status != STATUS_OK:
        return False
    if (r, c, DIRECTIONS[d]) != (out.robot_r, out.robot_c, out.robot_dir):
        return False
    _, expected_markers = _encode_grids(out)
    return markers == expected_markers


def pass_rate(program: Prog, spec: Spec, step_limit: int = DEFAULT_STEP_LIMIT) -> Fraction:
    """Exact fraction of spec pairs the program satisfies."""
    code = compile_prog(program)
    passed = sum(
        1 for inp, out in spec.pairs if _pair_satisfied(code, inp, out, step_limit)
    )
    return Fraction(passed, spec.k)
