"""Flat bytecode for the execution kernels.

The tracing interpreter walks the AST directly; the hot path (pass-rate
scoring) runs this bytecode in a tight loop instead, either compiled
(Cython) or pure Python. Instructions are stride-4 int records::

    ACT      a=action kind (0..4)      b=producing token index
    BF       a=condition code (0..4)   b=negate flag   c=target if false
    JMP      a=target
    SETC     a=counter slot            b=initial count
    BZ       a=counter slot            b=target if counter is zero
    DEC      a=counter slot
    SNAP     a=slot (records the action count at loop entry)
    CHECKJMP a=slot  b=back-edge target; a while iteration that executed
             no action cannot have changed the guard, so the loop is
             provably infinite and the kernel reports a timeout
    HALT

Counter/snapshot slots are assigned statically per loop node; re-entry
resets them, and the language has no recursion.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from .syntax import Action, CondAtom, If, IfElse, Not, Prog, Repeat, While, flatten
from .vocab import ACTIONS, ATOMIC_CONDITIONS

OP_ACT, OP_BF, OP_JMP, OP_SETC, OP_BZ, OP_DEC, OP_SNAP, OP_CHECKJMP, OP_HALT = range(9)

ACTION_CODES = {name: i for i, name in enumerate(ACTIONS)}
CONDITION_CODES = {name: i for i, name in enumerate(ATOMIC_CONDITIONS)}

# kernel exit statuses, shared with karelfix.kernels
STATUS_OK = 0
STATUS_MOVE_BLOCKED = 1
STATUS_PICK_EMPTY = 2
STATUS_PUT_FULL = 3
STATUS_TIMEOUT = 4


@dataclass(frozen=True)
class Compiled:
    code: array
    n_slots: int
    n_tokens: int


class _Emitter:
    def __init__(self):
        self.rows: list[list[int]] = []
        self.n_slots = 0

    def emit(self, op: int, a: int = 0, b: int = 0, c: int = 0) -> int:
        self.rows.append([op, a, b, c])
        return len(self.rows) - 1

    def new_slot(self) -> int:
        self.n_slots += 1
        return self.n_slots - 1

    def here(self) -> int:
        return len(self.rows)

    def cond(self, node) -> tuple[int, int]:
        negate = 0
        while isinstance(node, Not):
            negate ^= 1
            node = node.inner
        assert isinstance(node, CondAtom)
        return CONDITION_CODES[node.name], negate

    def stmt(self, node) -> None:
        if isinstance(node, Action):
            self.emit(OP_ACT, ACTION_CODES[node.name], node.span[0])
        elif isinstance(node, If):
            code, neg = self.cond(node.cond)
            bf = self.emit(OP_BF, code, neg)
            self.body(node.body)
            self.rows[bf][3] = self.here()
        elif isinstance(node, IfElse):
            code, neg = self.cond(node.cond)
            bf = self.emit(OP_BF, code, neg)
            self.body(node.then_body)
            jmp = self.emit(OP_JMP)
            self.rows[bf][3] = self.here()
            self.body(node.else_body)
            self.rows[jmp][1] = self.here()
        elif isinstance(node, While):
            slot = self.new_slot()
            top = self.here()
            code, neg = self.cond(node.cond)
            bf = self.emit(OP_BF, code, neg)
            self.emit(OP_SNAP, slot)
            self.body(node.body)
            self.emit(OP_CHECKJMP, slot, top)
            self.rows[bf][3] = self.here()
        elif isinstance(node, Repeat):
            slot = self.new_slot()
            self.emit(OP_SETC, slot, node.times)
            top = self.here()
            bz = self.emit(OP_BZ, slot)
            self.body(node.body)
            self.emit(OP_DEC, slot)
            self.emit(OP_JMP, top)
            self.rows[bz][2] = self.here()
        else:  # pragma: no cover
            raise TypeError(f"not a statement: {node!r}")

    def body(self, stmts) -> None:
        for s in stmts:
            self.stmt(s)


def compile_prog(prog: Prog) -> Compiled:
    """Compile a span-annotated program (see syntax.annotate)."""
    if prog.span is None:
        raise ValueError("program must be span-annotated before compiling")
    em = _Emitter()
    em.body(prog.body)
    em.emit(OP_HALT)
    flat = array("i")
    for row in em.rows:
        flat.extend(row)
    return Compiled(flat, em.n_slots, len(flatten(prog)))
