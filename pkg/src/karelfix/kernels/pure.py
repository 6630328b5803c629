"""Pure-Python execution kernel; reference for the compiled one.

Both kernels implement exactly the same contract so the selector in
``karelfix.kernels`` can swap them freely. Grids are flat row-major byte
buffers indexed ``r * w + c``.
"""

from __future__ import annotations

COMPILED = False

_OP_ACT, _OP_BF, _OP_JMP, _OP_SETC, _OP_BZ, _OP_DEC, _OP_SNAP, _OP_CHECKJMP, _OP_HALT = range(9)

_DR = (-1, 0, 1, 0)
_DC = (0, 1, 0, -1)


def run(code, h, w, r, c, d, obstacles, markers, step_limit, counters, snaps):
    """Run compiled bytecode on one grid.

    `markers`, `counters` and `snaps` are mutated in place. Returns
    ``(status, at_step, r, c, d, actions)`` with status codes from
    karelfix.bytecode (0 ok, 1..3 crash kinds, 4 timeout).
    """
    actions = 0
    pc = 0
    while True:
        base = pc * 4
        op = code[base]
        a = code[base + 1]
        b = code[base + 2]
        pc += 1
        if op == _OP_ACT:
            if actions >= step_limit:
                return (4, 0, r, c, d, actions)
            if a == 0:  # move
                nr = r + _DR[d]
                nc = c + _DC[d]
                if nr < 0 or nr >= h or nc < 0 or nc >= w or obstacles[nr * w + nc]:
                    return (1, actions + 1, r, c, d, actions)
                r, c = nr, nc
            elif a == 1:  # turnLeft
                d = (d + 3) & 3
            elif a == 2:  # turnRight
                d = (d + 1) & 3
            elif a == 3:  # pickMarker
                i = r * w + c
                if markers[i] == 0:
                    return (2, actions + 1, r, c, d, actions)
                markers[i] -= 1
            else:  # putMarker
                i = r * w + c
                if markers[i] == 10:
                    return (3, actions + 1, r, c, d, actions)
                markers[i] += 1
            actions += 1
        elif op == _OP_BF:
            if a == 0:
                td = d
            elif a == 1:
                td = (d + 3) & 3
            elif a == 2:
                td = (d + 1) & 3
            else:
                td = -1
            if td >= 0:
                nr = r + _DR[td]
                nc = c + _DC[td]
                val = 0 <= nr < h and 0 <= nc < w and not obstacles[nr * w + nc]
            elif a == 3:
                val = markers[r * w + c] > 0
            else:
                val = markers[r * w + c] == 0
            if b:
                val = not val
            if not val:
                pc = code[base + 3]
        elif op == _OP_JMP:
            pc = a
        elif op == _OP_SETC:
            counters[a] = b
        elif op == _OP_BZ:
            if counters[a] == 0:
                pc = b
        elif op == _OP_DEC:
            counters[a] -= 1
        elif op == _OP_SNAP:
            snaps[a] = actions
        elif op == _OP_CHECKJMP:
            if actions == snaps[a]:
                return (4, 0, r, c, d, actions)
            pc = b
        else:  # HALT
            return (0, 0, r, c, d, actions)


def levenshtein(a, b) -> int:
    """Token-level edit distance over integer id sequences."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    cur = [0] * (len(b) + 1)
    for i, x in enumerate(a, 1):
        cur[0] = i
        for j, y in enumerate(b, 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y))
        prev, cur = cur, prev
    return prev[len(b)]
