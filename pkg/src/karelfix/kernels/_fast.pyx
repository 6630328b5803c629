# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled execution kernel; contract identical to karelfix.kernels.pure."""

from cpython cimport array
import array

COMPILED = True

cdef int[4] _DR = [-1, 0, 1, 0]
cdef int[4] _DC = [0, 1, 0, -1]


def run(const int[::1] code, int h, int w, int r, int c, int d,
        const unsigned char[::1] obstacles, unsigned char[::1] markers,
        int step_limit, int[::1] counters, int[::1] snaps):
    cdef int actions = 0
    cdef int pc = 0
    cdef int base, op, a, b, td, nr, nc, i
    cdef bint val
    while True:
        base = pc * 4
        op = code[base]
        a = code[base + 1]
        b = code[base + 2]
        pc += 1
        if op == 0:  # ACT
            if actions >= step_limit:
                return (4, 0, r, c, d, actions)
            if a == 0:
                nr = r + _DR[d]
                nc = c + _DC[d]
                if nr < 0 or nr >= h or nc < 0 or nc >= w or obstacles[nr * w + nc]:
                    return (1, actions + 1, r, c, d, actions)
                r = nr
                c = nc
            elif a == 1:
                d = (d + 3) & 3
            elif a == 2:
                d = (d + 1) & 3
            elif a == 3:
                i = r * w + c
                if markers[i] == 0:
                    return (2, actions + 1, r, c, d, actions)
                markers[i] -= 1
            else:
                i = r * w + c
                if markers[i] == 10:
                    return (3, actions + 1, r, c, d, actions)
                markers[i] += 1
            actions += 1
        elif op == 1:  # BF
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
        elif op == 2:  # JMP
            pc = a
        elif op == 3:  # SETC
            counters[a] = b
        elif op == 4:  # BZ
            if counters[a] == 0:
                pc = b
        elif op == 5:  # DEC
            counters[a] -= 1
        elif op == 6:  # SNAP
            snaps[a] = actions
        elif op == 7:  # CHECKJMP
            if actions == snaps[a]:
                return (4, 0, r, c, d, actions)
            pc = b
        else:  # HALT
            return (0, 0, r, c, d, actions)


def levenshtein(const int[::1] a, const int[::1] b):
    cdef Py_ssize_t la = a.shape[0]
    cdef Py_ssize_t lb = b.shape[0]
    if la < lb:
        return levenshtein(b, a)
    if lb == 0:
        return la
    cdef array.array prev_arr = array.array('i', range(lb + 1))
    cdef array.array cur_arr = array.array('i', bytes(4 * (lb + 1)))
    cdef int[::1] prev = prev_arr
    cdef int[::1] cur = cur_arr
    cdef int[::1] tmp
    cdef Py_ssize_t i, j
    cdef int best, sub
    for i in range(1, la + 1):
        cur[0] = <int> i
        for j in range(1, lb + 1):
            best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            sub = prev[j - 1] + (a[i - 1] != b[j - 1])
            if sub < best:
                best = sub
            cur[j] = best
        tmp = prev
        prev = cur
        cur = tmp
    return prev[lb]
