"""Trace-to-token alignment and per-token feature aggregation.

``build_alignment`` relates each non-initial trace event to the action
token that produced it and to every enclosing loop/conditional keyword
token, as a bipartite edge set between state ids ``(u, t)`` (example
``u`` is 1-based, trace position ``t`` 0-based) and token indices.

``aggregate`` averages arbitrary per-state vectors over those edges,
giving each token the mean of the states it produced or controls; the
arithmetic is plain Python, so Fraction-valued vectors stay exact.
Tokens with no incident states get the zero vector.

``featurize_state`` builds the fixed-shape tensor an external embedding
model consumes: 16 feature channels per grid (4 facing, obstacle,
boundary, marker counts 1..10) for the trace state, the input, and the
output, stacked to 48 channels over an 18x18 extent. Cells outside the
actual grid are marked with the boundary feature.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .interp import Trace
from .syntax import Prog, flatten
from .world import MAX_DIM, World

N_CELL_FEATURES = 16
N_CHANNELS = 3 * N_CELL_FEATURES
_CH_OBSTACLE = 4
_CH_BOUNDARY = 5
_CH_MARKER_BASE = 6  # channel 6+k-1 set for a cell holding k markers


class TokenRangeMismatch(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class AlignmentGraph:
    """Edges ((u, t), token_index), stored as sorted (u, t, i) triples."""

    edges: tuple[tuple[int, int, int], ...]
    n_tokens: int

    def incident_states(self) -> dict[int, list[tuple[int, int]]]:
        by_token: dict[int, list[tuple[int, int]]] = {}
        for u, t, i in self.edges:
            by_token.setdefault(i, []).append((u, t))
        return by_token

    def to_json_obj(self) -> dict:
        return {"edges": [[u, t, i] for u, t, i in self.edges]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))


def build_alignment(program: Prog, traces: Sequence[Trace]) -> AlignmentGraph:
    """Relate every non-initial event of each trace to its tokens."""
    n_tokens = len(flatten(program))
    edges: set[tuple[int, int, int]] = set()
    for u, trace in enumerate(traces, start=1):
        for t, event in enumerate(trace.events):
            if event.producing_token is None:
                continue
            for i in (event.producing_token, *event.active_control_tokens):
                if not 0 <= i < n_tokens:
                    raise TokenRangeMismatch(
                        f"trace {u} references token {i}, program has {n_tokens}"
                    )
                edges.add((u, t, i))
    return AlignmentGraph(tuple(sorted(edges)), n_tokens)


def aggregate(
    graph: AlignmentGraph, state_vectors: Mapping[tuple[int, int], Sequence]
) -> dict[int, tuple]:
    """Per-token mean of incident state vectors; zero vector if none."""
    if state_vectors:
        dim = len(next(iter(state_vectors.values())))
        for v in state_vectors.values():
            if len(v) != dim:
                raise DimensionMismatch("state vectors differ in dimension")
    elif graph.edges:
        raise DimensionMismatch("graph has edges but no state vectors given")
    else:
        dim = 0
    by_token = graph.incident_states()
    out: dict[int, tuple] = {}
    for i in range(graph.n_tokens):
        states = by_token.get(i)
        if not states:
            out[i] = (0,) * dim
            continue
        missing = [s for s in states if s not in state_vectors]
        if missing:
            raise DimensionMismatch(f"no vector for state ids {missing}")
        acc = [0] * dim
        for s in states:
            vec = state_vectors[s]
            for j in range(dim):
                acc[j] += vec[j]
        deg = len(states)
        out[i] = tuple(x / deg for x in acc)
    return out


def featurize_cell(world: World, r: int, c: int) -> np.ndarray:
    vec = np.zeros(N_CELL_FEATURES, dtype=np.float32)
    if not (0 <= r < world.h and 0 <= c < world.w):
        vec[_CH_BOUNDARY] = 1.0
        return vec
    if (r, c) == (world.robot_r, world.robot_c):
        vec["NESW".index(world.robot_dir)] = 1.0
    if (r, c) in world.obstacles:
        vec[_CH_OBSTACLE] = 1.0
    n = world.marker_count(r, c)
    if n:
        vec[_CH_MARKER_BASE + n - 1] = 1.0
    return vec


def _grid_features(world: World) -> np.ndarray:
    out = np.zeros((N_CELL_FEATURES, MAX_DIM, MAX_DIM), dtype=np.float32)
    out[_CH_BOUNDARY, world.h :, :] = 1.0
    out[_CH_BOUNDARY, :, world.w :] = 1.0
    out["NESW".index(world.robot_dir), world.robot_r, world.robot_c] = 1.0
    for (r, c) in world.obstacles:
        out[_CH_OBSTACLE, r, c] = 1.0
    for (r, c), n in world.markers.items():
        out[_CH_MARKER_BASE + n - 1, r, c] = 1.0
    return out


def featurize_state(state: World, inp: World, out: World) -> np.ndarray:
    """Stack the 16-feature encodings of [state; input; output], 48x18x18."""
    dims = {(w.h, w.w) for w in (state, inp, out)}
    if len(dims) != 1:
        raise DimensionMismatch(f"grids differ in dims: {sorted(dims)}")
    return np.concatenate([_grid_features(w) for w in (state, inp, out)], axis=0)


def feature_to_bytes(tensor: np.ndarray) -> bytes:
    """Row-major float32 payload with an 8-byte little-endian dims header
    (four uint16: channels, height, width, reserved zero)."""
    c, h, w = tensor.shape
    return struct.pack("<HHHH", c, h, w, 0) + np.ascontiguousarray(
        tensor, dtype="<f4"
    ).tobytes()


def feature_from_bytes(payload: bytes) -> np.ndarray:
    c, h, w, _ = struct.unpack("<HHHH", payload[:8])
    return np.frombuffer(payload[8:], dtype="<f4").reshape(c, h, w).copy()
