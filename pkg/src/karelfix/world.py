"""Karel grid worlds: robot pose, obstacles, markers.

Coordinate convention (fixed, tests depend on it): row 0 is the top row,
N decreases the row, E increases the column. Grids are h x w with
2 <= h, w <= 18; marker counts are 1..10 and obstacle cells never carry
markers.

The JSON form is canonical: fixed key order, obstacle and marker arrays
sorted lexicographically. Two equal worlds serialize to identical bytes,
so the text is usable for hashing and golden files.
"""

from __future__ import annotations

import json
import random
from typing import Iterable, Mapping, Optional

MIN_DIM, MAX_DIM = 2, 18
MAX_MARKERS = 10

DIRECTIONS = ("N", "E", "S", "W")
DIR_TO_INT = {d: i for i, d in enumerate(DIRECTIONS)}
# row/col deltas indexed by DIR_TO_INT
DIR_DELTAS = ((-1, 0), (0, 1), (1, 0), (0, -1))


class World:
    """One immutable grid state. Mutating helpers return new instances."""

    __slots__ = ("h", "w", "robot_r", "robot_c", "robot_dir", "obstacles", "markers", "_canon")

    def __init__(
        self,
        h: int,
        w: int,
        robot_r: int,
        robot_c: int,
        robot_dir: str,
        obstacles: Iterable[tuple[int, int]] = (),
        markers: Optional[Mapping[tuple[int, int], int]] = None,
    ):
        obstacles = frozenset((int(r), int(c)) for r, c in obstacles)
        markers = {(int(r), int(c)): int(n) for (r, c), n in (markers or {}).items()}

        if not (MIN_DIM <= h <= MAX_DIM and MIN_DIM <= w <= MAX_DIM):
            raise ValueError(f"grid dims {h}x{w} outside [{MIN_DIM},{MAX_DIM}]")
        if robot_dir not in DIR_TO_INT:
            raise ValueError(f"bad direction {robot_dir!r}")
        if not (0 <= robot_r < h and 0 <= robot_c < w):
            raise ValueError(f"robot ({robot_r},{robot_c}) out of bounds")
        if (robot_r, robot_c) in obstacles:
            raise ValueError("robot on an obstacle")
        for (r, c) in obstacles:
            if not (0 <= r < h and 0 <= c < w):
                raise ValueError(f"obstacle ({r},{c}) out of bounds")
        for (r, c), n in markers.items():
            if not (0 <= r < h and 0 <= c < w):
                raise ValueError(f"marker cell ({r},{c}) out of bounds")
            if not 1 <= n <= MAX_MARKERS:
                raise ValueError(f"marker count {n} outside [1,{MAX_MARKERS}]")
            if (r, c) in obstacles:
                raise ValueError(f"markers on obstacle cell ({r},{c})")

        object.__setattr__(self, "h", int(h))
        object.__setattr__(self, "w", int(w))
        object.__setattr__(self, "robot_r", int(robot_r))
        object.__setattr__(self, "robot_c", int(robot_c))
        object.__setattr__(self, "robot_dir", robot_dir)
        object.__setattr__(self, "obstacles", obstacles)
        object.__setattr__(self, "markers", markers)
        object.__setattr__(self, "_canon", None)

    def __setattr__(self, name, value):
        raise AttributeError("World is immutable")

    def _canonical(self):
        canon = object.__getattribute__(self, "_canon")
        if canon is None:
            canon = (
                self.h,
                self.w,
                self.robot_r,
                self.robot_c,
                self.robot_dir,
                tuple(sorted(self.obstacles)),
                tuple(sorted((r, c, n) for (r, c), n in self.markers.items())),
            )
            object.__setattr__(self, "_canon", canon)
        return canon

    def __eq__(self, other):
        if not isinstance(other, World):
            return NotImplemented
        return self._canonical() == other._canonical()

    def __hash__(self):
        return hash(self._canonical())

    def __repr__(self):
        return f"World.from_json({self.to_json()!r})"

    def marker_count(self, r: int, c: int) -> int:
        return self.markers.get((r, c), 0)

    # --- canonical JSON ---

    def to_json_obj(self) -> dict:
        return {
            "h": self.h,
            "w": self.w,
            "robot": {"r": self.robot_r, "c": self.robot_c, "dir": self.robot_dir},
            "obstacles": [[r, c] for r, c in sorted(self.obstacles)],
            "markers": [[r, c, n] for r, c, n in sorted((r, c, n) for (r, c), n in self.markers.items())],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: dict) -> "World":
        robot = obj["robot"]
        return cls(
            obj["h"],
            obj["w"],
            robot["r"],
            robot["c"],
            robot["dir"],
            obstacles=[(r, c) for r, c in obj.get("obstacles", [])],
            markers={(r, c): n for r, c, n in obj.get("markers", [])},
        )

    @classmethod
    def from_json(cls, text: str) -> "World":
        return cls.from_json_obj(json.loads(text))

    def render(self) -> str:
        """ASCII debug dump: robot arrow, # obstacles, digits for markers."""
        arrows = {"N": "^", "E": ">", "S": "v", "W": "<"}
        rows = []
        for r in range(self.h):
            row = []
            for c in range(self.w):
                if (r, c) == (self.robot_r, self.robot_c):
                    row.append(arrows[self.robot_dir])
                elif (r, c) in self.obstacles:
                    row.append("#")
                else:
                    n = self.marker_count(r, c)
                    row.append("." if n == 0 else ("*" if n == 10 else str(n)))
            rows.append("".join(row))
        return "\n".join(rows)


OBSTACLE_PROB = 0.1


def sample_world(rng_seed: int, dims: Optional[tuple[int, int]] = None) -> World:
    """Draw a random valid world: dims uniform in [2,18] unless given,
    each non-robot cell an obstacle with probability 0.1, and up to 10
    marker-bearing cells with counts uniform in [1,10]."""
    rng = random.Random(rng_seed)
    if dims is None:
        h, w = rng.randint(MIN_DIM, MAX_DIM), rng.randint(MIN_DIM, MAX_DIM)
    else:
        h, w = dims
        if not (MIN_DIM <= h <= MAX_DIM and MIN_DIM <= w <= MAX_DIM):
            raise ValueError(f"dims {dims} outside [{MIN_DIM},{MAX_DIM}]")
    robot_r, robot_c = rng.randrange(h), rng.randrange(w)
    robot_dir = rng.choice(DIRECTIONS)
    obstacles = {
        (r, c)
        for r in range(h)
        for c in range(w)
        if (r, c) != (robot_r, robot_c) and rng.random() < OBSTACLE_PROB
    }
    open_cells = sorted({(r, c) for r in range(h) for c in range(w)} - obstacles)
    n_marked = min(rng.randint(0, MAX_MARKERS), len(open_cells))
    markers = {cell: rng.randint(1, MAX_MARKERS) for cell in rng.sample(open_cells, n_marked)}
    return World(h, w, robot_r, robot_c, robot_dir, obstacles, markers)
