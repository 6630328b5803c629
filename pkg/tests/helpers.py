"""Shared test helpers: small worlds and random generators."""

from __future__ import annotations

import random

from karelfix.sampler import SampleLimits, sample_program
from karelfix.syntax import flatten
from karelfix.vocab import VOCABULARY
from karelfix.world import World


def empty_world(h=3, w=3, r=1, c=1, d="E", obstacles=(), markers=None):
    return World(h, w, r, c, d, obstacles, markers or {})


def corridor(r=0, c=0, d="E", h=2, w=4):
    """Empty h x w grid with the robot somewhere on the top row."""
    return World(h, w, r, c, d)


def random_tokens(rng: random.Random, max_len=10) -> tuple[str, ...]:
    """Arbitrary vocabulary tokens (not necessarily a valid program)."""
    return tuple(rng.choice(VOCABULARY) for _ in range(rng.randint(0, max_len)))


def random_program_tokens(seed: int, **kw) -> tuple[str, ...]:
    limits = SampleLimits(rng_seed=seed, **kw)
    return flatten(sample_program(limits))
