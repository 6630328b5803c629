"""Task generation and JSON-lines persistence.

A task is a ground-truth program with 5 specification pairs plus one
held-out pair. Generation draws a random program and 6 random input
worlds, executes, and accepts only if all 6 runs finish cleanly and at
least one output differs from its input (so behaviorally empty programs
are never emitted). Everything is deterministic per seed; a fixed seed
reproduces the output file byte for byte.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .interp import Ok, Spec, execute_fast, spec_from_obj, spec_to_obj
from .sampler import SampleLimits, sample_program
from .syntax import Prog, parse_text, to_text
from .world import sample_world

logger = logging.getLogger(__name__)

SPEC_PAIRS = 5
HELD_OUT_PAIRS = 1
MAX_DRAWS_PER_TASK = 500


class GenerationExhausted(RuntimeError):
    def __init__(self, task_index: int, attempts: int):
        super().__init__(f"no acceptable draw for task {task_index} in {attempts} attempts")
        self.task_index = task_index
        self.attempts = attempts


@dataclass(frozen=True)
class Task:
    id: str
    gold: Prog
    spec: Spec
    held_out: Spec


def _draw_task(rng: random.Random, limits: SampleLimits, step_limit: int):
    program = sample_program(
        SampleLimits(
            limits.max_depth,
            limits.max_body_len,
            limits.max_total_tokens,
            rng_seed=rng.getrandbits(63),
        )
    )
    pairs = []
    changed = False
    for _ in range(SPEC_PAIRS + HELD_OUT_PAIRS):
        inp = sample_world(rng.getrandbits(63))
        final, status, _ = execute_fast(program, inp, step_limit)
        if not isinstance(status, Ok):
            return None
        pairs.append((inp, final))
        changed = changed or final != inp
    if not changed:
        return None
    return program, pairs


def gen_dataset(
    n_tasks: int,
    limits: SampleLimits = SampleLimits(),
    rng_seed: int = 0,
    step_limit: int = 1000,
) -> list[Task]:
    """Generate tasks; draws that cannot be satisfied are skipped with a log."""
    if n_tasks < 1:
        raise ValueError("n_tasks must be >= 1")
    rng = random.Random(rng_seed)
    tasks: list[Task] = []
    for index in range(n_tasks):
        drawn = None
        for _ in range(MAX_DRAWS_PER_TASK):
            drawn = _draw_task(rng, limits, step_limit)
            if drawn is not None:
                break
        if drawn is None:
            logger.warning(
                "skipping task %d: %s", index, GenerationExhausted(index, MAX_DRAWS_PER_TASK)
            )
            continue
        program, pairs = drawn
        tasks.append(
            Task(
                id=f"t{index:05d}",
                gold=program,
                spec=Spec(tuple(pairs[:SPEC_PAIRS])),
                held_out=Spec(tuple(pairs[SPEC_PAIRS:])),
            )
        )
    return tasks


# --- JSON lines --------------------------------------------------------------


def task_to_obj(task: Task) -> dict:
    return {
        "id": task.id,
        "gold": to_text(task.gold),
        "spec": spec_to_obj(task.spec),
        "held_out": spec_to_obj(task.held_out),
    }


def task_from_obj(obj: dict) -> Task:
    return Task(
        id=obj["id"],
        gold=parse_text(obj["gold"]),
        spec=spec_from_obj(obj["spec"]),
        held_out=spec_from_obj(obj["held_out"]),
    )


def save_jsonl(records: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")


def load_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def save_tasks(tasks: Iterable[Task], path: str | Path) -> None:
    save_jsonl((task_to_obj(t) for t in tasks), path)


def load_tasks(path: str | Path) -> list[Task]:
    return [task_from_obj(obj) for obj in load_jsonl(path)]
