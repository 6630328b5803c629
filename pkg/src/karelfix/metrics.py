"""Evaluation drivers and reports.

``eval_synthesis`` runs the configured search per task and scores two
error rates: generalization (the returned program passes the spec plus
the held-out pair) and exact match (token equality with the ground
truth). ``eval_repair`` seeds the search with the broken program and
additionally buckets results by mutation count.

Searches only ever see the task's K-pair spec; a guard at the boundary
raises if a held-out pair object would leak in. Reports are JSON lines
(stable key order, exact fractions as strings) plus a human-readable
summary table; with fixed seeds and deterministic sources the bytes are
reproducible run to run.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .dataset import Task
from .interp import Spec
from .mutations import RepairTask
from .plugin import PluginCrash
from .search import (
    CandidateSource,
    ConstantSynthesizer,
    SearchConfig,
    program_rate,
    run_search,
)
from .syntax import flatten

logger = logging.getLogger(__name__)


class HeldOutLeak(AssertionError):
    pass


def guard_search_spec(search_spec: Spec, task_spec: Spec, held_out: Spec) -> Spec:
    """The spec handed to a search must be the task spec and nothing more."""
    if search_spec is not task_spec:
        raise HeldOutLeak("search spec is not the task's spec object")
    if len(search_spec.pairs) != len(task_spec.pairs):
        raise HeldOutLeak("search spec pair count changed")
    for pair in held_out.pairs:
        if any(pair is p for p in search_spec.pairs):
            raise HeldOutLeak("held-out pair object present in search spec")
    return search_spec


@dataclass
class TaskRecord:
    task_id: str
    success: bool
    generalization: bool
    exact_match: bool
    expansions_used: int
    programs_expanded: int
    final_rate: Fraction
    trajectory_rates: list[Fraction]
    n_mutations: Optional[int] = None
    flagged_equivalent: bool = False
    plugin_crashes: int = 0

    def to_obj(self) -> dict:
        obj = {
            "task_id": self.task_id,
            "success": self.success,
            "generalization": self.generalization,
            "exact_match": self.exact_match,
            "expansions_used": self.expansions_used,
            "programs_expanded": self.programs_expanded,
            "final_rate": str(self.final_rate),
            "trajectory_rates": [str(r) for r in self.trajectory_rates],
        }
        if self.n_mutations is not None:
            obj["n_mutations"] = self.n_mutations
            obj["flagged_equivalent"] = self.flagged_equivalent
        if self.plugin_crashes:
            obj["plugin_crashes"] = self.plugin_crashes
        return obj


@dataclass
class MetricsReport:
    config: dict
    records: list[TaskRecord]
    generalization_error: Fraction
    exact_match_error: Fraction
    buckets: dict[int, dict] = field(default_factory=dict)

    def to_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in sorted(self.records, key=lambda r: r.task_id):
                fh.write(json.dumps(rec.to_obj(), sort_keys=True, separators=(",", ":")) + "\n")
            fh.write(
                json.dumps(
                    {"summary": self.summary_obj()}, sort_keys=True, separators=(",", ":")
                )
                + "\n"
            )

    def summary_obj(self) -> dict:
        expanded = [r.programs_expanded for r in self.records]
        obj = {
            "config": self.config,
            "n_tasks": len(self.records),
            "generalization_error": str(self.generalization_error),
            "exact_match_error": str(self.exact_match_error),
            "expanded_programs_total": sum(expanded),
            "expanded_programs_mean": str(
                Fraction(sum(expanded), len(expanded)) if expanded else Fraction(0)
            ),
        }
        if self.buckets:
            obj["buckets"] = {str(n): b for n, b in sorted(self.buckets.items())}
        return obj

    def summary_table(self) -> str:
        mean = self.summary_obj()["expanded_programs_mean"]
        lines = [
            "beam size | edit steps | # of expanded programs (mean) | gen. error | exact match error",
            f"{self.config.get('beam', '-'):>9} | {self.config.get('k', '-'):>10} | "
            f"{mean:>29} | {float(self.generalization_error):>9.2%} | "
            f"{float(self.exact_match_error):>17.2%}",
        ]
        if self.buckets:
            lines.append("")
            lines.append("mutations | tasks | flagged | repair rate (non-flagged) | gen. error")
            for n, b in sorted(self.buckets.items()):
                lines.append(
                    f"{n:>9} | {b['count']:>5} | {b['flagged']:>7} | "
                    f"{b['repair_rate_nonflagged']:>25} | {b['generalization_error']:>10}"
                )
        return "\n".join(lines)


def _generalizes(tokens, task_spec: Spec, held_out: Spec, step_limit: int) -> bool:
    all_pairs = Spec(task_spec.pairs + held_out.pairs)
    return program_rate(tokens, all_pairs, step_limit) == 1


def _config_echo(cfg: SearchConfig, extra: dict) -> dict:
    return {
        "k": cfg.k,
        "beam": cfg.beam,
        "mode": cfg.mode,
        "step_limit": cfg.step_limit,
        **extra,
    }


def _search_with_retry(synthesizer, debugger, spec, cfg):
    """Run one search; restart a crashed plugin once, then give up."""
    crashes = 0
    for attempt in (0, 1):
        try:
            return run_search(synthesizer, debugger, spec, cfg), crashes
        except PluginCrash as e:
            crashes += 1
            logger.warning("plugin crashed (%s); %s", e, "retrying" if attempt == 0 else "giving up")
            for source in (synthesizer, debugger):
                if hasattr(source, "close"):
                    source.close()
    return None, crashes


def eval_synthesis(
    tasks: Sequence[Task],
    synthesizer: CandidateSource,
    debugger: CandidateSource,
    cfg: SearchConfig,
    config_extra: Optional[dict] = None,
) -> MetricsReport:
    records = []
    for task in tasks:
        spec = guard_search_spec(task.spec, task.spec, task.held_out)
        outcome, crashes = _search_with_retry(synthesizer, debugger, spec, cfg)
        gold_tokens = flatten(task.gold)
        if outcome is None:
            records.append(
                TaskRecord(task.id, False, False, False, 0, 0, Fraction(0), [], plugin_crashes=crashes)
            )
            continue
        records.append(
            TaskRecord(
                task_id=task.id,
                success=outcome.success,
                generalization=_generalizes(outcome.result, task.spec, task.held_out, cfg.step_limit),
                exact_match=outcome.result == gold_tokens,
                expansions_used=outcome.expansions_used,
                programs_expanded=outcome.programs_expanded,
                final_rate=program_rate(outcome.result, task.spec, cfg.step_limit),
                trajectory_rates=[r for _, r in outcome.trajectory],
                plugin_crashes=crashes,
            )
        )
    n = len(records)
    gen_err = Fraction(sum(1 for r in records if not r.generalization), n) if n else Fraction(0)
    em_err = Fraction(sum(1 for r in records if not r.exact_match), n) if n else Fraction(0)
    return MetricsReport(
        config=_config_echo(cfg, config_extra or {}),
        records=records,
        generalization_error=gen_err,
        exact_match_error=em_err,
    )


def eval_repair(
    repair_tasks: Sequence[RepairTask],
    debugger: CandidateSource,
    cfg: SearchConfig,
    config_extra: Optional[dict] = None,
) -> MetricsReport:
    records = []
    for task in repair_tasks:
        spec = guard_search_spec(task.spec, task.spec, task.held_out)
        synthesizer = ConstantSynthesizer([flatten(task.broken)])
        outcome, crashes = _search_with_retry(synthesizer, debugger, spec, cfg)
        gold_tokens = flatten(task.gold)
        if outcome is None:
            records.append(
                TaskRecord(
                    task.id, False, False, False, 0, 0, Fraction(0), [],
                    n_mutations=task.n_mutations,
                    flagged_equivalent=task.flagged_equivalent,
                    plugin_crashes=crashes,
                )
            )
            continue
        records.append(
            TaskRecord(
                task_id=task.id,
                success=outcome.success,
                generalization=_generalizes(outcome.result, task.spec, task.held_out, cfg.step_limit),
                exact_match=outcome.result == gold_tokens,
                expansions_used=outcome.expansions_used,
                programs_expanded=outcome.programs_expanded,
                final_rate=program_rate(outcome.result, task.spec, cfg.step_limit),
                trajectory_rates=[r for _, r in outcome.trajectory],
                n_mutations=task.n_mutations,
                flagged_equivalent=task.flagged_equivalent,
                plugin_crashes=crashes,
            )
        )
    n = len(records)
    gen_err = Fraction(sum(1 for r in records if not r.generalization), n) if n else Fraction(0)
    em_err = Fraction(sum(1 for r in records if not r.exact_match), n) if n else Fraction(0)

    buckets: dict[int, dict] = {}
    for bucket in sorted({r.n_mutations for r in records}):
        rows = [r for r in records if r.n_mutations == bucket]
        nonflagged = [r for r in rows if not r.flagged_equivalent]
        repaired_nonflagged = sum(1 for r in nonflagged if r.success)
        buckets[bucket] = {
            "count": len(rows),
            "flagged": len(rows) - len(nonflagged),
            "repaired": sum(1 for r in rows if r.success),
            "repair_rate_nonflagged": (
                str(Fraction(repaired_nonflagged, len(nonflagged))) if nonflagged else "n/a"
            ),
            "generalization_error": str(
                Fraction(sum(1 for r in rows if not r.generalization), len(rows))
            ),
        }
    return MetricsReport(
        config=_config_echo(cfg, config_extra or {}),
        records=records,
        generalization_error=gen_err,
        exact_match_error=em_err,
        buckets=buckets,
    )
