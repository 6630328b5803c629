"""Command-line interface.

Programs are space-separated token text, one per line, in every file and
stream this tool reads or writes. See the README for the file formats.
"""

from __future__ import annotations

import logging
import sys

import click

from . import edits
from .alignment import build_alignment
from .dataset import gen_dataset, load_tasks, save_jsonl, save_tasks
from .interp import Crash, Ok, Timeout, execute
from .mutations import (
    build_repair_benchmark,
    repair_task_from_obj,
    repair_task_to_obj,
)
from .dataset import load_jsonl
from .sampler import SampleLimits
from .search import (
    BEST_FIRST,
    GREEDY,
    ConstantSynthesizer,
    EnumerativeDebugger,
    NullDebugger,
    RandomEditDebugger,
    RandomProgramSynthesizer,
    SearchConfig,
)
from .metrics import eval_repair, eval_synthesis
from .plugin import ExternalCandidateSource
from .syntax import ParseError, UnknownTokenError, parse_text, to_text, tokenize
from .world import World


@click.group()
@click.option("--verbose", is_flag=True, help="log at INFO level")
def main(verbose: bool):
    """Karel program synthesis and repair toolkit."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


_mode_flag = click.option(
    "--mode",
    type=click.Choice(["best-first", "greedy"]),
    default="best-first",
    show_default=True,
)


def _search_config(k: int, beam: int, mode: str, step_limit: int) -> SearchConfig:
    return SearchConfig(
        k=k,
        beam=beam,
        mode=BEST_FIRST if mode == "best-first" else GREEDY,
        step_limit=step_limit,
    )


def _make_debugger(name: str, plugin: str | None, beam: int, step_limit: int, seed: int):
    if name == "none":
        return NullDebugger()
    if name == "enumerative":
        return EnumerativeDebugger(beam=beam, step_limit=step_limit)
    if name == "random":
        return RandomEditDebugger(beam=beam, seed=seed)
    if name == "plugin":
        if not plugin:
            raise click.UsageError("--debugger plugin requires --plugin <command>")
        return ExternalCandidateSource(plugin, beam=beam, step_limit=step_limit)
    raise click.UsageError(f"unknown debugger {name!r}")


@main.command("gen-dataset")
@click.option("--n-tasks", type=int, default=500, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-depth", type=int, default=3, show_default=True)
@click.option("--max-body-len", type=int, default=4, show_default=True)
@click.option("--max-tokens", type=int, default=32, show_default=True)
@click.option("--step-limit", type=int, default=1000, show_default=True)
@click.option("--out", type=click.Path(writable=True), required=True)
def gen_dataset_cmd(n_tasks, seed, max_depth, max_body_len, max_tokens, step_limit, out):
    """Generate synthesis tasks (5 spec pairs + 1 held-out pair each)."""
    limits = SampleLimits(max_depth, max_body_len, max_tokens)
    tasks = gen_dataset(n_tasks, limits, rng_seed=seed, step_limit=step_limit)
    save_tasks(tasks, out)
    click.echo(f"wrote {len(tasks)} tasks to {out}")


@main.command("mutate-benchmark")
@click.option("--tasks", "tasks_path", type=click.Path(exists=True), required=True)
@click.option("--n-lo", type=int, default=1, show_default=True)
@click.option("--n-hi", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--step-limit", type=int, default=1000, show_default=True)
@click.option("--out", type=click.Path(writable=True), required=True)
def mutate_benchmark_cmd(tasks_path, n_lo, n_hi, seed, step_limit, out):
    """Build a repair benchmark by mutating ground-truth programs."""
    tasks = load_tasks(tasks_path)
    repair_tasks = build_repair_benchmark(tasks, (n_lo, n_hi), rng_seed=seed, step_limit=step_limit)
    save_jsonl((repair_task_to_obj(t) for t in repair_tasks), out)
    flagged = sum(t.flagged_equivalent for t in repair_tasks)
    click.echo(
        f"wrote {len(repair_tasks)} repair tasks to {out} "
        f"({flagged} flagged semantically equivalent)"
    )


@main.command("eval-synth")
@click.option("--tasks", "tasks_path", type=click.Path(exists=True), required=True)
@click.option("--synth", type=click.Choice(["random", "empty", "plugin"]), default="random", show_default=True)
@click.option("--debugger", type=click.Choice(["none", "enumerative", "random", "plugin"]), default="enumerative", show_default=True)
@click.option("--plugin", "plugin_cmd", type=str, default=None, help="external source command line")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--k", type=int, default=100, show_default=True)
@click.option("--beam", type=int, default=32, show_default=True)
@click.option("--step-limit", type=int, default=1000, show_default=True)
@_mode_flag
@click.option("--out", type=click.Path(writable=True), default=None)
def eval_synth_cmd(tasks_path, synth, debugger, plugin_cmd, seed, k, beam, step_limit, mode, out):
    """Evaluate synthesis-from-spec over a task file."""
    tasks = load_tasks(tasks_path)
    cfg = _search_config(k, beam, mode, step_limit)
    if synth == "random":
        synthesizer = RandomProgramSynthesizer(beam=beam, seed=seed)
    elif synth == "empty":
        synthesizer = ConstantSynthesizer([tokenize("def run { }")])
    else:
        if not plugin_cmd:
            raise click.UsageError("--synth plugin requires --plugin <command>")
        synthesizer = ExternalCandidateSource(plugin_cmd, beam=beam, step_limit=step_limit)
    dbg = _make_debugger(debugger, plugin_cmd, beam, step_limit, seed + 1)
    try:
        report = eval_synthesis(
            tasks, synthesizer, dbg, cfg,
            config_extra={"synth": synth, "debugger": debugger, "seed": seed},
        )
    finally:
        for source in (synthesizer, dbg):
            if hasattr(source, "close"):
                source.close()
    if out:
        report.to_jsonl(out)
    click.echo(report.summary_table())


@main.command("eval-repair")
@click.option("--tasks", "tasks_path", type=click.Path(exists=True), required=True)
@click.option("--debugger", type=click.Choice(["none", "enumerative", "random", "plugin"]), default="enumerative", show_default=True)
@click.option("--plugin", "plugin_cmd", type=str, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--k", type=int, default=100, show_default=True)
@click.option("--beam", type=int, default=32, show_default=True)
@click.option("--step-limit", type=int, default=1000, show_default=True)
@_mode_flag
@click.option("--out", type=click.Path(writable=True), default=None)
def eval_repair_cmd(tasks_path, debugger, plugin_cmd, seed, k, beam, step_limit, mode, out):
    """Evaluate repair over a mutation-benchmark file."""
    repair_tasks = [repair_task_from_obj(obj, step_limit) for obj in load_jsonl(tasks_path)]
    cfg = _search_config(k, beam, mode, step_limit)
    dbg = _make_debugger(debugger, plugin_cmd, beam, step_limit, seed + 1)
    try:
        report = eval_repair(
            repair_tasks, dbg, cfg, config_extra={"debugger": debugger, "seed": seed}
        )
    finally:
        if hasattr(dbg, "close"):
            dbg.close()
    if out:
        report.to_jsonl(out)
    click.echo(report.summary_table())


@main.command("run")
@click.option("--program", "program_text", type=str, required=True, help="program token text")
@click.option("--world", "world_path", type=click.Path(exists=True), required=True, help="world JSON file")
@click.option("--step-limit", type=int, default=1000, show_default=True)
@click.option("--trace", "show_trace", is_flag=True, help="dump every trace event")
@click.option("--align", "show_align", is_flag=True, help="dump the alignment graph")
def run_cmd(program_text, world_path, step_limit, show_trace, show_align):
    """Execute one program on one world and report the outcome."""
    try:
        program = parse_text(program_text)
    except (ParseError, UnknownTokenError) as e:
        raise click.ClickException(f"program does not parse: {e}")
    with open(world_path, encoding="utf-8") as fh:
        world = World.from_json(fh.read())
    final, trace = execute(program, world, step_limit)

    status = trace.status
    if isinstance(status, Ok):
        click.echo("status: OK")
        click.echo(f"final: {final.to_json()}")
    elif isinstance(status, Crash):
        click.echo(f"status: Crash({status.reason}, at_step={status.at_step})")
    elif isinstance(status, Timeout):
        click.echo(f"status: Timeout(step_limit={status.step_limit})")
    click.echo(f"trace length: {len(trace.events)}")
    if show_trace:
        for t, event in enumerate(trace.events):
            controls = sorted(event.active_control_tokens)
            click.echo(
                f"event {t}: token={event.producing_token} controls={controls} "
                f"state={event.state.to_json()}"
            )
    if show_align:
        graph = build_alignment(program, [trace])
        click.echo(f"alignment: {graph.to_json()}")


@main.command("fmt")
@click.argument("program", required=False)
def fmt_cmd(program):
    """Parse and pretty-print programs (argument, or one per stdin line)."""
    lines = [program] if program is not None else [
        line for line in sys.stdin.read().splitlines() if line.strip()
    ]
    for line in lines:
        try:
            click.echo(to_text(parse_text(line)))
        except (ParseError, UnknownTokenError) as e:
            raise click.ClickException(f"{e}")


@main.command("edit-apply")
@click.option("--src", required=True, help="source program token text")
@click.option("--script", required=True, help="comma-separated edit ops")
def edit_apply_cmd(src, script):
    """Apply an edit script to a token sequence."""
    try:
        tokens = tokenize(src)
        ops = edits.script_from_text(script)
        click.echo(" ".join(edits.apply_edits(tokens, ops)))
    except (UnknownTokenError, ValueError) as e:
        raise click.ClickException(f"{e}")


@main.command("edit-diff")
@click.option("--src", required=True)
@click.option("--tgt", required=True)
def edit_diff_cmd(src, tgt):
    """Print the canonical minimal edit script from src to tgt."""
    try:
        script = edits.min_edit_script(tokenize(src), tokenize(tgt))
    except UnknownTokenError as e:
        raise click.ClickException(f"{e}")
    click.echo(edits.script_to_text(script))
    click.echo(f"distance: {sum(1 for op in script if op.kind != edits.KEEP)}", err=True)


if __name__ == "__main__":
    main()
