#!/usr/bin/env python3
"""Record the golden conformance transcript for the reference plugin.

Builds 100 deterministic requests (synthesize and debug calls with real
specs and alignment graphs, plus a few malformed lines), runs the built
plugin once, and freezes both sides:

    python scripts/make_golden.py   # from frontend/, after `npm run build`

The conformance checker and the engine's acceptance suite replay these
files byte-for-byte.
"""

import json
import random
import subprocess
import sys
from pathlib import Path

from karelfix.alignment import build_alignment
from karelfix.dataset import gen_dataset
from karelfix.interp import execute, spec_to_obj
from karelfix.mutations import mutate_n
from karelfix.sampler import SampleLimits
from karelfix.syntax import to_text

HERE = Path(__file__).resolve().parent.parent
N_REQUESTS = 100
PLUGIN_SEED = 7


def build_requests() -> list[str]:
    tasks = gen_dataset(12, SampleLimits(max_total_tokens=22), rng_seed=424)
    rng = random.Random(99)
    lines = []
    for i in range(N_REQUESTS):
        if i % 29 == 7:
            lines.append("this line is not json")
            continue
        task = tasks[i % len(tasks)]
        spec = spec_to_obj(task.spec)
        if i % 2 == 0:
            lines.append(
                json.dumps(
                    {"op": "synthesize", "beam": rng.randint(1, 6), "spec": spec},
                    separators=(",", ":"),
                )
            )
        else:
            program = mutate_n(task.gold, 1 + i % 3, rng_seed=rng.getrandbits(32))
            traces = [execute(program, inp)[1] for inp, _ in task.spec.pairs]
            graph = build_alignment(program, traces)
            lines.append(
                json.dumps(
                    {
                        "op": "debug",
                        "beam": rng.randint(1, 6),
                        "spec": spec,
                        "program": to_text(program),
                        "alignment": graph.to_json_obj(),
                    },
                    separators=(",", ":"),
                )
            )
    return lines


def main() -> None:
    plugin = HERE / "dist" / "main.js"
    if not plugin.exists():
        sys.exit("build the plugin first: npm run build")
    requests = build_requests()
    payload = "\n".join(requests) + "\n"
    proc = subprocess.run(
        ["node", str(plugin), "--seed", str(PLUGIN_SEED)],
        input=payload,
        capture_output=True,
        text=True,
        check=True,
    )
    responses = proc.stdout
    assert len(responses.splitlines()) == N_REQUESTS, "response count mismatch"
    golden = HERE / "golden"
    golden.mkdir(exist_ok=True)
    (golden / "requests.ndjson").write_text(payload)
    (golden / "responses.ndjson").write_text(responses)
    print(f"wrote {N_REQUESTS} request/response pairs to {golden}")


if __name__ == "__main__":
    main()
