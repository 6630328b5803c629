"""Client for external candidate sources speaking NDJSON over stdio.

One JSON object per line, one response per request, order-preserving::

    request  {"op":"synthesize"|"debug", "beam":B,
              "spec":[{"input":W,"output":W},...],
              "program":"<token text>",            # debug only
              "alignment":{"edges":[[u,t,i],...]}} # debug only
    response {"candidates":["<token text>",...]}   # or {"error":"..."}

``W`` is the canonical world JSON object. Debug requests carry the
alignment graph of the program executed on the spec inputs so that
trace-aware models can use it; plugins may ignore it. Unparseable
candidates are dropped with a counter rather than failing the search.
"""

from __future__ import annotations

import json
import logging
import select
import shlex
import subprocess
from typing import Optional

from .alignment import build_alignment
from .interp import Spec, execute, spec_to_obj
from .syntax import (
    ParseError,
    TokenSeq,
    UnknownTokenError,
    detokenize,
    parse,
    tokenize,
)

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 30.0


class PluginCrash(RuntimeError):
    pass


class ExternalCandidateSource:
    """Spawns the plugin command and forwards synthesize/debug calls."""

    def __init__(
        self,
        command: str,
        beam: int = 32,
        step_limit: int = 1000,
        timeout_s: float = DEFAULT_TIMEOUT_S,
    ):
        self.command = command
        self.beam = beam
        self.step_limit = step_limit
        self.timeout_s = timeout_s
        self.dropped_candidates = 0
        self._proc: Optional[subprocess.Popen] = None

    # --- process management ---

    def start(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            return
        logger.info("starting plugin: %s", self.command)
        self._proc = subprocess.Popen(
            shlex.split(self.command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )

    def close(self) -> None:
        if self._proc is None:
            return
        try:
            self._proc.stdin.close()
            self._proc.wait(timeout=5)
        except Exception:
            self._proc.kill()
        self._proc = None

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.close()

    def _read_line(self) -> str:
        proc = self._proc
        ready, _, _ = select.select([proc.stdout], [], [], self.timeout_s)
        if not ready:
            raise PluginCrash(f"plugin did not respond within {self.timeout_s}s")
        line = proc.stdout.readline()
        if not line:
            raise PluginCrash("plugin closed its stdout")
        return line

    def _roundtrip(self, request: dict) -> dict:
        self.start()
        proc = self._proc
        try:
            proc.stdin.write(json.dumps(request, separators=(",", ":")) + "\n")
            proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise PluginCrash(f"plugin pipe failed: {e}") from e
        line = self._read_line()
        try:
            return json.loads(line)
        except json.JSONDecodeError as e:
            raise PluginCrash(f"plugin sent invalid JSON: {line!r}") from e

    # --- candidate source protocol ---

    def _decode_candidates(self, response: dict) -> list[TokenSeq]:
        if "error" in response:
            logger.warning("plugin error response: %s", response["error"])
            return []
        out: list[TokenSeq] = []
        for text in response.get("candidates", []):
            try:
                tokens = tokenize(text)
                parse(tokens)
            except (ParseError, UnknownTokenError):
                self.dropped_candidates += 1
                continue
            out.append(tokens)
        return out[: self.beam]

    def synthesize(self, spec: Spec) -> list[TokenSeq]:
        response = self._roundtrip(
            {"op": "synthesize", "beam": self.beam, "spec": spec_to_obj(spec)}
        )
        return self._decode_candidates(response)

    def debug(self, program: TokenSeq, spec: Spec) -> list[TokenSeq]:
        ast = parse(program)
        traces = [execute(ast, inp, self.step_limit)[1] for inp, _ in spec.pairs]
        graph = build_alignment(ast, traces)
        response = self._roundtrip(
            {
                "op": "debug",
                "beam": self.beam,
                "spec": spec_to_obj(spec),
                "program": detokenize(program),
                "alignment": graph.to_json_obj(),
            }
        )
        return self._decode_candidates(response)
