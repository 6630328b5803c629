/**
 * NDJSON request handling. One JSON object in, one out, in order:
 *
 *   {"op":"synthesize","beam":B,"spec":[...]}          -> {"candidates":[...]}
 *   {"op":"debug","beam":B,"spec":[...],
 *    "program":"<tokens>","alignment":{...}}           -> {"candidates":[...]}
 *   anything else                                      -> {"error":"..."}
 *
 * The alignment field is accepted and ignored. Error strings are fixed
 * literals so transcripts stay byte-stable across runtimes.
 */

import { mutateOnce, synthesize } from "./debugger";
import { Rng } from "./rng";

export interface Handler {
  handleLine(line: string): string;
}

export function makeHandler(seed: number): Handler {
  const rng = new Rng(seed);
  return {
    handleLine(line: string): string {
      let request: unknown;
      try {
        request = JSON.parse(line);
      } catch {
        return JSON.stringify({ error: "malformed request" });
      }
      if (typeof request !== "object" || request === null) {
        return JSON.stringify({ error: "malformed request" });
      }
      const req = request as { op?: unknown; beam?: unknown; program?: unknown };
      const beam = typeof req.beam === "number" && req.beam >= 1 ? Math.floor(req.beam) : 1;

      if (req.op === "synthesize") {
        return JSON.stringify({ candidates: synthesize(rng, beam) });
      }
      if (req.op === "debug") {
        if (typeof req.program !== "string") {
          return JSON.stringify({ error: "debug needs a program" });
        }
        try {
          return JSON.stringify({ candidates: [mutateOnce(rng, req.program)] });
        } catch {
          return JSON.stringify({ error: "program does not parse" });
        }
      }
      return JSON.stringify({ error: "unsupported op" });
    },
  };
}
