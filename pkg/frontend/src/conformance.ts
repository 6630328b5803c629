/**
 * Protocol conformance checker: replays a recorded request transcript
 * against a plugin command and byte-compares the responses.
 *
 *   node dist/conformance.js <requests.ndjson> <responses.ndjson> "<command>"
 *
 * Exits 0 on a byte-exact match, 1 otherwise.
 */

import { spawn } from "node:child_process";
import * as fs from "node:fs";

function run(requestsPath: string, expectedPath: string, command: string): Promise<number> {
  const requests = fs.readFileSync(requestsPath, "utf-8");
  const expected = fs.readFileSync(expectedPath, "utf-8");
  const [cmd, ...args] = command.split(/\s+/);

  return new Promise((resolve) => {
    const child = spawn(cmd, args, { stdio: ["pipe", "pipe", "inherit"] });
    const chunks: Buffer[] = [];
    child.stdout.on("data", (chunk: Buffer) => chunks.push(chunk));
    child.on("close", (code: number | null) => {
      if (code !== 0) {
        console.error(`plugin exited with ${code}`);
        resolve(1);
        return;
      }
      const got = Buffer.concat(chunks).toString("utf-8");
      if (got === expected) {
        const n = requests.split("\n").filter((l) => l.trim().length > 0).length;
        console.log(`conformance ok: ${n} requests, byte-exact transcript`);
        resolve(0);
        return;
      }
      const gotLines = got.split("\n");
      const wantLines = expected.split("\n");
      for (let i = 0; i < Math.max(gotLines.length, wantLines.length); i++) {
        if (gotLines[i] !== wantLines[i]) {
          console.error(`first mismatch at response ${i + 1}:`);
          console.error(`  want: ${wantLines[i]}`);
          console.error(`  got:  ${gotLines[i]}`);
          break;
        }
      }
      resolve(1);
    });
    child.stdin.write(requests);
    child.stdin.end();
  });
}

const [requestsPath, expectedPath, command] = process.argv.slice(2);
if (!requestsPath || !expectedPath || !command) {
  console.error('usage: conformance <requests.ndjson> <responses.ndjson> "<command>"');
  process.exit(2);
}
run(requestsPath, expectedPath, command).then((code) => process.exit(code));
