/** Entry point: `node dist/main.js --seed N` serves the stdio protocol. */

import * as readline from "node:readline";

import { makeHandler } from "./protocol";

function parseSeed(argv: string[]): number {
  const at = argv.indexOf("--seed");
  if (at >= 0 && at + 1 < argv.length) {
    const seed = Number(argv[at + 1]);
    if (Number.isFinite(seed)) return seed;
  }
  return 0;
}

function main(): void {
  const handler = makeHandler(parseSeed(process.argv.slice(2)));
  const rl = readline.createInterface({ input: process.stdin, crlfDelay: Infinity });
  rl.on("line", (line: string) => {
    if (line.trim().length === 0) return;
    process.stdout.write(handler.handleLine(line) + "\n");
  });
}

main();
