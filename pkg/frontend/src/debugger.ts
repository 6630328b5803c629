/**
 * The candidate logic behind the reference plugin. Deliberately weak: it
 * exists to prove the wire protocol, not to win benchmarks. Synthesis
 * draws small random programs; debugging applies one random, validity
 * preserving action-level mutation (insert, delete, or replace).
 */

import { ACTIONS, ATOMS, Prog, Stmt, blocks, emit, parse } from "./lang";
import { Rng } from "./rng";

export function randomProgram(rng: Rng): string {
  const prog: Prog = { body: [] };
  const topLen = rng.int(4);
  for (let i = 0; i < topLen; i++) {
    prog.body.push(randomStmt(rng, 2));
  }
  return emit(prog);
}

function randomStmt(rng: Rng, depth: number): Stmt {
  const roll = rng.next();
  if (depth === 0 || roll < 0.6) {
    return { kind: "action", name: rng.pick(ACTIONS) };
  }
  const body: Stmt[] = [];
  const len = rng.int(3);
  for (let i = 0; i < len; i++) {
    body.push(randomStmt(rng, depth - 1));
  }
  if (roll < 0.7) {
    return { kind: "repeat", times: String(rng.int(20)), body };
  }
  const cond = rng.next() < 0.25 ? ["not", rng.pick(ATOMS)] : [rng.pick(ATOMS)];
  if (roll < 0.8) {
    return { kind: "while", cond, body };
  }
  if (roll < 0.9) {
    return { kind: "if", cond, body };
  }
  return { kind: "ifelse", cond, body, elseBody: [] };
}

export function synthesize(rng: Rng, beam: number): string[] {
  const out: string[] = [];
  for (let i = 0; i < beam; i++) {
    out.push(randomProgram(rng));
  }
  return out;
}

/** One random single mutation of the program; parse errors propagate. */
export function mutateOnce(rng: Rng, programText: string): string {
  const prog = parse(programText);
  const allBlocks = blocks(prog);
  const actionSites: Array<{ block: Stmt[]; index: number }> = [];
  for (const block of allBlocks) {
    block.forEach((stmt, index) => {
      if (stmt.kind === "action") actionSites.push({ block, index });
    });
  }

  const kinds: string[] = ["insert"];
  if (actionSites.length > 0) kinds.push("delete", "replace");
  const kind = rng.pick(kinds);

  if (kind === "insert") {
    const block = rng.pick(allBlocks);
    const gap = rng.int(block.length + 1);
    block.splice(gap, 0, { kind: "action", name: rng.pick(ACTIONS) });
  } else if (kind === "delete") {
    const site = rng.pick(actionSites);
    site.block.splice(site.index, 1);
  } else {
    const site = rng.pick(actionSites);
    const current = (site.block[site.index] as { name: string }).name;
    const others = ACTIONS.filter((a) => a !== current);
    site.block[site.index] = { kind: "action", name: rng.pick(others) };
  }
  return emit(prog);
}
