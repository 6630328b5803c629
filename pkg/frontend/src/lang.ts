/**
 * Minimal Karel token handling: just enough tokenizer/parser/printer to
 * emit valid candidates and mutate programs. The engine's own toolchain
 * is the source of truth; every candidate this module produces must parse
 * under the engine's `fmt` command.
 */

export const ACTIONS = ["move", "turnLeft", "turnRight", "pickMarker", "putMarker"] as const;
export const ATOMS = [
  "frontIsClear",
  "leftIsClear",
  "rightIsClear",
  "markersPresent",
  "noMarkersPresent",
] as const;

const KEYWORDS = ["def", "run", "if", "ifelse", "else", "while", "repeat", "not"];
const NUMERALS = Array.from({ length: 20 }, (_, i) => String(i));
const DELIMS = ["(", ")", "{", "}"];

const VOCAB = new Set<string>([...ACTIONS, ...ATOMS, ...KEYWORDS, ...NUMERALS, ...DELIMS]);

export type ActionName = (typeof ACTIONS)[number];

export type Stmt =
  | { kind: "action"; name: ActionName }
  | { kind: "while" | "if"; cond: string[]; body: Stmt[] }
  | { kind: "repeat"; times: string; body: Stmt[] }
  | { kind: "ifelse"; cond: string[]; body: Stmt[]; elseBody: Stmt[] };

export interface Prog {
  body: Stmt[];
}

export function tokenize(text: string): string[] {
  const words = text.split(/\s+/).filter((w) => w.length > 0);
  for (const w of words) {
    if (!VOCAB.has(w)) throw new Error(`unknown token ${w}`);
  }
  return words;
}

class Parser {
  private pos = 0;

  constructor(private toks: string[]) {}

  private peek(): string | undefined {
    return this.toks[this.pos];
  }

  private take(expected: string): void {
    const tok = this.toks[this.pos];
    if (tok !== expected) throw new Error(`at ${this.pos}: expected ${expected}, got ${tok}`);
    this.pos += 1;
  }

  parseProg(): Prog {
    this.take("def");
    this.take("run");
    this.take("{");
    const body = this.parseBody();
    this.take("}");
    if (this.pos !== this.toks.length) throw new Error(`trailing tokens at ${this.pos}`);
    return { body };
  }

  private parseBody(): Stmt[] {
    const out: Stmt[] = [];
    while (this.peek() !== undefined && this.peek() !== "}") {
      out.push(this.parseStmt());
    }
    return out;
  }

  private parseStmt(): Stmt {
    const tok = this.peek();
    if (tok !== undefined && (ACTIONS as readonly string[]).includes(tok)) {
      this.pos += 1;
      return { kind: "action", name: tok as ActionName };
    }
    if (tok === "while" || tok === "if") {
      this.pos += 1;
      this.take("(");
      const cond = this.parseCond();
      this.take(")");
      return { kind: tok, cond, body: this.parseBlock() };
    }
    if (tok === "repeat") {
      this.pos += 1;
      this.take("(");
      const times = this.peek();
      if (times === undefined || !NUMERALS.includes(times)) {
        throw new Error(`at ${this.pos}: expected numeral`);
      }
      this.pos += 1;
      this.take(")");
      return { kind: "repeat", times, body: this.parseBlock() };
    }
    if (tok === "ifelse") {
      this.pos += 1;
      this.take("(");
      const cond = this.parseCond();
      this.take(")");
      const body = this.parseBlock();
      this.take("else");
      return { kind: "ifelse", cond, body, elseBody: this.parseBlock() };
    }
    throw new Error(`at ${this.pos}: expected statement, got ${tok}`);
  }

  private parseBlock(): Stmt[] {
    this.take("{");
    const body = this.parseBody();
    this.take("}");
    return body;
  }

  private parseCond(): string[] {
    const out: string[] = [];
    while (this.peek() === "not") {
      out.push("not");
      this.pos += 1;
    }
    const atom = this.peek();
    if (atom === undefined || !(ATOMS as readonly string[]).includes(atom)) {
      throw new Error(`at ${this.pos}: expected condition, got ${atom}`);
    }
    out.push(atom);
    this.pos += 1;
    return out;
  }
}

export function parse(text: string): Prog {
  return new Parser(tokenize(text)).parseProg();
}

export function emit(prog: Prog): string {
  const out: string[] = ["def", "run", "{"];
  const walk = (stmts: Stmt[]): void => {
    for (const s of stmts) {
      if (s.kind === "action") {
        out.push(s.name);
      } else if (s.kind === "repeat") {
        out.push("repeat", "(", s.times, ")", "{");
        walk(s.body);
        out.push("}");
      } else if (s.kind === "ifelse") {
        out.push("ifelse", "(", ...s.cond, ")", "{");
        walk(s.body);
        out.push("}", "else", "{");
        walk(s.elseBody);
        out.push("}");
      } else {
        out.push(s.kind, "(", ...s.cond, ")", "{");
        walk(s.body);
        out.push("}");
      }
    }
  };
  walk(prog.body);
  out.push("}");
  return out.join(" ");
}

/** Every statement block in the tree, root body included. */
export function blocks(prog: Prog): Stmt[][] {
  const out: Stmt[][] = [prog.body];
  const walk = (stmts: Stmt[]): void => {
    for (const s of stmts) {
      if (s.kind === "action") continue;
      out.push(s.body);
      walk(s.body);
      if (s.kind === "ifelse") {
        out.push(s.elseBody);
        walk(s.elseBody);
      }
    }
  };
  walk(prog.body);
  return out;
}
