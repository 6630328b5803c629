"""Karel surface syntax: tokenizer, recursive-descent parser, flattener.

The grammar uses explicit block braces and condition parentheses so that
syntactic validity is locally checkable on a flat token stream::

    Prog   := def run { Stmt* }
    Stmt   := while ( Cond ) { Stmt* }
            | repeat ( Numeral ) { Stmt* }
            | if ( Cond ) { Stmt* }
            | ifelse ( Cond ) { Stmt* } else { Stmt* }
            | Action
    Cond   := frontIsClear | leftIsClear | rightIsClear
            | markersPresent | noMarkersPresent | not Cond
    Action := move | turnLeft | turnRight | pickMarker | putMarker

Empty statement bodies are valid. Every AST node carries the half-open
index range (``span``) of its tokens in the flattened sequence, so
``flatten(parse(t)) == t`` and ``parse(flatten(a)) == a`` hold exactly,
spans included.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence, Union

from .vocab import (
    ACTION_SET,
    ATOMIC_CONDITION_SET,
    MAX_REPEAT,
    NOT,
    NUMERAL_SET,
    VOCABULARY,
)

TokenSeq = tuple[str, ...]

Span = tuple[int, int]


class UnknownTokenError(ValueError):
    """A word outside the vocabulary was seen at `position` (word index)."""

    def __init__(self, word: str, position: int):
        super().__init__(f"unknown token {word!r} at position {position}")
        self.word = word
        self.position = position


class ParseError(ValueError):
    """First grammar violation, with the token index and the expected set."""

    def __init__(self, position: int, expected: Iterable[str], found: Optional[str] = None):
        self.position = position
        self.expected = frozenset(expected)
        self.found = found
        what = found if found is not None else "end of input"
        super().__init__(
            f"at token {position}: found {what!r}, expected one of "
            f"{{{', '.join(sorted(self.expected))}}}"
        )


class UnbalancedDelimiterError(ParseError):
    """A required closing delimiter is missing or mismatched."""


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class CondAtom:
    name: str
    span: Optional[Span] = None


@dataclass(frozen=True)
class Not:
    inner: "Cond"
    span: Optional[Span] = None


Cond = Union[CondAtom, Not]


@dataclass(frozen=True)
class Action:
    name: str
    span: Optional[Span] = None


@dataclass(frozen=True)
class While:
    cond: Cond
    body: tuple["Stmt", ...]
    span: Optional[Span] = None


@dataclass(frozen=True)
class Repeat:
    times: int
    body: tuple["Stmt", ...]
    span: Optional[Span] = None


@dataclass(frozen=True)
class If:
    cond: Cond
    body: tuple["Stmt", ...]
    span: Optional[Span] = None


@dataclass(frozen=True)
class IfElse:
    cond: Cond
    then_body: tuple["Stmt", ...]
    else_body: tuple["Stmt", ...]
    span: Optional[Span] = None


Stmt = Union[Action, While, Repeat, If, IfElse]


@dataclass(frozen=True)
class Prog:
    body: tuple[Stmt, ...]
    span: Optional[Span] = None


Node = Union[Prog, Stmt, Cond]


# --- tokenizer -------------------------------------------------------------


def tokenize(text: str) -> TokenSeq:
    """Split whitespace-separated token names, rejecting words outside V."""
    words = text.split()
    for i, w in enumerate(words):
        if w not in _VOCAB_SET:
            raise UnknownTokenError(w, i)
    return tuple(words)


def detokenize(tokens: Sequence[str]) -> str:
    return " ".join(tokens)


_VOCAB_SET = frozenset(VOCABULARY)


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: Sequence[str]):
        self.toks = tuple(tokens)
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, expected: str, unbalanced: bool = False) -> int:
        tok = self.peek()
        if tok != expected:
            cls = UnbalancedDelimiterError if unbalanced else ParseError
            raise cls(self.pos, {expected}, tok)
        self.pos += 1
        return self.pos - 1

    def parse_prog(self) -> Prog:
        start = self.take("def")
        self.take("run")
        self.take("{")
        body = self.parse_body()
        self.take("}", unbalanced=True)
        if self.peek() is not None:
            raise ParseError(self.pos, {"end of program"}, self.peek())
        return Prog(body, span=(start, self.pos))

    def parse_body(self) -> tuple[Stmt, ...]:
        stmts: list[Stmt] = []
        while True:
            tok = self.peek()
            if tok == "}" or tok is None:
                # missing "}" is reported by the caller's take()
                return tuple(stmts)
            stmts.append(self.parse_stmt())

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        start = self.pos
        if tok in ACTION_SET:
            self.pos += 1
            return Action(tok, span=(start, self.pos))
        if tok == "while":
            self.pos += 1
            self.take("(")
            cond = self.parse_cond()
            self.take(")", unbalanced=True)
            body = self.parse_block()
            return While(cond, body, span=(start, self.pos))
        if tok == "repeat":
            self.pos += 1
            self.take("(")
            times = self.parse_numeral()
            self.take(")", unbalanced=True)
            body = self.parse_block()
            return Repeat(times, body, span=(start, self.pos))
        if tok == "if":
            self.pos += 1
            self.take("(")
            cond = self.parse_cond()
            self.take(")", unbalanced=True)
            body = self.parse_block()
            return If(cond, body, span=(start, self.pos))
        if tok == "ifelse":
            self.pos += 1
            self.take("(")
            cond = self.parse_cond()
            self.take(")", unbalanced=True)
            then_body = self.parse_block()
            self.take("else")
            else_body = self.parse_block()
            return IfElse(cond, then_body, else_body, span=(start, self.pos))
        raise ParseError(self.pos, ACTION_SET | {"while", "repeat", "if", "ifelse", "}"}, tok)

    def parse_block(self) -> tuple[Stmt, ...]:
        self.take("{")
        body = self.parse_body()
        self.take("}", unbalanced=True)
        return body

    def parse_cond(self) -> Cond:
        tok = self.peek()
        start = self.pos
        if tok == NOT:
            self.pos += 1
            inner = self.parse_cond()
            return Not(inner, span=(start, self.pos))
        if tok in ATOMIC_CONDITION_SET:
            self.pos += 1
            return CondAtom(tok, span=(start, self.pos))
        raise ParseError(self.pos, ATOMIC_CONDITION_SET | {NOT}, tok)

    def parse_numeral(self) -> int:
        tok = self.peek()
        if tok not in NUMERAL_SET:
            raise ParseError(self.pos, {"numeral"}, tok)
        self.pos += 1
        return int(tok)


def parse(tokens: Sequence[str]) -> Prog:
    """Parse a token sequence into a span-annotated AST."""
    return _Parser(tokens).parse_prog()


def parse_text(text: str) -> Prog:
    return parse(tokenize(text))


# --- flattener -------------------------------------------------------------


def _emit(node: Node, out: list[str]) -> None:
    if isinstance(node, Prog):
        out += ("def", "run", "{")
        for s in node.body:
            _emit(s, out)
        out.append("}")
    elif isinstance(node, Action):
        out.append(node.name)
    elif isinstance(node, While):
        out += ("while", "(")
        _emit(node.cond, out)
        out += (")", "{")
        for s in node.body:
            _emit(s, out)
        out.append("}")
    elif isinstance(node, Repeat):
        out += ("repeat", "(", str(node.times), ")", "{")
        for s in node.body:
            _emit(s, out)
        out.append("}")
    elif isinstance(node, If):
        out += ("if", "(")
        _emit(node.cond, out)
        out += (")", "{")
        for s in node.body:
            _emit(s, out)
        out.append("}")
    elif isinstance(node, IfElse):
        out += ("ifelse", "(")
        _emit(node.cond, out)
        out += (")", "{")
        for s in node.then_body:
            _emit(s, out)
        out += ("}", "else", "{")
        for s in node.else_body:
            _emit(s, out)
        out.append("}")
    elif isinstance(node, Not):
        out.append(NOT)
        _emit(node.inner, out)
    elif isinstance(node, CondAtom):
        out.append(node.name)
    else:  # pragma: no cover
        raise TypeError(f"not an AST node: {node!r}")


def flatten(node: Node) -> TokenSeq:
    """Emit the surface tokens of a (sub)tree, deterministically."""
    out: list[str] = []
    _emit(node, out)
    return tuple(out)


def to_text(node: Node) -> str:
    return detokenize(flatten(node))


# --- span annotation -------------------------------------------------------


def _annotate(node, at: int):
    """Return (node-with-spans, token_count) for the subtree at offset `at`."""
    if isinstance(node, Prog):
        n = 3
        body = []
        for s in node.body:
            s2, used = _annotate(s, at + n)
            body.append(s2)
            n += used
        n += 1
        return Prog(tuple(body), span=(at, at + n)), n
    if isinstance(node, Action):
        return replace(node, span=(at, at + 1)), 1
    if isinstance(node, (While, If)):
        cond, cn = _annotate(node.cond, at + 2)
        n = 2 + cn + 2
        body = []
        for s in node.body:
            s2, used = _annotate(s, at + n)
            body.append(s2)
            n += used
        n += 1
        return replace(node, cond=cond, body=tuple(body), span=(at, at + n)), n
    if isinstance(node, Repeat):
        if not 0 <= node.times <= MAX_REPEAT:
            raise ValueError(f"repeat count {node.times} out of range")
        n = 5
        body = []
        for s in node.body:
            s2, used = _annotate(s, at + n)
            body.append(s2)
            n += used
        n += 1
        return replace(node, body=tuple(body), span=(at, at + n)), n
    if isinstance(node, IfElse):
        cond, cn = _annotate(node.cond, at + 2)
        n = 2 + cn + 2
        then_body = []
        for s in node.then_body:
            s2, used = _annotate(s, at + n)
            then_body.append(s2)
            n += used
        n += 3  # "} else {"
        else_body = []
        for s in node.else_body:
            s2, used = _annotate(s, at + n)
            else_body.append(s2)
            n += used
        n += 1
        return (
            replace(node, cond=cond, then_body=tuple(then_body), else_body=tuple(else_body), span=(at, at + n)),
            n,
        )
    if isinstance(node, Not):
        inner, m = _annotate(node.inner, at + 1)
        return Not(inner, span=(at, at + 1 + m)), 1 + m
    if isinstance(node, CondAtom):
        return replace(node, span=(at, at + 1)), 1
    raise TypeError(f"not an AST node: {node!r}")


def annotate(prog: Prog) -> Prog:
    """Recompute token spans for a programmatically built tree."""
    out, _ = _annotate(prog, 0)
    return out


def iter_nodes(node: Node):
    """Yield every node of the tree in pre-order (conditions included)."""
    yield node
    if isinstance(node, Prog):
        for s in node.body:
            yield from iter_nodes(s)
    elif isinstance(node, (While, If)):
        yield from iter_nodes(node.cond)
        for s in node.body:
            yield from iter_nodes(s)
    elif isinstance(node, Repeat):
        for s in node.body:
            yield from iter_nodes(s)
    elif isinstance(node, IfElse):
        yield from iter_nodes(node.cond)
        for s in node.then_body:
            yield from iter_nodes(s)
        for s in node.else_body:
            yield from iter_nodes(s)
    elif isinstance(node, Not):
        yield from iter_nodes(node.inner)
