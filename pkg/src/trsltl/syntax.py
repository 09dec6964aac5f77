"""Tokenizer and term reader shared by the problem-file and formula parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .terms import App, Signature, State, Term, Var

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_'.]*)
  | (?P<num>\d+)
  | (?P<punct>[(),{}\[\]@*!&|:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), line, pos + 1))
        pos = m.end()
    return out


class TokenStream:
    def __init__(self, tokens: list[Token], line: int = 1):
        self.tokens = tokens
        self.i = 0
        self.line = line

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.line)
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.text == text:
            self.i += 1
            return True
        return False

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)


def read_term(
    ts: TokenStream,
    sig: Signature,
    variables: frozenset[str] = frozenset(),
    states: frozenset[str] = frozenset(),
) -> Term:
    tok = ts.next()
    if tok.kind != "ident":
        raise ParseError(f"expected a term, found {tok.text!r}", tok.line, tok.col)
    name = tok.text
    args: list[Term] = []
    if ts.accept("("):
        if not ts.accept(")"):
            while True:
                args.append(read_term(ts, sig, variables, states))
                if ts.accept(")"):
                    break
                ts.expect(",")
    if name in sig:
        if sig.arity(name) != len(args):
            raise ParseError(
                f"arity mismatch for {name}: expected {sig.arity(name)}, got {len(args)}",
                tok.line,
                tok.col,
            )
        return App(name, tuple(args))
    if args:
        raise ParseError(f"undeclared symbol {name!r}", tok.line, tok.col)
    if name in variables:
        return Var(name)
    if name in states:
        return State(name)
    raise ParseError(f"undeclared symbol {name!r}", tok.line, tok.col)


def parse_term(
    text: str,
    sig: Signature,
    variables=frozenset(),
    states=frozenset(),
    line: int = 1,
) -> Term:
    ts = TokenStream(tokenize(text, line), line)
    t = read_term(ts, sig, frozenset(variables), frozenset(states))
    if not ts.at_end():
        tok = ts.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return t
