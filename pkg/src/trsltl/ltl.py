"""Linear temporal formulas whose atoms are regular tree languages.

Atoms are finite term sets ``{t1, t2}``, references ``@name`` to named
automata, or ``*`` (every term). Concrete syntax, loosest binding last:

    unary  ! X F G
    &
    |
    ->          (right associative)
    U R         (right associative)

``true`` and ``false`` are accepted as constants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .errors import ParseError
from .syntax import TokenStream, read_term, tokenize
from .terms import App, Signature

# -- atoms ------------------------------------------------------------------


@dataclass(frozen=True)
class TermSet:
    terms: frozenset

    def __str__(self) -> str:
        return "{" + ", ".join(sorted(str(t) for t in self.terms)) + "}"


@dataclass(frozen=True)
class AutomatonRef:
    name: str

    def __str__(self) -> str:
        return "@" + self.name


@dataclass(frozen=True)
class Universal:
    def __str__(self) -> str:
        return "*"


Atom = Union[TermSet, AutomatonRef, Universal]


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Prop:
    atom: Atom

    def __str__(self):
        return str(self.atom)


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE, FALSE = Const(True), Const(False)


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self):
        return f"!{_wrap(self.arg)}"


@dataclass(frozen=True)
class Next:
    arg: "Formula"

    def __str__(self):
        return f"X {_wrap(self.arg)}"


@dataclass(frozen=True)
class Finally:
    arg: "Formula"

    def __str__(self):
        return f"F {_wrap(self.arg)}"


@dataclass(frozen=True)
class Globally:
    arg: "Formula"

    def __str__(self):
        return f"G {_wrap(self.arg)}"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} -> {self.right})"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} U {self.right})"


@dataclass(frozen=True)
class Release:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} R {self.right})"


Formula = Union[Prop, Const, Not, Next, Finally, Globally, And, Or, Implies, Until, Release]
_UNARY = (Not, Next, Finally, Globally)
_BINARY = (And, Or, Implies, Until, Release)


def _wrap(f: Formula) -> str:
    return str(f) if isinstance(f, (Prop, Const, *_UNARY, *_BINARY)) else f"({f})"


def atoms(f: Formula) -> set[Atom]:
    if isinstance(f, Prop):
        return {f.atom}
    if isinstance(f, _UNARY):
        return atoms(f.arg)
    if isinstance(f, _BINARY):
        return atoms(f.left) | atoms(f.right)
    return set()


def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form: ``Not`` only directly above ``Prop``; ``Implies`` removed."""
    if isinstance(f, Prop):
        return Not(f) if negate else f
    if isinstance(f, Const):
        return Const(f.value != negate)
    if isinstance(f, Not):
        return nnf(f.arg, not negate)
    if isinstance(f, Next):
        return Next(nnf(f.arg, negate))
    if isinstance(f, Finally):
        return Globally(nnf(f.arg, True)) if negate else Finally(nnf(f.arg))
    if isinstance(f, Globally):
        return Finally(nnf(f.arg, True)) if negate else Globally(nnf(f.arg))
    if isinstance(f, Implies):
        return nnf(Or(Not(f.left), f.right), negate)
    if isinstance(f, And):
        l, r = nnf(f.left, negate), nnf(f.right, negate)
        return Or(l, r) if negate else And(l, r)
    if isinstance(f, Or):
        l, r = nnf(f.left, negate), nnf(f.right, negate)
        return And(l, r) if negate else Or(l, r)
    if isinstance(f, Until):
        l, r = nnf(f.left, negate), nnf(f.right, negate)
        return Release(l, r) if negate else Until(l, r)
    if isinstance(f, Release):
        l, r = nnf(f.left, negate), nnf(f.right, negate)
        return Until(l, r) if negate else Release(l, r)
    raise TypeError(f"not a formula: {f!r}")


def temporal_depth(f: Formula) -> int:
    if isinstance(f, (Prop, Const)):
        return 0
    if isinstance(f, Not):
        return temporal_depth(f.arg)
    if isinstance(f, _UNARY):
        return 1 + temporal_depth(f.arg)
    inner = max(temporal_depth(f.left), temporal_depth(f.right))
    return inner + (1 if isinstance(f, (Until, Release)) else 0)


# -- parser -----------------------------------------------------------------


class _FormulaParser:
    def __init__(self, text: str, sig: Signature):
        self.ts = TokenStream(tokenize(text))
        self.sig = sig

    def parse(self) -> Formula:
        f = self.temporal()
        if not self.ts.at_end():
            tok = self.ts.peek()
            raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)
        return f

    def temporal(self) -> Formula:
        left = self.implication()
        tok = self.ts.peek()
        if tok is not None and tok.text in ("U", "R"):
            self.ts.next()
            right = self.temporal()
            return Until(left, right) if tok.text == "U" else Release(left, right)
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.ts.accept("->"):
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.ts.accept("|"):
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.ts.accept("&"):
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.ts.peek()
        if tok is None:
            raise ParseError("unexpected end of formula")
        ops = {"!": Not, "X": Next, "F": Finally, "G": Globally}
        if tok.text in ops:
            self.ts.next()
            return ops[tok.text](self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.ts.next()
        if tok.text == "(":
            f = self.temporal()
            self.ts.expect(")")
            return f
        if tok.text == "*":
            return Prop(Universal())
        if tok.text == "@":
            name = self.ts.next()
            if name.kind != "ident":
                raise ParseError("expected automaton name after '@'", name.line, name.col)
            return Prop(AutomatonRef(name.text))
        if tok.text == "{":
            terms = []
            if not self.ts.accept("}"):
                while True:
                    t = read_term(self.ts, self.sig)
                    terms.append(t)
                    if self.ts.accept("}"):
                        break
                    self.ts.expect(",")
            return Prop(TermSet(frozenset(terms)))
        if tok.text in ("true", "false"):
            return Const(tok.text == "true")
        raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)


def parse_formula(text: str, sig: Signature) -> Formula:
    return _FormulaParser(text, sig).parse()


# -- direct evaluation on ultimately periodic words -------------------------


def holds_on_lasso(
    f: Formula,
    prefix: Sequence,
    cycle: Sequence,
    holds: Callable[[Atom, object], bool],
) -> bool:
    """Evaluate ``f`` at position 0 of the word ``prefix cycle cycle ...``.

    ``holds(atom, letter)`` decides atoms. Until and release are computed as
    least and greatest fixpoints over the finitely many lasso positions.
    """
    if not cycle:
        raise ValueError("cycle must be non-empty")
    word = list(prefix) + list(cycle)
    n = len(word)
    loop = len(prefix)
    succ = [i + 1 if i + 1 < n else loop for i in range(n)]

    def fix(step, init: bool) -> list[bool]:
        cur = [init] * n
        while True:
            new = [step(i, cur) for i in range(n)]
            if new == cur:
                return cur
            cur = new

    def sat(g: Formula) -> list[bool]:
        if isinstance(g, Prop):
            return [holds(g.atom, w) for w in word]
        if isinstance(g, Const):
            return [g.value] * n
        if isinstance(g, Not):
            return [not x for x in sat(g.arg)]
        if isinstance(g, Next):
            s = sat(g.arg)
            return [s[succ[i]] for i in range(n)]
        if isinstance(g, (And, Or, Implies)):
            a, b = sat(g.left), sat(g.right)
            if isinstance(g, And):
                return [x and y for x, y in zip(a, b)]
            if isinstance(g, Or):
                return [x or y for x, y in zip(a, b)]
            return [(not x) or y for x, y in zip(a, b)]
        if isinstance(g, Finally):
            s = sat(g.arg)
            return fix(lambda i, cur: s[i] or cur[succ[i]], False)
        if isinstance(g, Globally):
            s = sat(g.arg)
            return fix(lambda i, cur: s[i] and cur[succ[i]], True)
        if isinstance(g, Until):
            a, b = sat(g.left), sat(g.right)
            return fix(lambda i, cur: b[i] or (a[i] and cur[succ[i]]), False)
        if isinstance(g, Release):
            a, b = sat(g.left), sat(g.right)
            return fix(lambda i, cur: b[i] and (a[i] or cur[succ[i]]), True)
        raise TypeError(f"not a formula: {g!r}")

    return sat(f)[0]
