"""Terms over a ranked signature, substitutions, rewrite rules and rewriting.

Terms are immutable and hashable. Three node kinds exist:

* ``Var(name)`` for rule variables,
* ``State(name)`` for automaton states used as extra constants in
  configurations (kept in their own namespace so they never clash with
  signature symbols),
* ``App(head, args)`` for a function symbol applied to arguments.

Positions are tuples of 1-based child indices; ``()`` is the root.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

from .errors import BoundExceeded, InvalidPosition, UnknownSymbol

DEFAULT_BOUND = 100_000


@dataclass(frozen=True, slots=True, repr=False)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"Var({self.name})"


@dataclass(frozen=True, slots=True, repr=False)
class State:
    name: str

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"State({self.name})"


@dataclass(frozen=True, slots=True, repr=False)
class App:
    head: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.head
        return f"{self.head}({','.join(str(a) for a in self.args)})"

    __repr__ = __str__


Term = Union[Var, State, App]
Position = tuple  # tuple[int, ...], 1-based
Substitution = Mapping[str, Term]


def app(head: str, *args: Term) -> App:
    return App(head, tuple(args))


@dataclass(frozen=True, slots=True)
class Symbol:
    name: str
    arity: int


class Signature:
    """A finite ranked alphabet. At least one constant is required."""

    def __init__(self, arities: Mapping[str, int] | Iterable[Symbol]):
        if isinstance(arities, Mapping):
            table = dict(arities)
        else:
            table = {}
            for s in arities:
                if s.name in table and table[s.name] != s.arity:
                    raise ValueError(f"symbol {s.name} declared with two arities")
                table[s.name] = s.arity
        if not table:
            raise ValueError("signature must not be empty")
        if any(a < 0 for a in table.values()):
            raise ValueError("arities must be natural numbers")
        if not any(a == 0 for a in table.values()):
            raise ValueError("signature needs at least one constant")
        self._arity = table

    @property
    def symbols(self) -> frozenset[Symbol]:
        return frozenset(Symbol(n, a) for n, a in self._arity.items())

    def names(self) -> list[str]:
        return list(self._arity)

    def arity(self, name: str) -> int:
        try:
            return self._arity[name]
        except KeyError:
            raise UnknownSymbol(f"undeclared symbol {name!r}") from None

    def items(self):
        return self._arity.items()

    def __contains__(self, name: str) -> bool:
        return name in self._arity

    def __eq__(self, other) -> bool:
        return isinstance(other, Signature) and self._arity == other._arity

    def __hash__(self) -> int:
        return hash(frozenset(self._arity.items()))

    def __repr__(self) -> str:
        return "Signature(" + " ".join(f"{n}:{a}" for n, a in self._arity.items()) + ")"

    def check(self, t: Term) -> None:
        """Raise if ``t`` uses an undeclared symbol or a wrong arity."""
        if isinstance(t, App):
            if self.arity(t.head) != len(t.args):
                raise ValueError(
                    f"arity mismatch for {t.head}: expected {self.arity(t.head)}, got {len(t.args)}"
                )
            for a in t.args:
                self.check(a)

    def ground_terms(self, max_depth: int) -> list[App]:
        """All ground terms of depth at most ``max_depth`` (constants have depth 1)."""
        levels: list[App] = []
        for _ in range(max_depth):
            nxt = []
            for name, n in sorted(self._arity.items()):
                for args in itertools.product(levels, repeat=n):
                    nxt.append(App(name, tuple(args)))
            levels = nxt
        return levels


# -- structural operations ---------------------------------------------------


def positions(t: Term) -> Iterator[Position]:
    yield ()
    if isinstance(t, App):
        for i, a in enumerate(t.args, 1):
            for p in positions(a):
                yield (i,) + p


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            raise InvalidPosition(f"position {p} not in term")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Position, s: Term) -> Term:
    if not p:
        return s
    i = p[0]
    if not isinstance(t, App) or not 1 <= i <= len(t.args):
        raise InvalidPosition(f"position {p} not in term")
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], p[1:], s)
    return App(t.head, tuple(args))


def variables(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, App):
        return frozenset().union(*(variables(a) for a in t.args)) if t.args else frozenset()
    return frozenset()


def is_ground(t: Term) -> bool:
    return not variables(t)


def depth(t: Term) -> int:
    if isinstance(t, App) and t.args:
        return 1 + max(depth(a) for a in t.args)
    return 1


def substitute(t: Term, sigma: Substitution) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if isinstance(t, App) and t.args:
        return App(t.head, tuple(substitute(a, sigma) for a in t.args))
    return t


def match(pattern: Term, subject: Term, sigma: dict | None = None) -> dict | None:
    """Syntactic matching: return ``s`` with ``pattern`` under ``s`` equal to ``subject``."""
    sigma = dict(sigma) if sigma else {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
        elif isinstance(p, App):
            if not isinstance(s, App) or p.head != s.head or len(p.args) != len(s.args):
                return None
            stack.extend(zip(p.args, s.args))
        elif p != s:
            return None
    return sigma


# -- rewriting ---------------------------------------------------------------


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    index: int

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise ValueError("left-hand side of a rule must not be a variable")
        extra = variables(self.rhs) - variables(self.lhs)
        if extra:
            raise ValueError(f"rhs variables {sorted(extra)} do not occur in lhs")

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class Trs:
    signature: Signature
    rules: tuple[Rule, ...] = field(default=())

    def __post_init__(self):
        seen = set()
        for r in self.rules:
            if r.index in seen:
                raise ValueError(f"duplicate rule index {r.index}")
            seen.add(r.index)
            self.signature.check(r.lhs)
            self.signature.check(r.rhs)

    @classmethod
    def from_pairs(cls, signature: Signature, pairs: Iterable[tuple[Term, Term]]) -> "Trs":
        return cls(signature, tuple(Rule(l, r, i) for i, (l, r) in enumerate(pairs)))

    @property
    def indices(self) -> frozenset[int]:
        return frozenset(r.index for r in self.rules)

    def rule(self, index: int) -> Rule:
        for r in self.rules:
            if r.index == index:
                return r
        raise KeyError(index)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


def rewrite_step(
    t: Term,
    trs: Trs,
    subset: Iterable[int] | None = None,
    root: bool = True,
    below_root: bool = True,
) -> set[tuple[Position, int, Term]]:
    """Every one-step rewrite of ``t`` as ``(position, rule index, result)``.

    ``subset`` restricts the rules, ``root``/``below_root`` restrict positions.
    """
    allowed = None if subset is None else frozenset(subset)
    rules = [r for r in trs.rules if allowed is None or r.index in allowed]
    out = set()
    for p in positions(t):
        if (not p and not root) or (p and not below_root):
            continue
        s = subterm_at(t, p)
        if not isinstance(s, App):
            continue
        for r in rules:
            sigma = match(r.lhs, s)
            if sigma is not None:
                out.add((p, r.index, replace_at(t, p, substitute(r.rhs, sigma))))
    return out


def _closure(start: Iterable[Term], successors, bound: int) -> set[Term]:
    seen = set(start)
    if len(seen) > bound:
        raise BoundExceeded(bound)
    queue = deque(seen)
    while queue:
        t = queue.popleft()
        for s in successors(t):
            if s not in seen:
                seen.add(s)
                if len(seen) > bound:
                    raise BoundExceeded(bound)
                queue.append(s)
    return seen


def reachable_set(initial: Iterable[Term], trs: Trs, bound: int = DEFAULT_BOUND) -> frozenset[Term]:
    """Breadth-first closure of ``initial`` under one-step rewriting."""
    return frozenset(_closure(initial, lambda t: (s for _, _, s in rewrite_step(t, trs)), bound))


def abstract_successors(
    u: Term, trs: Trs, subset: Iterable[int] | None = None, bound: int = DEFAULT_BOUND
) -> frozenset[Term]:
    """Terms ``v`` such that ``u`` rewrites without any root step to some ``w``
    and ``w`` rewrites at the root to ``v`` with a rule from ``subset``."""
    subset = trs.indices if subset is None else frozenset(subset)
    inner = _closure([u], lambda t: (s for _, _, s in rewrite_step(t, trs, root=False)), bound)
    out = set()
    for w in inner:
        out.update(s for _, _, s in rewrite_step(w, trs, subset, below_root=False))
    return frozenset(out)
