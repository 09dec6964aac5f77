"""Buchi automata for model checking tree-language LTL on Kripke structures.

Pipeline of ``check``: negate the formula and put it in negation normal
form, translate it with a tableau into a generalized Buchi automaton,
degeneralize with a counter, take the product with the automaton of the
Kripke structure (an edge pair is kept only when the label languages
intersect) and search the product for an accepting lasso with a nested
depth-first search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .automata import (
    TreeAutomaton,
    complement,
    from_terms,
    intersection,
    is_empty,
    universal,
)
from .errors import TrsLtlError
from .kripke import KripkeStructure
from .ltl import (
    And,
    Atom,
    AutomatonRef,
    Const,
    Finally,
    Formula,
    Globally,
    Next,
    Not,
    Or,
    Prop,
    Release,
    TermSet,
    Universal,
    Until,
    nnf,
)
from .terms import App, Signature, State

Literal = tuple  # (Atom, polarity)
LabelExpr = frozenset  # frozenset[Literal]


class UnknownAutomaton(TrsLtlError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


def label_expr(*literals: Literal) -> LabelExpr | None:
    """Build a label expression, or ``None`` when it is contradictory."""
    e = frozenset(literals)
    if any((a, not p) in e for a, p in e):
        return None
    return e


def format_label(e: LabelExpr) -> str:
    if not e:
        return "*"
    return " & ".join(sorted((str(a) if p else f"!{a}") for a, p in e))


# -- atom automata ------------------------------------------------------------


def atom_automaton(
    atom: Atom, polarity: bool, sig: Signature, env: Mapping[str, TreeAutomaton] | None = None
) -> TreeAutomaton:
    if isinstance(atom, TermSet):
        base = from_terms(atom.terms, sig) if atom.terms else TreeAutomaton(sig, frozenset(), frozenset(), frozenset())
    elif isinstance(atom, Universal):
        base = universal(sig)
    elif isinstance(atom, AutomatonRef):
        if env is None or atom.name not in env:
            raise UnknownAutomaton(f"unknown automaton reference @{atom.name}")
        base = env[atom.name]
    else:
        raise TypeError(f"not an atom: {atom!r}")
    return base if polarity else complement(base)


def label_expr_automaton(
    e: LabelExpr, sig: Signature, env: Mapping[str, TreeAutomaton] | None = None
) -> TreeAutomaton:
    result = universal(sig)
    for atom, pol in sorted(e, key=lambda lit: (str(lit[0]), lit[1])):
        result = intersection(result, atom_automaton(atom, pol, sig, env))
    return result


# -- Buchi automata -----------------------------------------------------------


@dataclass(frozen=True)
class BuchiAutomaton:
    """Transition-labelled Buchi automaton with state-based acceptance.

    ``transitions`` is a tuple of ``(source, label, target)`` in a fixed
    order so that searches are reproducible.
    """

    states: frozenset
    initials: tuple
    finals: frozenset
    transitions: tuple
    letters: Mapping = field(default_factory=dict, compare=False)

    def successors(self) -> dict:
        out: dict = {s: [] for s in self.states}
        for s, lab, t in self.transitions:
            out[s].append((lab, t))
        return out


# -- tableau translation ------------------------------------------------------


def _key(f: Formula) -> str:
    return str(f)


def _expand(todo: list, lits: frozenset, nxt: frozenset, old: frozenset):
    """Yield ``(literals, next obligations, processed formulas)`` covers."""
    if not todo:
        yield lits, nxt, old
        return
    f, rest = todo[0], todo[1:]
    old = old | {f}
    if isinstance(f, Const):
        if f.value:
            yield from _expand(rest, lits, nxt, old)
        return
    if isinstance(f, Prop) or (isinstance(f, Not) and isinstance(f.arg, Prop)):
        lit = (f.atom, True) if isinstance(f, Prop) else (f.arg.atom, False)
        if (lit[0], not lit[1]) in lits:
            return
        yield from _expand(rest, lits | {lit}, nxt, old)
    elif isinstance(f, And):
        yield from _expand([f.left, f.right] + rest, lits, nxt, old)
    elif isinstance(f, Or):
        yield from _expand([f.left] + rest, lits, nxt, old)
        yield from _expand([f.right] + rest, lits, nxt, old)
    elif isinstance(f, Next):
        yield from _expand(rest, lits, nxt | {f.arg}, old)
    elif isinstance(f, Until):
        yield from _expand([f.right] + rest, lits, nxt, old)
        yield from _expand([f.left] + rest, lits, nxt | {f}, old)
    elif isinstance(f, Release):
        yield from _expand([f.left, f.right] + rest, lits, nxt, old)
        yield from _expand([f.right] + rest, lits, nxt | {f}, old)
    elif isinstance(f, Finally):
        yield from _expand([f.arg] + rest, lits, nxt, old)
        yield from _expand(rest, lits, nxt | {f}, old)
    elif isinstance(f, Globally):
        yield from _expand([f.arg] + rest, lits, nxt | {f}, old)
    else:
        raise TypeError(f"formula not in negation normal form: {f}")


def _eventualities(f: Formula) -> list[Formula]:
    out: dict[str, Formula] = {}

    def walk(g):
        if isinstance(g, (Until, Finally)):
            out.setdefault(_key(g), g)
        for attr in ("arg", "left", "right"):
            if hasattr(g, attr):
                walk(getattr(g, attr))

    walk(f)
    return [out[k] for k in sorted(out)]


def ltl_to_buchi(f: Formula) -> BuchiAutomaton:
    """Tableau translation of an NNF formula with counter degeneralization.

    State ``0`` is the initial state; the remaining states are
    ``(node, counter)`` pairs. A transition entering a node is labelled with
    the literals the node requires of the current letter.
    """
    f = nnf(f)
    untils = _eventualities(f)

    def good(old: frozenset) -> frozenset[int]:
        out = set()
        for i, u in enumerate(untils):
            goal = u.right if isinstance(u, Until) else u.arg
            if u not in old or goal in old:
                out.add(i)
        return frozenset(out)

    nodes: dict[tuple, int] = {}
    node_info: list[tuple] = []
    cover_cache: dict[frozenset, list[int]] = {}

    def covers(obligations: frozenset) -> list[int]:
        if obligations in cover_cache:
            return cover_cache[obligations]
        out = []
        todo = sorted(obligations, key=_key)
        for lits, nxt, old in _expand(todo, frozenset(), frozenset(), frozenset()):
            key = (lits, nxt, good(old))
            if key not in nodes:
                nodes[key] = len(node_info)
                node_info.append(key)
            if nodes[key] not in out:
                out.append(nodes[key])
        cover_cache[obligations] = out
        return out

    k = max(1, len(untils))
    init = 0
    states = {init}
    finals = set()
    transitions = []
    queue = []

    def visit(n: int, c: int):
        s = (n, c)
        if s not in states:
            states.add(s)
            queue.append(s)
            if c == 0 and (not untils or 0 in node_info[n][2]):
                finals.add(s)
        return s

    for m in covers(frozenset({f})):
        transitions.append((init, node_info[m][0], visit(m, 0)))
    while queue:
        n, c = queue.pop(0)
        lits, nxt, gd = node_info[n]
        c2 = (c + 1) % k if (untils and c in gd) else c
        for m in covers(nxt):
            transitions.append(((n, c), node_info[m][0], visit(m, c2)))
    return BuchiAutomaton(frozenset(states), (init,), frozenset(finals), tuple(transitions))


def kripke_to_buchi(k: KripkeStructure) -> BuchiAutomaton:
    """Every state accepting; the edge out of ``s`` reads the label of ``s``."""
    order = sorted(k.states, key=lambda s: s.name)
    transitions = tuple((s, s, t) for s in order for t in k.successors(s))
    return BuchiAutomaton(
        frozenset(k.states),
        tuple(sorted(k.initials, key=lambda s: s.name)),
        frozenset(k.states),
        transitions,
        letters=dict(k.labels),
    )


# -- product ------------------------------------------------------------------


class EdgeOracle:
    """Memoized non-emptiness of ``L(label) & L(label expression)``."""

    def __init__(self, sig: Signature, env: Mapping[str, TreeAutomaton] | None = None):
        self.sig = sig
        self.env = env
        self.exprs: dict[LabelExpr, TreeAutomaton] = {}
        self.cache: dict[tuple, App | None] = {}

    def witness(self, letter: Hashable, label: TreeAutomaton, e: LabelExpr) -> App | None:
        key = (letter, e)
        if key not in self.cache:
            if e not in self.exprs:
                self.exprs[e] = label_expr_automaton(e, self.sig, self.env)
            self.cache[key] = is_empty(intersection(label, self.exprs[e]))
        return self.cache[key]


def product(
    bk: BuchiAutomaton,
    bl: BuchiAutomaton,
    sig: Signature,
    env: Mapping[str, TreeAutomaton] | None = None,
    oracle: EdgeOracle | None = None,
) -> BuchiAutomaton:
    """Reachable part of ``bk x bl``; ``bk`` must have every state accepting.

    Each kept transition is labelled ``(kripke letter, label expression,
    witness term)``.
    """
    if bk.finals != bk.states:
        raise ValueError("the simplified product needs every state of the first automaton accepting")
    oracle = oracle or EdgeOracle(sig, env)
    succ_k, succ_l = bk.successors(), bl.successors()
    inits = tuple((p, q) for p in bk.initials for q in bl.initials)
    states = set(inits)
    queue = list(inits)
    transitions = []
    while queue:
        p, q = queue.pop(0)
        for letter, p2 in succ_k[p]:
            for e, q2 in succ_l[q]:
                w = oracle.witness(letter, bk.letters[letter], e)
                if w is None:
                    continue
                t = (p2, q2)
                transitions.append(((p, q), (letter, e, w), t))
                if t not in states:
                    states.add(t)
                    queue.append(t)
    finals = frozenset(s for s in states if s[1] in bl.finals)
    return BuchiAutomaton(frozenset(states), inits, finals, tuple(transitions))


# -- emptiness ----------------------------------------------------------------


def is_empty_buchi(b: BuchiAutomaton) -> tuple[list, list] | None:
    """Nested depth-first search. ``None`` when no accepting run exists,
    otherwise ``(prefix, cycle)`` with an accepting state at ``cycle[0]``."""
    succ: dict = {s: [] for s in b.states}
    for s, _, t in b.transitions:
        if t not in succ[s]:
            succ[s].append(t)
    outer_seen: set = set()
    inner_seen: set = set()

    def inner(seed) -> list | None:
        stack = [(seed, iter(succ[seed]))]
        inner_seen.add(seed)
        while stack:
            node, it = stack[-1]
            for n in it:
                if n == seed:
                    return [x for x, _ in stack]
                if n not in inner_seen:
                    inner_seen.add(n)
                    stack.append((n, iter(succ[n])))
                    break
            else:
                stack.pop()
        return None

    for s0 in b.initials:
        if s0 in outer_seen:
            continue
        outer_seen.add(s0)
        stack = [(s0, iter(succ[s0]))]
        while stack:
            node, it = stack[-1]
            for n in it:
                if n not in outer_seen:
                    outer_seen.add(n)
                    stack.append((n, iter(succ[n])))
                    break
            else:
                stack.pop()
                if node in b.finals:
                    cycle = inner(node)
                    if cycle is not None:
                        return [x for x, _ in stack], cycle
    return None


# -- model checking -----------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    holds: bool
    prefix: tuple[State, ...] = ()
    cycle: tuple[State, ...] = ()
    witnesses: Mapping[State, App | None] = field(default_factory=dict)
    empty_label_states: tuple[State, ...] = ()

    def render(self) -> str:
        if self.holds:
            return "HOLDS"

        def name(q: State) -> str:
            w = self.witnesses.get(q)
            return str(w) if w is not None else q.name

        parts = [name(q) for q in self.prefix] + ["(cycle) " + name(self.cycle[0])]
        parts += [name(q) for q in self.cycle[1:]]
        return "FAILS\n  " + " -> ".join(parts)


def check(
    k: KripkeStructure,
    f: Formula,
    sig: Signature | None = None,
    env: Mapping[str, TreeAutomaton] | None = None,
) -> Verdict:
    sig = sig or k.automaton.signature
    neg = nnf(Not(f))
    bl = ltl_to_buchi(neg)
    bk = kripke_to_buchi(k)
    prod = product(bk, bl, sig, env)
    lasso = is_empty_buchi(prod)
    empty = tuple(
        sorted((q for q in k.reachable() if is_empty(k.labels[q]) is None), key=lambda s: s.name)
    )
    if lasso is None:
        return Verdict(True, empty_label_states=empty)
    prefix, cycle = simplify_lasso([s for s, _ in lasso[0]], [s for s, _ in lasso[1]])
    witnesses = {q: k.canonical(q) for q in set(prefix) | set(cycle)}
    return Verdict(False, prefix, cycle, witnesses, empty)


def simplify_lasso(prefix: list, cycle: list) -> tuple[tuple, tuple]:
    """Shortest ``(prefix, cycle)`` describing the same infinite word."""
    n = len(cycle)
    for p in range(1, n + 1):
        if n % p == 0 and cycle == cycle[:p] * (n // p):
            cycle = cycle[:p]
            break
    prefix = list(prefix)
    while prefix and prefix[-1] == cycle[-1]:
        prefix.pop()
        cycle = [cycle[-1]] + cycle[:-1]
    return tuple(prefix), tuple(cycle)


def lasso_words(k: KripkeStructure, max_len: int) -> Iterable[tuple[tuple, tuple]]:
    """Every lasso ``(prefix, cycle)`` of ``k`` from an initial state with
    ``len(prefix) + len(cycle) <= max_len``."""
    initials = sorted(k.initials, key=lambda s: s.name)
    stack = [[s] for s in initials]
    while stack:
        path = stack.pop()
        last = path[-1]
        for n in k.successors(last):
            for j, s in enumerate(path):
                if s == n:
                    yield tuple(path[:j]), tuple(path[j:])
            if len(path) < max_len:
                stack.append(path + [n])
