"""Kripke structures extracted from a completed tree automaton.

States are the automaton states; ``(q, q')`` is in the relation when the
epsilon transition ``q' -> q`` carries a rule of the selected subset. Each
state is labelled by the epsilon-free automaton whose only final state is
that state.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .automata import TreeAutomaton, canonical_term, reachable_witnesses
from .errors import EmptyInitials, Property2Violated
from .terms import App, State


@dataclass(frozen=True)
class FinalStates:
    """Start from the final states of the completed automaton."""


@dataclass(frozen=True)
class SubTerms:
    """Start from the states recognizing the given subterms with a ground last step."""

    terms: frozenset

    def __init__(self, terms: Iterable[App]):
        object.__setattr__(self, "terms", frozenset(terms))


InitSpec = FinalStates | SubTerms


def label(astar: TreeAutomaton, q: State) -> TreeAutomaton:
    return TreeAutomaton(astar.signature, astar.states, frozenset({q}), astar.delta)


@dataclass(frozen=True)
class KripkeStructure:
    automaton: TreeAutomaton
    states: frozenset[State]
    initials: frozenset[State]
    relation: frozenset[tuple[State, State]]
    self_loops_added: frozenset[State]
    subset: frozenset[int]

    @cached_property
    def labels(self) -> dict[State, TreeAutomaton]:
        return {q: label(self.automaton, q) for q in self.states}

    @cached_property
    def _succ(self) -> dict[State, tuple[State, ...]]:
        succ: dict[State, list[State]] = {q: [] for q in self.states}
        for s, t in self.relation:
            succ[s].append(t)
        return {q: tuple(sorted(v, key=lambda x: x.name)) for q, v in succ.items()}

    def successors(self, q: State) -> tuple[State, ...]:
        return self._succ[q]

    def reachable(self) -> list[State]:
        """States reachable from the initial states, in breadth-first name order."""
        seen = set(self.initials)
        order = sorted(self.initials, key=lambda s: s.name)
        queue = deque(order)
        while queue:
            for n in self.successors(queue.popleft()):
                if n not in seen:
                    seen.add(n)
                    order.append(n)
                    queue.append(n)
        return order

    def canonical(self, q: State) -> App | None:
        try:
            return canonical_term(self.automaton, q)
        except Property2Violated:
            return None


def build_kripke(
    astar: TreeAutomaton, subset: Iterable[int] | None = None, init: InitSpec | None = None
) -> KripkeStructure:
    init = init or FinalStates()
    if subset is None:
        subset = frozenset().union(*(e.rule_tags for e in astar.epsilon)) if astar.epsilon else frozenset()
    subset = frozenset(subset)
    relation = {(e.target, e.source) for e in astar.epsilon if e.rule_tags & subset}
    if isinstance(init, FinalStates):
        initials = frozenset(astar.finals)
    else:
        initials = frozenset(q for t in init.terms for q in astar.grounded_targets(t))
    if not initials:
        raise EmptyInitials("no initial state: the initial subterms are not recognized")
    succ = {q: set() for q in astar.states}
    for s, t in relation:
        succ[s].add(t)
    seen, todo, loops = set(initials), list(initials), set()
    while todo:
        q = todo.pop()
        if not succ[q]:
            loops.add(q)
            relation.add((q, q))
        for n in succ[q]:
            if n not in seen:
                seen.add(n)
                todo.append(n)
    return KripkeStructure(
        astar, frozenset(astar.states), initials, frozenset(relation), frozenset(loops), subset
    )


def small_language(a: TreeAutomaton, limit: int = 3) -> list[App] | None:
    """Members of ``L(a)`` when it is finite with at most ``limit`` terms."""
    memo: dict[State, list[App] | None] = {}
    productive = reachable_witnesses(a)

    def terms_of(q: State, active: frozenset) -> list[App] | None:
        if q in active:
            return None  # a productive cycle would make the language infinite
        if q in memo:
            return memo[q]
        out: list[App] = []
        for tr in a.by_target.get(q, ()):
            if not all(c in productive for c in tr.args):
                continue
            combos: list[tuple] = [()]
            for c in tr.args:
                sub = terms_of(c, active | {q})
                if sub is None:
                    memo[q] = None
                    return None
                combos = [x + (t,) for x in combos for t in sub]
                if len(combos) > limit:
                    memo[q] = None
                    return None
            out.extend(App(tr.head, x) for x in combos)
            if len(out) > limit:
                memo[q] = None
                return None
        memo[q] = out
        return out

    found: set[App] = set()
    for f in a.finals:
        ts = terms_of(f, frozenset())
        if ts is None:
            return None
        found.update(ts)
        if len(found) > limit:
            return None
    return sorted(found, key=str)


def _quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def to_dot(k: KripkeStructure) -> str:
    nodes = sorted(k.reachable(), key=lambda s: s.name)
    lines = ["digraph kripke {", "  rankdir=LR;", '  node [shape=circle];']
    for q in nodes:
        lang = small_language(k.labels[q])
        text = q.name if lang is None else q.name + "\\n{" + ", ".join(map(str, lang)) + "}"
        attrs = f"label={_quote(text)}"
        if q in k.initials:
            attrs += ", peripheries=2"
        lines.append(f"  {_quote(q.name)} [{attrs}];")
    for q in nodes:
        if q in k.initials:
            lines.append(f"  {_quote('init_' + q.name)} [shape=point];")
            lines.append(f"  {_quote('init_' + q.name)} -> {_quote(q.name)};")
    reach = set(nodes)
    for s, t in sorted(k.relation, key=lambda e: (e[0].name, e[1].name)):
        if s not in reach:
            continue
        style = " [style=dashed]" if s == t and s in k.self_loops_added else ""
        lines.append(f"  {_quote(s.name)} -> {_quote(t.name)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
