"""Bottom-up tree automata with normalized ground transitions and
rule-tagged epsilon transitions.

The epsilon transition ``source -> target`` means every term recognized in
``source`` is also recognized in ``target``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import AmbiguousTarget, Property2Violated, UnknownSymbol
from .terms import App, Signature, State, Term, depth


@dataclass(frozen=True, slots=True)
class GroundTransition:
    head: str
    args: tuple[State, ...]
    target: State

    def __str__(self) -> str:
        lhs = self.head if not self.args else f"{self.head}({','.join(a.name for a in self.args)})"
        return f"{lhs} -> {self.target.name}"


@dataclass(frozen=True, slots=True)
class EpsilonTransition:
    source: State
    target: State
    rule_tags: frozenset = frozenset()

    def __str__(self) -> str:
        return f"{self.source.name} -> {self.target.name}"


def merge_epsilon(eps: Iterable[EpsilonTransition]) -> frozenset[EpsilonTransition]:
    """Collapse epsilon transitions with the same endpoints, uniting their tags."""
    tags: dict[tuple[State, State], frozenset] = {}
    for e in eps:
        key = (e.source, e.target)
        tags[key] = tags.get(key, frozenset()) | frozenset(e.rule_tags)
    return frozenset(EpsilonTransition(s, t, g) for (s, t), g in tags.items())


@dataclass(frozen=True)
class TreeAutomaton:
    signature: Signature
    states: frozenset[State]
    finals: frozenset[State]
    delta: frozenset[GroundTransition]
    epsilon: frozenset[EpsilonTransition] = field(default=frozenset())

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "delta", frozenset(self.delta))
        object.__setattr__(self, "epsilon", merge_epsilon(self.epsilon))
        if not self.finals <= self.states:
            raise ValueError(f"final states {sorted(s.name for s in self.finals - self.states)} undeclared")
        for t in self.delta:
            if t.head not in self.signature:
                raise UnknownSymbol(f"undeclared symbol {t.head!r}")
            if self.signature.arity(t.head) != len(t.args):
                raise ValueError(f"arity mismatch in transition {t}")
            if t.target not in self.states or not set(t.args) <= self.states:
                raise ValueError(f"transition {t} uses an undeclared state")
        for e in self.epsilon:
            if e.source not in self.states or e.target not in self.states:
                raise ValueError(f"epsilon transition {e} uses an undeclared state")

    # -- indices ---------------------------------------------------------

    @cached_property
    def by_head(self) -> dict[str, list[GroundTransition]]:
        idx = defaultdict(list)
        for t in self.delta:
            idx[t.head].append(t)
        return dict(idx)

    @cached_property
    def by_target(self) -> dict[State, list[GroundTransition]]:
        idx = defaultdict(list)
        for t in self.delta:
            idx[t.target].append(t)
        return dict(idx)

    @cached_property
    def by_lhs(self) -> dict[tuple, State]:
        """``(head, args) -> target``; only meaningful when ground transitions are deterministic."""
        return {(t.head, t.args): t.target for t in self.delta}

    @cached_property
    def eps_tags(self) -> dict[tuple[State, State], frozenset]:
        return {(e.source, e.target): e.rule_tags for e in self.epsilon}

    @cached_property
    def _closure(self) -> dict[State, frozenset[State]]:
        succ = defaultdict(set)
        for e in self.epsilon:
            succ[e.source].add(e.target)
        out = {}
        for q in self.states:
            seen = {q}
            todo = [q]
            while todo:
                for n in succ.get(todo.pop(), ()):
                    if n not in seen:
                        seen.add(n)
                        todo.append(n)
            out[q] = frozenset(seen)
        return out

    @cached_property
    def _inverse_closure(self) -> dict[State, frozenset[State]]:
        inv = defaultdict(set)
        for p, reach in self._closure.items():
            for q in reach:
                inv[q].add(p)
        return {q: frozenset(inv[q]) for q in self.states}

    def eps_closure(self, q: State) -> frozenset[State]:
        return self._closure[q]

    def eps_predecessors(self, q: State) -> frozenset[State]:
        """States whose epsilon closure contains ``q`` (including ``q``)."""
        return self._inverse_closure[q]

    # -- runs ------------------------------------------------------------

    def run(self, t: Term, use_epsilon: bool = True, _memo: dict | None = None) -> frozenset[State]:
        """Set of states ``t`` reduces to. State leaves are allowed (configurations)."""
        memo = {} if _memo is None else _memo
        hit = memo.get(t)
        if hit is not None:
            return hit
        if isinstance(t, State):
            res = self._closure[t] if (use_epsilon and t in self.states) else frozenset((t,))
        elif isinstance(t, App):
            res = self._ground_step(t, use_epsilon, memo)
            if use_epsilon:
                res = frozenset().union(*(self._closure[q] for q in res)) if res else res
        else:
            raise TypeError(f"cannot run automaton on non-ground term {t}")
        memo[t] = res
        return res

    def _ground_step(self, t: App, use_epsilon: bool, memo: dict) -> frozenset[State]:
        if t.head not in self.signature:
            raise UnknownSymbol(f"undeclared symbol {t.head!r}")
        arg_sets = [self.run(a, use_epsilon, memo) for a in t.args]
        if any(not s for s in arg_sets):
            return frozenset()
        return frozenset(
            tr.target
            for tr in self.by_head.get(t.head, ())
            if all(q in s for q, s in zip(tr.args, arg_sets))
        )

    def grounded_targets(self, t: App) -> frozenset[State]:
        """States reached with a ground transition as the final (root) step;
        epsilon steps are allowed inside the arguments."""
        return self._ground_step(t, True, {})

    def delta_run(self, t: Term) -> frozenset[State]:
        """States reached from ``t`` using ground transitions only."""
        return self.run(t, use_epsilon=False)

    def language_upto(self, max_depth: int, state: State | None = None) -> frozenset[App]:
        """Members of the language (or of one state's language) up to ``max_depth``."""
        return frozenset(t for t in self.signature.ground_terms(max_depth) if accepts(self, t, state))

    def __str__(self) -> str:
        lines = [
            "States " + " ".join(sorted(q.name for q in self.states)),
            "Final " + " ".join(sorted(q.name for q in self.finals)),
        ]
        lines += sorted(str(t) for t in self.delta)
        lines += sorted(str(e) for e in self.epsilon)
        return "\n".join(lines)


# -- membership and canonical terms ---------------------------------------


def accepts(a: TreeAutomaton, t: Term, target: State | None = None) -> bool:
    reached = a.run(t)
    if target is None:
        return bool(reached & a.finals)
    return target in reached


def grounded_target(a: TreeAutomaton, t: App) -> State | None:
    """The state ``t`` reaches with a ground final step.

    The ground-only run is preferred (it is unique when ground transitions are deterministic); when
    it does not exist the grounded target through epsilon arguments must be
    unique, otherwise ``AmbiguousTarget`` is raised.
    """
    direct = a.delta_run(t)
    if len(direct) == 1:
        return next(iter(direct))
    if len(direct) > 1:
        raise AmbiguousTarget(f"{t} reaches several states with ground transitions only")
    targets = a.grounded_targets(t)
    if not targets:
        return None
    if len(targets) > 1:
        raise AmbiguousTarget(f"{t} has grounded targets {sorted(q.name for q in targets)}")
    return next(iter(targets))


def canonical_term(a: TreeAutomaton, q: State) -> App | None:
    """The unique term recognized in ``q`` with ground transitions only."""
    cache: dict[State, App | None] = {}

    def go(s: State, active: frozenset) -> App | None:
        if s in cache:
            return cache[s]
        trs = a.by_target.get(s, [])
        if len(trs) > 1:
            raise Property2Violated(f"state {s.name} is the target of {len(trs)} ground transitions")
        if not trs or s in active:
            return None
        tr = trs[0]
        args = []
        for c in tr.args:
            sub = go(c, active | {s})
            if sub is None:
                return None
            args.append(sub)
        res = App(tr.head, tuple(args))
        cache[s] = res
        return res

    return go(q, frozenset())


def canonical_terms(a: TreeAutomaton) -> dict[State, App]:
    out = {}
    for q in a.states:
        t = canonical_term(a, q)
        if t is not None:
            out[q] = t
    return out


def eps_closure(a: TreeAutomaton, q: State) -> frozenset[State]:
    return a.eps_closure(q)


# -- construction ---------------------------------------------------------


def from_terms(ts: Iterable[App], sig: Signature) -> TreeAutomaton:
    """Automaton with one state per distinct subterm, recognizing exactly ``ts``."""
    ts = list(ts)
    subterms: dict[App, State] = {}
    delta = set()

    def visit(t: App) -> State:
        if t in subterms:
            return subterms[t]
        if not isinstance(t, App):
            raise ValueError(f"from_terms needs ground terms, got {t}")
        sig.check(t)
        args = tuple(visit(c) for c in t.args)
        q = State(f"q{len(subterms)}")
        subterms[t] = q
        delta.add(GroundTransition(t.head, args, q))
        return q

    finals = {visit(t) for t in sorted(ts, key=lambda t: (depth(t), str(t)))}
    return TreeAutomaton(sig, frozenset(subterms.values()), frozenset(finals), frozenset(delta))


def universal(sig: Signature) -> TreeAutomaton:
    q = State("qall")
    delta = frozenset(GroundTransition(f, (q,) * n, q) for f, n in sig.items())
    return TreeAutomaton(sig, frozenset({q}), frozenset({q}), delta)


def empty_automaton(sig: Signature) -> TreeAutomaton:
    return TreeAutomaton(sig, frozenset(), frozenset(), frozenset())


@dataclass(frozen=True)
class ValidationReport:
    """``prop1``: no two ground transitions share a left-hand side.
    ``prop2``: no state is the target of two ground transitions."""

    prop1: bool
    prop2: bool
    offending: tuple[GroundTransition, ...]

    @property
    def ok(self) -> bool:
        return self.prop1 and self.prop2


def validate(a: TreeAutomaton) -> ValidationReport:
    by_lhs = defaultdict(list)
    by_target = defaultdict(list)
    for t in a.delta:
        by_lhs[(t.head, t.args)].append(t)
        by_target[t.target].append(t)
    bad1 = [t for group in by_lhs.values() if len({x.target for x in group}) > 1 for t in group]
    bad2 = [t for group in by_target.values() if len(group) > 1 for t in group]
    offending = tuple(sorted(set(bad1) | set(bad2), key=str))
    return ValidationReport(not bad1, not bad2, offending)


def relabel(a: TreeAutomaton, mapping: Mapping[State, State]) -> TreeAutomaton:
    m = lambda q: mapping.get(q, q)  # noqa: E731
    return TreeAutomaton(
        a.signature,
        frozenset(m(q) for q in a.states),
        frozenset(m(q) for q in a.finals),
        frozenset(GroundTransition(t.head, tuple(m(x) for x in t.args), m(t.target)) for t in a.delta),
        frozenset(EpsilonTransition(m(e.source), m(e.target), e.rule_tags) for e in a.epsilon),
    )


def canonical_form(a: TreeAutomaton, prefix: str = "q") -> TreeAutomaton:
    """Rename states as ``prefix0, prefix1, ...`` following ``canonical_mapping``."""
    return relabel(a, canonical_mapping(a, prefix))


def canonical_mapping(a: TreeAutomaton, prefix: str = "q") -> dict[State, State]:
    """Rename states in bottom-up discovery order.

    A state is discovered through its smallest enabled transition, where a
    ground transition is keyed by its symbol and the indices of its
    arguments, and an epsilon transition by the index of its source. Two
    automata equal up to renaming produce equal canonical forms whenever
    discovery keys separate their states (always true with deterministic ground transitions).
    """
    index: dict[State, int] = {}
    order: list[State] = []
    eps_by_source = defaultdict(list)
    for e in a.epsilon:
        eps_by_source[e.source].append(e.target)
    ground = sorted(a.delta, key=str)
    while True:
        best: dict[State, tuple] = {}
        for t in ground:
            if t.target in index or not all(x in index for x in t.args):
                continue
            key = (0, t.head, tuple(index[x] for x in t.args))
            if t.target not in best or key < best[t.target]:
                best[t.target] = key
        for src, targets in eps_by_source.items():
            if src not in index:
                continue
            for tgt in targets:
                if tgt in index:
                    continue
                key = (1, "", (index[src],))
                if tgt not in best or key < best[tgt]:
                    best[tgt] = key
        if not best:
            break
        chosen = min(best, key=lambda s: (best[s], s.name))
        index[chosen] = len(order)
        order.append(chosen)
    order += sorted(a.states - set(order), key=lambda s: s.name)
    return {s: State(f"{prefix}{i}") for i, s in enumerate(order)}


# -- language operations --------------------------------------------------


def remove_epsilon(a: TreeAutomaton) -> TreeAutomaton:
    if not a.epsilon:
        return a
    delta = {
        GroundTransition(t.head, t.args, q) for t in a.delta for q in a.eps_closure(t.target)
    }
    return TreeAutomaton(a.signature, a.states, a.finals, frozenset(delta))


def _subset_construction(a: TreeAutomaton):
    a = remove_epsilon(a)
    sig = a.signature
    subsets: list[frozenset] = []
    seen: dict[frozenset, int] = {}
    trans: dict[tuple, frozenset] = {}
    arities = sorted(sig.items())
    changed = True
    while changed:
        changed = False
        snapshot = list(subsets)
        for f, n in arities:
            cands = a.by_head.get(f, [])
            for combo in itertools.product(snapshot, repeat=n):
                key = (f, combo)
                if key in trans:
                    continue
                tgt = frozenset(t.target for t in cands if all(x in s for x, s in zip(t.args, combo)))
                trans[key] = tgt
                if tgt not in seen:
                    seen[tgt] = len(subsets)
                    subsets.append(tgt)
                    changed = True
    names = {s: State(f"d{i}") for i, s in enumerate(subsets)}
    delta = frozenset(
        GroundTransition(f, tuple(names[s] for s in combo), names[tgt]) for (f, combo), tgt in trans.items()
    )
    return a, subsets, names, delta


def determinize(a: TreeAutomaton) -> TreeAutomaton:
    """Complete deterministic automaton via the subset construction; the
    empty subset plays the role of the sink state."""
    base, subsets, names, delta = _subset_construction(a)
    finals = frozenset(names[s] for s in subsets if s & base.finals)
    return TreeAutomaton(a.signature, frozenset(names.values()), finals, delta)


def complement(a: TreeAutomaton) -> TreeAutomaton:
    base, subsets, names, delta = _subset_construction(a)
    finals = frozenset(names[s] for s in subsets if not s & base.finals)
    return TreeAutomaton(a.signature, frozenset(names.values()), finals, delta)


def _joint_signature(a: Signature, b: Signature) -> Signature:
    if a == b:
        return a
    table = dict(a.items())
    for f, n in b.items():
        if table.setdefault(f, n) != n:
            raise ValueError(f"symbol {f} has different arities")
    return Signature(table)


def intersection(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    """Product automaton restricted to bottom-up reachable state pairs."""
    sig = _joint_signature(a.signature, b.signature)
    a, b = remove_epsilon(a), remove_epsilon(b)
    pairs: dict[tuple[State, State], State] = {}
    delta = set()
    changed = True
    while changed:
        changed = False
        for f in sorted(set(a.by_head) & set(b.by_head)):
            for ta in a.by_head[f]:
                for tb in b.by_head[f]:
                    args = tuple(zip(ta.args, tb.args))
                    if not all(p in pairs for p in args):
                        continue
                    tgt = (ta.target, tb.target)
                    if tgt not in pairs:
                        pairs[tgt] = State(f"x{len(pairs)}")
                        changed = True
                    delta.add(GroundTransition(f, tuple(pairs[p] for p in args), pairs[tgt]))
    finals = frozenset(s for (p, q), s in pairs.items() if p in a.finals and q in b.finals)
    return TreeAutomaton(sig, frozenset(pairs.values()), finals, frozenset(delta))


def union(a: TreeAutomaton, b: TreeAutomaton) -> TreeAutomaton:
    """Disjoint sum of two automata."""
    sig = _joint_signature(a.signature, b.signature)
    ra = relabel(a, {q: State("l." + q.name) for q in a.states})
    rb = relabel(b, {q: State("r." + q.name) for q in b.states})
    return TreeAutomaton(
        sig,
        ra.states | rb.states,
        ra.finals | rb.finals,
        ra.delta | rb.delta,
        ra.epsilon | rb.epsilon,
    )


def _term_key(t: App) -> tuple:
    return (depth(t), str(t))


def reachable_witnesses(a: TreeAutomaton) -> dict[State, App]:
    """A minimal-depth member of every non-empty state language."""
    witness: dict[State, App] = {}
    while True:
        new: dict[State, App] = {}
        for t in a.delta:
            if t.target in witness or not all(x in witness for x in t.args):
                continue
            cand = App(t.head, tuple(witness[x] for x in t.args))
            if t.target not in new or _term_key(cand) < _term_key(new[t.target]):
                new[t.target] = cand
        if not new:
            return witness
        for q, w in sorted(new.items(), key=lambda kv: _term_key(kv[1])):
            for r in a.eps_closure(q):
                if r not in witness and (r not in new or _term_key(w) < _term_key(new[r])):
                    new[r] = w
        # closure may have added states; all new witnesses share the current depth
        witness.update(new)


def is_empty(a: TreeAutomaton) -> App | None:
    """``None`` when the language is empty, else a minimal-depth witness."""
    witness = reachable_witnesses(a)
    found = [witness[q] for q in a.finals if q in witness]
    return min(found, key=_term_key) if found else None
