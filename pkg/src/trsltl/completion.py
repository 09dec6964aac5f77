"""Tree automata completion with epsilon transitions (exact case only).

Each completion step finds the critical pairs ``(rule, sigma, q)`` where
``l sigma`` reduces to ``q`` with a ground transition as the last step, and
solves each one by recognizing ``r sigma`` in a state ``q'`` through ground
transitions and adding the epsilon transition ``q' -> q`` tagged with the
rule index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .automata import EpsilonTransition, GroundTransition, TreeAutomaton, validate
from .errors import (
    CollapsedConfiguration,
    InputNotNormalized,
    MaxStepsExceeded,
    StateBudgetExceeded,
)
from .terms import App, State, Term, Trs, Var, substitute


@dataclass(frozen=True)
class CriticalPair:
    rule_index: int
    sigma: tuple[tuple[str, State], ...]
    target: State

    @property
    def substitution(self) -> dict[str, State]:
        return dict(self.sigma)

    def __str__(self) -> str:
        binds = ", ".join(f"{x}:{q.name}" for x, q in self.sigma)
        return f"rule {self.rule_index} {{{binds}}} at {self.target.name}"

    def sort_key(self):
        return (self.rule_index, tuple((x, q.name) for x, q in self.sigma), self.target.name)


@dataclass(frozen=True)
class CompletionConfig:
    max_steps: int = 1000
    max_states: int = 10_000

    def __post_init__(self):
        if self.max_steps < 0 or self.max_states < 1:
            raise ValueError("completion bounds must be positive")


@dataclass(frozen=True)
class LogEntry:
    step: int
    rule: int
    kind: str  # "delta", "epsilon" or "tag"
    transition: str

    def __str__(self) -> str:
        return f"step {self.step} rule {self.rule} {self.kind} {self.transition}"


@dataclass(frozen=True)
class CompletionResult:
    automaton: TreeAutomaton
    steps_taken: int
    log: tuple[LogEntry, ...] = field(default=())

    def log_text(self) -> str:
        return "\n".join(str(e) for e in self.log)


class StateAllocator:
    """Hands out fresh state names ``q<n>`` not yet used in the automaton."""

    def __init__(self, existing, max_states: int):
        self.used = {q.name for q in existing}
        self.count = len(self.used)
        self.max_states = max_states
        self._next = 0

    def __call__(self) -> State:
        if self.count >= self.max_states:
            raise StateBudgetExceeded(f"state budget of {self.max_states} exceeded")
        while f"q{self._next}" in self.used:
            self._next += 1
        name = f"q{self._next}"
        self.used.add(name)
        self.count += 1
        return State(name)


# -- critical pairs ---------------------------------------------------------


def _match_any(a: TreeAutomaton, pat: Term, q: State, sigma: dict) -> Iterator[dict]:
    # pat.sigma ->* q, any last step
    if isinstance(pat, Var):
        bound = sigma.get(pat.name)
        if bound is not None:
            if q in a.eps_closure(bound):
                yield sigma
        else:
            for p in sorted(a.eps_predecessors(q), key=lambda s: s.name):
                yield {**sigma, pat.name: p}
    elif isinstance(pat, App):
        for s in sorted(a.eps_predecessors(q), key=lambda s: s.name):
            yield from _match_ground(a, pat, s, sigma)


def _match_ground(a: TreeAutomaton, pat: App, q: State, sigma: dict) -> Iterator[dict]:
    # pat.sigma ->* q with a ground transition at the root
    for tr in a.by_target.get(q, ()):
        if tr.head == pat.head and len(tr.args) == len(pat.args):
            yield from _match_args(a, pat.args, tr.args, 0, sigma)


def _match_args(a, pats, states, i, sigma):
    if i == len(pats):
        yield sigma
        return
    for s in _match_any(a, pats[i], states[i], sigma):
        yield from _match_args(a, pats, states, i + 1, s)


def find_critical_pairs(a: TreeAutomaton, trs: Trs) -> frozenset[CriticalPair]:
    pairs = set()
    for rule in trs.rules:
        for q in a.by_target:
            for sigma in _match_ground(a, rule.lhs, q, {}):
                pairs.add(CriticalPair(rule.index, tuple(sorted(sigma.items())), q))
    return frozenset(pairs)


# -- normalization ----------------------------------------------------------


def normal_form(s: Term, lhs: dict[tuple, State]) -> Term:
    """Rewrite ``s`` innermost-first with ground transitions until stuck."""
    if isinstance(s, App):
        args = tuple(normal_form(c, lhs) for c in s.args)
        if all(isinstance(c, State) for c in args):
            hit = lhs.get((s.head, args))
            if hit is not None:
                return hit
        return App(s.head, args)
    return s


def _innermost_leftmost(t: App) -> App:
    for c in t.args:
        if isinstance(c, App):
            return _innermost_leftmost(c)
    return t


def normalize_into(s: Term, target: State, lhs: dict[tuple, State], fresh) -> list[GroundTransition]:
    """Add normalized transitions to ``lhs`` (in place) so that ``s`` reaches
    ``target`` with ground transitions; returns the added transitions."""
    t = normal_form(s, lhs)
    if isinstance(t, State):
        raise CollapsedConfiguration(t)
    if not isinstance(t, App):
        raise ValueError(f"cannot normalize non-ground configuration {t}")
    added = []
    while True:
        if all(isinstance(c, State) for c in t.args):
            lhs[(t.head, t.args)] = target
            added.append(GroundTransition(t.head, t.args, target))
            return added
        inner = _innermost_leftmost(next(c for c in t.args if isinstance(c, App)))
        q = fresh()
        lhs[(inner.head, inner.args)] = q
        added.append(GroundTransition(inner.head, inner.args, q))
        t = normal_form(t, lhs)
        if isinstance(t, State):  # impossible with deterministic ground transitions
            raise CollapsedConfiguration(t)


def normalize(s: Term, target: State, delta, fresh) -> frozenset[GroundTransition]:
    """Enlarged transition set after normalizing the transition ``s -> target``."""
    lhs = {(t.head, t.args): t.target for t in delta}
    normalize_into(s, target, lhs, fresh)
    return frozenset(GroundTransition(h, args, q) for (h, args), q in lhs.items())


# -- completion -------------------------------------------------------------


def is_solved(a: TreeAutomaton, cp: CriticalPair, trs: Trs) -> bool:
    rhs = substitute(trs.rule(cp.rule_index).rhs, cp.substitution)
    nf = normal_form(rhs, a.by_lhs)
    return isinstance(nf, State) and (nf, cp.target) in a.eps_tags


def completion_step(
    a: TreeAutomaton, trs: Trs, cfg: CompletionConfig | None = None, fresh=None, step: int = 1
) -> tuple[TreeAutomaton, int, list[LogEntry]]:
    """Solve every critical pair of ``a``; returns (automaton, changes, log)."""
    cfg = cfg or CompletionConfig()
    fresh = fresh or StateAllocator(a.states, cfg.max_states)
    lhs = dict(a.by_lhs)
    eps = {k: set(v) for k, v in a.eps_tags.items()}
    states = set(a.states)
    log: list[LogEntry] = []
    for cp in sorted(find_critical_pairs(a, trs), key=CriticalPair.sort_key):
        rhs = substitute(trs.rule(cp.rule_index).rhs, cp.substitution)
        nf = normal_form(rhs, lhs)
        if isinstance(nf, State):
            src = nf
        else:
            src = fresh()
            for tr in normalize_into(nf, src, lhs, fresh):
                states.add(tr.target)
                log.append(LogEntry(step, cp.rule_index, "delta", str(tr)))
        key = (src, cp.target)
        if key not in eps:
            eps[key] = {cp.rule_index}
            log.append(LogEntry(step, cp.rule_index, "epsilon", f"{src.name} -> {cp.target.name}"))
        elif cp.rule_index not in eps[key]:
            eps[key].add(cp.rule_index)
            log.append(LogEntry(step, cp.rule_index, "tag", f"{src.name} -> {cp.target.name}"))
    if not log:
        return a, 0, log
    out = TreeAutomaton(
        a.signature,
        frozenset(states),
        a.finals,
        frozenset(GroundTransition(h, args, q) for (h, args), q in lhs.items()),
        frozenset(EpsilonTransition(s, t, frozenset(g)) for (s, t), g in eps.items()),
    )
    return out, len(log), log


def iterate_completion(a0: TreeAutomaton, trs: Trs, cfg: CompletionConfig | None = None):
    """Yield ``(step, automaton, log)`` for ``A0, A1, ...`` up to the fixpoint."""
    cfg = cfg or CompletionConfig()
    report = validate(a0)
    if not report.ok:
        raise InputNotNormalized(
            "initial automaton violates "
            + " and ".join(p for p, ok in (("ground determinism", report.prop1), ("one ground transition per state", report.prop2)) if not ok)
        )
    fresh = StateAllocator(a0.states, cfg.max_states)
    cur, step = a0, 0
    yield step, cur, []
    while True:
        nxt, changed, log = completion_step(cur, trs, cfg, fresh, step + 1)
        if not changed:
            return
        if step >= cfg.max_steps:
            raise MaxStepsExceeded(f"no fixpoint within max_steps={cfg.max_steps}")
        step += 1
        cur = nxt
        yield step, cur, log


def complete(a0: TreeAutomaton, trs: Trs, cfg: CompletionConfig | None = None) -> CompletionResult:
    log: list[LogEntry] = []
    last, steps = a0, 0
    for steps, last, entries in iterate_completion(a0, trs, cfg):
        log.extend(entries)
    return CompletionResult(last, steps, tuple(log))
