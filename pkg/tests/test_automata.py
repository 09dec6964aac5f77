import itertools
import random

import pytest
from hypothesis import given, strategies as st

from conftest import automata, terms
from trsltl.automata import (
    EpsilonTransition,
    GroundTransition,
    TreeAutomaton,
    accepts,
    canonical_form,
    canonical_term,
    complement,
    determinize,
    from_terms,
    grounded_target,
    intersection,
    is_empty,
    relabel,
    remove_epsilon,
    union,
    universal,
    validate,
)
from trsltl.completion import complete
from trsltl.errors import AmbiguousTarget, Property2Violated
from trsltl.terms import App, Signature, State, app

a, b, c = App("a"), App("b"), App("c")
SIG = Signature({"f": 1, "g": 1, "a": 0, "b": 0})


def naive_reach(aut: TreeAutomaton, t: App, memo=None) -> set:
    """States a configuration ``t`` rewrites to, with transitions used as
    ground rewrite rules on mixed terms.

    Every configuration reachable from ``t`` is enumerated; child
    configurations are memoized, so the interleaving of independent steps is
    not explored twice.
    """
    memo = {} if memo is None else memo
    if t in memo:
        return memo[t]
    rules = [(App(tr.head, tr.args), tr.target) for tr in aut.delta]
    rules += [(e.source, e.target) for e in aut.epsilon]
    child = [_configs(aut, s, rules, memo) for s in t.args]
    start = {App(t.head, combo) for combo in itertools.product(*child)}
    seen, todo = set(start), list(start)
    while todo:
        s = todo.pop()
        for lhs, rhs in rules:
            if s == lhs and rhs not in seen:
                seen.add(rhs)
                todo.append(rhs)
    memo[t] = seen
    return {s for s in seen if isinstance(s, State)}


def _configs(aut, t, rules, memo):
    naive_reach(aut, t, memo)
    return memo[t]


def enumerate_terms(sig: Signature, max_depth: int = 4, cap: int = 400) -> list[App]:
    # ground_terms(d) already holds every term of depth <= d
    return sig.ground_terms(max_depth)[:cap]


@given(automata())
def test_accepts_matches_derivation_oracle(aut):
    for t in enumerate_terms(aut.signature, 4, cap=200):
        reached = naive_reach(aut, t)
        assert aut.run(t) == reached
        assert accepts(aut, t) == bool(reached & aut.finals)


@given(automata())
def test_grounded_target_is_accepted(aut):
    for t in enumerate_terms(aut.signature, 3):
        try:
            q = grounded_target(aut, t)
        except AmbiguousTarget:
            continue
        if q is not None:
            assert accepts(aut, t, q)


@given(automata(), automata(sig=None))
def test_boolean_operations(x, y):
    if x.signature != y.signature:
        y = TreeAutomaton(x.signature, frozenset(), frozenset(), frozenset())
    i, u, cx = intersection(x, y), union(x, y), complement(x)
    for t in enumerate_terms(x.signature, 3):
        ax, ay = accepts(x, t), accepts(y, t)
        assert accepts(i, t) == (ax and ay)
        assert accepts(u, t) == (ax or ay)
        assert accepts(cx, t) == (not ax)


@given(automata())
def test_de_morgan(aut):
    other = universal(aut.signature)
    lhs = complement(intersection(aut, other))
    rhs = union(complement(aut), complement(other))
    for t in enumerate_terms(aut.signature, 3):
        assert accepts(lhs, t) == accepts(rhs, t)


@given(automata())
def test_determinize_and_epsilon_removal_preserve_language(aut):
    d, r = determinize(aut), remove_epsilon(aut)
    assert not r.epsilon
    assert validate(d).prop1
    for t in enumerate_terms(aut.signature, 4, cap=150):
        assert accepts(d, t) == accepts(aut, t) == accepts(r, t)


@given(automata())
def test_emptiness_witness(aut):
    w = is_empty(aut)
    accepted = [t for t in enumerate_terms(aut.signature, 3) if accepts(aut, t)]
    if w is None:
        assert not accepted
    else:
        assert accepts(aut, w)
        if accepted:
            assert _d(w) <= min(_d(t) for t in accepted)


def _d(t):
    return 1 + max((_d(s) for s in t.args), default=0)


@given(st.lists(terms(SIG, 4), min_size=1, max_size=4), st.randoms(use_true_random=False))
def test_canonical_form_ignores_state_names(ts, rnd):
    # discovery order separates states of deterministic automata
    aut = from_terms(ts, SIG)
    names = [State(f"z{i}") for i in range(len(aut.states))]
    rnd.shuffle(names)
    renamed = relabel(aut, dict(zip(sorted(aut.states, key=lambda s: s.name), names)))
    assert canonical_form(renamed) == canonical_form(aut)


def test_from_terms_shares_subterms():
    aut = from_terms([app("f", a), app("g", a)], SIG)
    assert len(aut.states) == 3
    assert len(aut.finals) == 2
    assert len(aut.delta) == 3
    for t in [app("f", a), app("g", a)]:
        assert accepts(aut, t)
    for t in [a, app("f", b), app("f", app("f", a))]:
        assert not accepts(aut, t)


def test_complement_of_single_constant():
    comp = complement(from_terms([a], SIG))
    assert accepts(comp, b)
    assert not accepts(comp, a)


def test_universal_accepts_everything():
    u = universal(SIG)
    assert all(accepts(u, t) for t in enumerate_terms(SIG, 3))


def test_epsilon_removal_on_running_fixpoint(running):
    astar = complete(running.initial_automaton("E"), running.trs["R"]).automaton
    qa = grounded_target(astar, a)
    flat = remove_epsilon(astar)
    lang = {t for t in enumerate_terms(running.signature, 2) if accepts(flat, t, qa)}
    assert lang == {a, b, c}
    # b and c now reach the state of a without epsilon steps
    assert {(t.head, t.target) for t in flat.delta if t.target == qa} >= {("b", qa), ("c", qa)}


def test_validate_flags_both_properties():
    q0, q1 = State("q0"), State("q1")
    aut = TreeAutomaton(
        SIG,
        {q0, q1},
        {q1},
        {GroundTransition("a", (), q0), GroundTransition("a", (), q1), GroundTransition("b", (), q1)},
    )
    report = validate(aut)
    assert not report.prop1 and not report.prop2
    assert not report.ok
    with pytest.raises(Property2Violated):
        canonical_term(aut, q1)


def test_canonical_term_follows_ground_transitions():
    aut = from_terms([app("f", app("g", a))], SIG)
    (qf,) = aut.finals
    assert canonical_term(aut, qf) == app("f", app("g", a))


def test_grounded_target_ambiguity():
    q0, q1, q2, q3 = (State(f"q{i}") for i in range(4))
    aut = TreeAutomaton(
        SIG,
        {q0, q1, q2, q3},
        {q2},
        {
            GroundTransition("a", (), q0),
            GroundTransition("f", (q1,), q2),
            GroundTransition("f", (q3,), q3),
        },
        {EpsilonTransition(q0, q1), EpsilonTransition(q0, q3)},
    )
    with pytest.raises(AmbiguousTarget):
        grounded_target(aut, app("f", a))
    assert grounded_target(aut, a) == q0


def test_random_relabel_preserves_language():
    rnd = random.Random(7)
    aut = from_terms([app("f", a), app("g", b)], SIG)
    names = {q: State(f"r{rnd.random():.6f}") for q in aut.states}
    other = relabel(aut, names)
    for t in enumerate_terms(SIG, 3):
        assert accepts(other, t) == accepts(aut, t)


def test_canonical_form_on_completed_corpus():
    from trsltl.crosscheck import completed, load_corpus

    rnd = random.Random(3)
    for entry in load_corpus():
        aut = completed(entry)
        names = [State(f"z{i}") for i in range(len(aut.states))]
        rnd.shuffle(names)
        renamed = relabel(aut, dict(zip(sorted(aut.states, key=lambda s: s.name), names)))
        assert canonical_form(renamed) == canonical_form(aut), entry.name
