import pytest
from hypothesis import given, strategies as st

from conftest import SMALL_SIGNATURES, terms
from trsltl.errors import BoundExceeded, InvalidPosition, UnknownSymbol
from trsltl.syntax import parse_term
from trsltl.terms import (
    App,
    Rule,
    Signature,
    Trs,
    Var,
    abstract_successors,
    app,
    depth,
    is_ground,
    match,
    positions,
    reachable_set,
    replace_at,
    rewrite_step,
    subterm_at,
    substitute,
    variables,
)

a, b, c = App("a"), App("b"), App("c")
x, y = Var("x"), Var("y")


def T(text, sig, vs=()):
    return parse_term(text, sig, frozenset(vs))


def test_positions_are_one_based():
    t = app("f", app("g", a), b)
    assert list(positions(t)) == [(), (1,), (1, 1), (2,)]
    assert subterm_at(t, (1, 1)) == a
    assert replace_at(t, (2,), c) == app("f", app("g", a), c)


def test_invalid_position():
    with pytest.raises(InvalidPosition):
        subterm_at(app("f", a), (2,))
    with pytest.raises(InvalidPosition):
        replace_at(a, (1,), b)


@given(st.sampled_from(SMALL_SIGNATURES).flatmap(terms))
def test_replace_with_own_subterm_is_identity(t):
    for p in positions(t):
        assert replace_at(t, p, subterm_at(t, p)) == t


@given(st.sampled_from(SMALL_SIGNATURES).flatmap(terms), st.data())
def test_match_recovers_substitution(t, data):
    # abstract a random set of positions into distinct variables
    ps = [p for p in positions(t) if p]
    chosen = data.draw(st.lists(st.sampled_from(ps), max_size=3, unique=True)) if ps else []
    pattern = t
    sigma = {}
    for i, p in enumerate(sorted(chosen, key=len)):
        try:
            sub = subterm_at(pattern, p)
        except InvalidPosition:
            continue  # inside an earlier abstraction
        if isinstance(sub, Var):
            continue
        pattern = replace_at(pattern, p, Var(f"v{i}"))
        sigma[f"v{i}"] = sub
    found = match(pattern, t)
    assert found is not None
    assert substitute(pattern, found) == t
    assert found == sigma


def test_nonlinear_match():
    p = app("f", x, x)
    assert match(p, app("f", a, a)) == {"x": a}
    assert match(p, app("f", a, b)) is None


def test_variables_and_ground():
    t = app("f", x, app("g", y))
    assert variables(t) == {"x", "y"}
    assert not is_ground(t)
    assert is_ground(app("f", a, b))
    assert depth(app("f", app("g", a), b)) == 3


def test_rule_validation():
    with pytest.raises(ValueError):
        Rule(x, a, 0)
    with pytest.raises(ValueError):
        Rule(app("f", x), app("g", y), 0)


def test_signature_checks():
    sig = Signature({"f": 1, "a": 0})
    with pytest.raises(UnknownSymbol):
        sig.arity("g")
    with pytest.raises(ValueError):
        sig.check(app("f", a, a))
    with pytest.raises(ValueError):
        Signature({"f": 1})
    assert [str(t) for t in sig.ground_terms(3)] == ["a", "f(a)", "f(f(a))"]


def test_rewrite_step_positions(running):
    trs = running.trs["R"]
    assert rewrite_step(app("f", a), trs) == {((1,), 0, app("f", b))}
    assert rewrite_step(app("f", c), trs) == {((), 2, app("g", a))}
    assert rewrite_step(app("f", c), trs, root=False) == set()


def test_reachable_set_running(running):
    # nine terms: every unary head over every constant
    got = reachable_set([app("f", a)], running.trs["R"])
    assert got == {app(h, k) for h in "fgh" for k in (a, b, c)}


def test_reachable_set_bound():
    sig = Signature({"f": 1, "a": 0})
    trs = Trs.from_pairs(sig, [(a, app("f", a))])
    with pytest.raises(BoundExceeded) as info:
        reachable_set([a], trs, bound=50)
    assert info.value.bound == 50


def test_abstract_successors(running):
    trs = running.trs["R"]
    fa = app("f", a)
    # inner rewriting a -> b -> c enables the root rule f(c) -> g(a)
    assert abstract_successors(fa, trs, {2}) == {app("g", a)}
    # rule 0 never fires at the root of f(a)
    assert abstract_successors(fa, trs, {0}) == frozenset()
    assert abstract_successors(a, trs, {0}) == {b}


def test_abstract_successors_nonlinear():
    sig = Signature({"f": 2, "g": 1, "a": 0, "b": 0})
    trs = Trs.from_pairs(sig, [(app("f", x, x), app("g", x)), (a, b)])
    assert abstract_successors(app("f", a, b), trs, {0}) == {app("g", b)}
    assert abstract_successors(app("f", a, a), trs, {0}) == {app("g", a), app("g", b)}


def test_parse_term_roundtrip():
    sig = Signature({"f": 2, "g": 1, "a": 0})
    for text in ["a", "g(a)", "f(g(a),a)", "f(x,g(y))"]:
        assert str(T(text, sig, "xy")) == text
