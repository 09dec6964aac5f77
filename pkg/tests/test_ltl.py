import pytest
from hypothesis import given, strategies as st

from trsltl.errors import ParseError
from trsltl.ltl import (
    FALSE,
    TRUE,
    And,
    AutomatonRef,
    Finally,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Prop,
    Release,
    TermSet,
    Universal,
    Until,
    atoms,
    holds_on_lasso,
    nnf,
    parse_formula,
    temporal_depth,
)
from trsltl.terms import App, Signature, app

SIG = Signature({"f": 1, "g": 1, "h": 1, "a": 0, "b": 0})
P = Prop(TermSet(frozenset({App("a")})))
Q = Prop(TermSet(frozenset({App("b")})))


def formulas(leaves=(P, Q)):
    base = st.sampled_from(list(leaves) + [TRUE, FALSE])
    unary = [Not, Next, Finally, Globally]
    binary = [And, Or, Implies, Until, Release]

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from(unary), children).map(lambda x: x[0](x[1])),
            st.tuples(st.sampled_from(binary), children, children).map(lambda x: x[0](x[1], x[2])),
        )

    return st.recursive(base, extend, max_leaves=6)


valuations = st.frozensets(st.sampled_from([P.atom, Q.atom]))
lassos = st.tuples(st.lists(valuations, max_size=3), st.lists(valuations, min_size=1, max_size=3))


def truth(atom, letter):
    return atom in letter


def test_parse_next_property():
    f = parse_formula("G({f(a)} -> X {g(a)})", SIG)
    fa, ga = TermSet(frozenset({app("f", App("a"))})), TermSet(frozenset({app("g", App("a"))}))
    assert f == Globally(Implies(Prop(fa), Next(Prop(ga))))


def test_precedence():
    p, q = "{a}", "{b}"
    assert parse_formula(f"{p} & {q} | {p}", SIG) == Or(And(P, Q), P)
    assert parse_formula(f"{p} -> {q} -> {p}", SIG) == Implies(P, Implies(Q, P))
    assert parse_formula(f"{p} U {q} U {p}", SIG) == Until(P, Until(Q, P))
    assert parse_formula(f"!{p} & X {q}", SIG) == And(Not(P), Next(Q))
    assert parse_formula(f"{p} | {q} U {p}", SIG) == Until(Or(P, Q), P)
    assert parse_formula("G F {a}", SIG) == Globally(Finally(P))


def test_atoms_syntax():
    f = parse_formula("@Bad R (* & {a, b} & true)", SIG)
    assert atoms(f) == {AutomatonRef("Bad"), Universal(), TermSet(frozenset({App("a"), App("b")}))}
    assert parse_formula("{}", SIG) == Prop(TermSet(frozenset()))


@pytest.mark.parametrize(
    "text", ["G", "{a", "{k(a)}", "{f(a,b)}", "{a} U", "({a}", "{a} {b}", "@", "G {x}"]
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_formula(text, SIG)


@given(formulas())
def test_printed_formula_parses_back(f):
    assert parse_formula(str(f), SIG) == f


@given(formulas())
def test_nnf_shape(f):
    def ok(g):
        if isinstance(g, Not):
            return isinstance(g.arg, Prop)
        if isinstance(g, Implies):
            return False
        return all(ok(getattr(g, n)) for n in ("arg", "left", "right") if hasattr(g, n))

    assert ok(nnf(f))
    assert ok(nnf(f, negate=True))


@given(formulas(), lassos)
def test_nnf_preserves_meaning(f, lasso):
    prefix, cycle = lasso
    v = holds_on_lasso(f, prefix, cycle, truth)
    assert holds_on_lasso(nnf(f), prefix, cycle, truth) == v
    assert holds_on_lasso(nnf(f, negate=True), prefix, cycle, truth) == (not v)


@given(formulas(), lassos)
def test_lasso_evaluation_ignores_unrolling(f, lasso):
    prefix, cycle = lasso
    v = holds_on_lasso(f, prefix, cycle, truth)
    assert holds_on_lasso(f, prefix + cycle, cycle, truth) == v
    assert holds_on_lasso(f, prefix, cycle + cycle, truth) == v


@given(formulas(), formulas(), lassos)
def test_derived_operator_identities(f, g, lasso):
    prefix, cycle = lasso
    ev = lambda h: holds_on_lasso(h, prefix, cycle, truth)  # noqa: E731
    assert ev(Finally(f)) == ev(Until(TRUE, f))
    assert ev(Globally(f)) == ev(Release(FALSE, f))
    assert ev(Until(f, g)) == ev(Not(Release(Not(f), Not(g))))


def test_lasso_evaluation_by_hand():
    pa, pb = frozenset({P.atom}), frozenset({Q.atom})
    assert holds_on_lasso(Globally(Finally(P)), [], [pa, pb], truth)
    assert not holds_on_lasso(Finally(Globally(P)), [], [pa, pb], truth)
    assert holds_on_lasso(Finally(Globally(P)), [pb, pb], [pa], truth)
    assert holds_on_lasso(Until(Q, P), [pb, pb], [pa], truth)
    assert not holds_on_lasso(Until(Q, P), [], [pb], truth)
    with pytest.raises(ValueError):
        holds_on_lasso(P, [pa], [], truth)


def test_temporal_depth():
    assert temporal_depth(P) == 0
    assert temporal_depth(Globally(Implies(P, Next(Q)))) == 2
    assert temporal_depth(Until(P, Finally(Q))) == 2
