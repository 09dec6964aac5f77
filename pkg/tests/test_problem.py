import pytest

from conftest import PROBLEMS
from trsltl.automata import accepts
from trsltl.errors import ParseError
from trsltl.problem import format_automaton, format_problem, parse_problem
from trsltl.terms import App, State, app

a = App("a")

TAGGED = """
Ops f:1 a:0 b:0
# automaton with a tagged link
Automaton A
States q0 q1 q2
Final q2
Transitions
a -> q0
b -> q1
f(q0) -> q2
q1 -> q0 [0, 2]
"""


def test_running_sections(running):
    assert list(running.trs) == ["R"]
    assert len(running.trs["R"]) == 5
    assert running.sets["E"] == (app("f", a),)
    assert set(running.sets) == {"E", "Sub", "Bad", "Bad2"}


def test_tags_and_membership():
    pf = parse_problem(TAGGED)
    aut = pf.automata["A"]
    assert aut.eps_tags[(State("q1"), State("q0"))] == {0, 2}
    assert accepts(aut, app("f", App("b")))
    assert not accepts(aut, App("b"))


@pytest.mark.parametrize("path", sorted(PROBLEMS.glob("**/*.txt")), ids=lambda p: p.stem)
def test_roundtrip(path):
    pf = parse_problem(path.read_text())
    again = parse_problem(format_problem(pf))
    assert format_problem(again) == format_problem(pf)
    assert again.trs == pf.trs
    assert again.sets == pf.sets


def test_roundtrip_automaton():
    pf = parse_problem(TAGGED)
    text = format_problem(pf)
    assert "q1 -> q0 [0,2]" in text
    assert parse_problem(text).automata["A"] == pf.automata["A"]
    assert format_automaton("A", pf.automata["A"]).splitlines()[0] == "Automaton A"


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("TRS R\na -> b\n", "missing Ops section"),
        ("f(a)\nOps f:1 a:0\n", "content before the Ops section"),
        ("Ops f:1 a:0\nTRS R\nf(a,a) -> a\n", "arity"),
        ("Ops f:1 a:0\nTRS R\ng(a) -> a\n", "undeclared"),
        ("Ops f:1 a:0\nTRS R\nf(a) a\n", "'->'"),
        ("Ops f:1 a:0\nVars x\nTRS R\nf(a) -> x\n", "do not occur"),
        ("Ops f:1 a:0\nAutomaton A\nStates q\nFinal q\nTransitions\nf(a) -> q\n", "not normalized"),
        ("Ops f:1 a:0\nAutomaton A\nStates q\nFinal p\nTransitions\na -> q\n", "undeclared final"),
        ("Ops f:1 a:0\nAutomaton A\nStates q\nFinal q\nTransitions\na -> q [1]\n", "tags"),
        ("Ops f:1 a:0\nSet E\na\nSet E\na\n", "duplicate"),
        ("Ops f:1\n", "constant"),
        ("Ops f:1 a:0\nOps b:0\n", "duplicate Ops"),
        ("Ops f:x\n", "name:arity"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert fragment in str(info.value)


def test_error_reports_line():
    with pytest.raises(ParseError) as info:
        parse_problem("Ops f:1 a:0\n\nTRS R\nf(a) -> a\nf(a,a) -> a\n")
    assert info.value.line == 5


def test_initial_automaton_lookup(running):
    with pytest.raises(KeyError):
        running.initial_automaton("Nope")
    assert accepts(running.initial_automaton("Bad"), app("f", App("c")))
