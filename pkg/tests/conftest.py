from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from trsltl.automata import EpsilonTransition, GroundTransition, TreeAutomaton
from trsltl.problem import parse_problem
from trsltl.terms import App, Signature, State

ROOT = Path(__file__).resolve().parents[1]
PROBLEMS = ROOT / "problems"

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def running():
    return parse_problem((PROBLEMS / "running.txt").read_text())


# -- hypothesis strategies ----------------------------------------------------

SMALL_SIGNATURES = [
    Signature({"f": 1, "a": 0, "b": 0}),
    Signature({"g": 2, "a": 0, "b": 0}),
    Signature({"f": 1, "g": 2, "a": 0}),
]


def terms(sig: Signature, max_depth: int = 4):
    consts = [n for n, k in sig.items() if k == 0]
    funcs = [(n, k) for n, k in sig.items() if k > 0]
    base = st.sampled_from([App(c) for c in consts])

    def extend(children):
        return st.one_of(
            *[st.tuples(*[children] * k).map(lambda args, n=n: App(n, args)) for n, k in funcs]
        )

    return st.recursive(base, extend, max_leaves=2 ** (max_depth - 1)).filter(
        lambda t: _depth(t) <= max_depth
    )


def _depth(t):
    return 1 + max((_depth(a) for a in t.args), default=0)


@st.composite
def automata(draw, sig: Signature | None = None, n_states: int = 3, epsilon: bool = True):
    """Random automaton over a small signature, possibly non-deterministic."""
    if sig is None:
        sig = draw(st.sampled_from(SMALL_SIGNATURES))
    qs = [State(f"s{i}") for i in range(draw(st.integers(1, n_states)))]
    candidates = []
    for name, k in sig.items():
        for args in _tuples(qs, k):
            for q in qs:
                candidates.append(GroundTransition(name, args, q))
    delta = draw(st.sets(st.sampled_from(candidates), max_size=8))
    eps = set()
    if epsilon and len(qs) > 1:
        pairs = [(p, q) for p in qs for q in qs if p != q]
        for p, q in draw(st.sets(st.sampled_from(pairs), max_size=3)):
            eps.add(EpsilonTransition(p, q, frozenset({0})))
    finals = draw(st.sets(st.sampled_from(qs), max_size=len(qs)))
    return TreeAutomaton(sig, frozenset(qs), frozenset(finals), frozenset(delta), frozenset(eps))


def _tuples(qs, k):
    if k == 0:
        return [()]
    return [(q,) + rest for q in qs for rest in _tuples(qs, k - 1)]
