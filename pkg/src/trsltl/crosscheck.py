"""Independent cross-checks of completion and model checking results.

Each check compares a symbolic result against a brute-force computation
on explicit terms or explicit lassos. They are used by the test suite and
by ``scripts/corpus_report.py``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .automata import (
    TreeAutomaton,
    accepts,
    canonical_terms,
    complement,
    from_terms,
    intersection,
    is_empty,
    validate,
)
from .buchi import check, lasso_words
from .completion import CompletionConfig, complete, iterate_completion
from .kripke import KripkeStructure, small_language
from .ltl import Formula, TermSet, Universal, holds_on_lasso
from .problem import ProblemFile, parse_problem
from .terms import App, Trs, abstract_successors, reachable_set

CORPUS_DIR = Path(__file__).resolve().parents[2] / "problems" / "corpus"


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    problem: ProblemFile

    @property
    def trs(self) -> Trs:
        return self.problem.trs["R"]

    @property
    def initial(self) -> TreeAutomaton:
        return self.problem.initial_automaton("E")

    @property
    def initial_terms(self) -> tuple[App, ...]:
        return self.problem.sets["E"]


def load_corpus(directory: Path | str = CORPUS_DIR) -> list[CorpusEntry]:
    """Every ``*.txt`` problem in ``directory``; each has a TRS ``R`` and a set ``E``."""
    out = []
    for path in sorted(Path(directory).glob("*.txt")):
        out.append(CorpusEntry(path.stem, parse_problem(path.read_text(encoding="utf-8"))))
    return out


# -- language exactness -------------------------------------------------------


@dataclass(frozen=True)
class ExactnessReport:
    oracle: frozenset
    missing: tuple  # oracle terms the automaton rejects
    extra: App | None  # a term accepted by the automaton but not reachable

    @property
    def ok(self) -> bool:
        return not self.missing and self.extra is None


def language_exactness(astar: TreeAutomaton, initial: Iterable[App], trs: Trs) -> ExactnessReport:
    oracle = reachable_set(initial, trs)
    missing = tuple(sorted((t for t in oracle if not accepts(astar, t)), key=str))
    extra = is_empty(intersection(astar, complement(from_terms(oracle, trs.signature))))
    return ExactnessReport(oracle, missing, extra)


# -- epsilon relation versus abstract rewriting ----------------------------------


def epsilon_pairs(astar: TreeAutomaton, subset: Iterable[int]) -> set[tuple[App, App]]:
    """``(canonical(q), canonical(p))`` for every ``p -> q`` tagged by ``subset``."""
    chosen = frozenset(subset)
    canon = canonical_terms(astar)
    return {
        (canon[e.target], canon[e.source])
        for e in astar.epsilon
        if e.rule_tags & chosen and e.source in canon and e.target in canon
    }


def oracle_pairs(astar: TreeAutomaton, trs: Trs, subset: Iterable[int]) -> set[tuple[App, App]]:
    """Abstract rewriting pairs between canonical terms of ``astar``."""
    canon = set(canonical_terms(astar).values())
    return {(u, v) for u in canon for v in abstract_successors(u, trs, subset) if v in canon}


def rule_subsets(trs: Trs) -> list[frozenset[int]]:
    """Singletons plus the full rule set."""
    return [frozenset({i}) for i in sorted(trs.indices)] + [trs.indices]


# -- structural invariants --------------------------------------------------------


def invariant_violations(a0: TreeAutomaton, trs: Trs, cfg: CompletionConfig | None = None) -> list[int]:
    """Steps (0 is the input) after which determinism or the single-transition
    property is violated."""
    return [step for step, a, _ in iterate_completion(a0, trs, cfg) if not validate(a).ok]


# -- model checking versus explicit lassos ----------------------------------------


def atom_holds(atom, term: App) -> bool:
    """Truth of a term-set or universal atom on a single term."""
    if isinstance(atom, Universal):
        return True
    if isinstance(atom, TermSet):
        return term in atom.terms
    raise TypeError(f"unsupported atom {atom!r}")


def state_terms(k: KripkeStructure) -> dict:
    """The single term labelling each reachable state.

    The explicit evaluation is only defined when every label language is a
    singleton, which holds whenever the ground transitions are acyclic.
    """
    out = {}
    for q in k.reachable():
        terms = small_language(k.labels[q], limit=1)
        if terms is None or len(terms) != 1:
            raise ValueError(f"label of {q} is not a single term")
        out[q] = terms[0]
    return out


def explicit_verdict(k: KripkeStructure, f: Formula, max_len: int = 12) -> tuple[bool, tuple | None]:
    """``(holds, counterexample)`` by evaluating ``f`` on every lasso of ``k``
    whose prefix and cycle together have at most ``max_len`` states."""
    terms = state_terms(k)

    def holds(atom, q):
        return atom_holds(atom, terms[q])

    for prefix, cycle in lasso_words(k, max_len):
        if not holds_on_lasso(f, prefix, cycle, holds):
            return False, (prefix, cycle)
    return True, None


def agree(k: KripkeStructure, f: Formula, sig, max_len: int = 12) -> bool:
    return check(k, f, sig).holds == explicit_verdict(k, f, max_len)[0]


def completed(entry: CorpusEntry, cfg: CompletionConfig | None = None) -> TreeAutomaton:
    return complete(entry.initial, entry.trs, cfg).automaton


__all__ = [
    "CorpusEntry",
    "ExactnessReport",
    "agree",
    "atom_holds",
    "completed",
    "epsilon_pairs",
    "explicit_verdict",
    "invariant_violations",
    "language_exactness",
    "load_corpus",
    "oracle_pairs",
    "rule_subsets",
    "state_terms",
]
