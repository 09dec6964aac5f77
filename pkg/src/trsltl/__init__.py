"""Tree automata completion with epsilon transitions and model checking of
LTL formulas over regular tree-language atoms."""

__version__ = "0.1.0"

from .automata import (  # noqa: F401
    TreeAutomaton,
    accepts,
    canonical_form,
    canonical_term,
    complement,
    determinize,
    from_terms,
    intersection,
    is_empty,
    remove_epsilon,
    universal,
    validate,
)
from .buchi import check  # noqa: F401
from .completion import CompletionConfig, complete  # noqa: F401
from .kripke import FinalStates, SubTerms, build_kripke, to_dot  # noqa: F401
from .ltl import parse_formula  # noqa: F401
from .problem import format_problem, parse_problem  # noqa: F401
from .terms import App, Signature, State, Trs, Var, app  # noqa: F401
