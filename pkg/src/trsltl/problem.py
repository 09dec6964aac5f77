"""Reader and printer for self-contained problem files.

A problem file declares a signature and named sections::

    Ops f:1 g:1 a:0 b:0
    Vars x

    TRS R
    a -> b
    f(x) -> g(x)

    Automaton A
    States q0 q1
    Final q1
    Transitions
    a -> q0
    f(q0) -> q1
    q0 -> q1 [0]

    Set E
    f(a)

Lines starting with ``#`` are comments. Rules are numbered from 0 in each
TRS. An epsilon transition may carry rule tags in brackets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automata import EpsilonTransition, GroundTransition, TreeAutomaton
from .errors import ParseError
from .syntax import TokenStream, read_term, tokenize
from .terms import App, Rule, Signature, State, Trs

SECTION_KEYWORDS = ("Ops", "Vars", "TRS", "Automaton", "Set")


@dataclass
class ProblemFile:
    signature: Signature
    variables: tuple[str, ...] = ()
    trs: dict[str, Trs] = field(default_factory=dict)
    automata: dict[str, TreeAutomaton] = field(default_factory=dict)
    sets: dict[str, tuple[App, ...]] = field(default_factory=dict)

    def names(self) -> set[str]:
        return set(self.trs) | set(self.automata) | set(self.sets)

    def initial_automaton(self, name: str) -> TreeAutomaton:
        """Automaton section ``name``, or the exact automaton of set ``name``."""
        from .automata import from_terms

        if name in self.automata:
            return self.automata[name]
        if name in self.sets:
            return from_terms(self.sets[name], self.signature)
        raise KeyError(f"no set or automaton named {name!r}")


def _split_sections(text: str):
    """Yield ``(keyword, header tokens, header line, body lines)``."""
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        word = line.split(None, 1)[0]
        if word in SECTION_KEYWORDS:
            if current is not None:
                yield current
            current = (word, tokenize(line, lineno)[1:], lineno, [])
        else:
            if current is None:
                raise ParseError("content before the Ops section", lineno, 1)
            current[3].append((lineno, line))
    if current is not None:
        yield current


def _header_name(keyword: str, toks, lineno: int) -> str:
    if len(toks) != 1 or toks[0].kind != "ident":
        raise ParseError(f"{keyword} section needs exactly one name", lineno)
    return toks[0].text


def _parse_ops(toks, lineno: int) -> Signature:
    arities: dict[str, int] = {}
    i = 0
    while i < len(toks):
        if i + 2 >= len(toks) or toks[i].kind != "ident" or toks[i + 1].text != ":" or toks[i + 2].kind != "num":
            tok = toks[i]
            raise ParseError("expected name:arity in Ops", tok.line, tok.col)
        name = toks[i].text
        if name in arities:
            raise ParseError(f"symbol {name} declared twice", toks[i].line, toks[i].col)
        arities[name] = int(toks[i + 2].text)
        i += 3
    try:
        return Signature(arities)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None


def _split_arrow(lineno: int, line: str):
    toks = tokenize(line, lineno)
    arrows = [i for i, t in enumerate(toks) if t.text == "->"]
    if len(arrows) != 1:
        raise ParseError("expected exactly one '->'", lineno)
    i = arrows[0]
    return toks[:i], toks[i + 1 :]


def _term_from(toks, sig, variables=frozenset(), states=frozenset(), lineno=0):
    if not toks:
        raise ParseError("missing term", lineno)
    ts = TokenStream(toks, lineno)
    t = read_term(ts, sig, variables, states)
    if not ts.at_end():
        tok = ts.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return t


def _parse_trs(body, sig: Signature, variables: frozenset) -> Trs:
    rules = []
    for lineno, line in body:
        left, right = _split_arrow(lineno, line)
        lhs = _term_from(left, sig, variables, lineno=lineno)
        rhs = _term_from(right, sig, variables, lineno=lineno)
        try:
            rules.append(Rule(lhs, rhs, len(rules)))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return Trs(sig, tuple(rules))


def _parse_automaton(body, sig: Signature) -> TreeAutomaton:
    states: list[str] | None = None
    finals: list[str] = []
    delta, eps = set(), []
    in_transitions = False
    for lineno, line in body:
        toks = tokenize(line, lineno)
        head = toks[0].text
        if head in ("States", "Final") and not in_transitions:
            names = [t.text for t in toks[1:]]
            for t in toks[1:]:
                if t.kind != "ident":
                    raise ParseError(f"bad state name {t.text!r}", t.line, t.col)
                if t.text in sig:
                    raise ParseError(f"state {t.text} clashes with a symbol", t.line, t.col)
            if head == "States":
                states = names
            else:
                finals = names
            continue
        if head == "Transitions" and len(toks) == 1:
            in_transitions = True
            continue
        if not in_transitions:
            raise ParseError(f"unexpected {head!r} in automaton section", lineno, toks[0].col)
        if states is None:
            raise ParseError("States line must precede transitions", lineno)
        declared = frozenset(states)
        tags = None
        if toks and toks[-1].text == "]":
            try:
                open_at = max(i for i, t in enumerate(toks) if t.text == "[")
            except ValueError:
                raise ParseError("unbalanced ']'", lineno) from None
            inner = [t for t in toks[open_at + 1 : -1] if t.text != ","]
            if any(t.kind != "num" for t in inner):
                raise ParseError("rule tags must be numbers", lineno)
            tags = frozenset(int(t.text) for t in inner)
            line = line[: toks[open_at].col - 1]
        left, right = _split_arrow(lineno, line)
        lhs = _term_from(left, sig, states=declared, lineno=lineno)
        if len(right) != 1 or right[0].text not in declared:
            raise ParseError("right-hand side of a transition must be a declared state", lineno)
        target = State(right[0].text)
        if isinstance(lhs, State):
            eps.append(EpsilonTransition(lhs, target, tags or frozenset()))
        elif tags is not None:
            raise ParseError("only epsilon transitions carry rule tags", lineno)
        elif all(isinstance(a, State) for a in lhs.args):
            delta.add(GroundTransition(lhs.head, lhs.args, target))
        else:
            raise ParseError("transition is not normalized", lineno)
    if states is None:
        raise ParseError("automaton without States line", body[0][0] if body else None)
    unknown = set(finals) - set(states)
    if unknown:
        raise ParseError(f"undeclared final state {sorted(unknown)[0]}", body[0][0])
    return TreeAutomaton(
        sig,
        frozenset(State(s) for s in states),
        frozenset(State(s) for s in finals),
        frozenset(delta),
        frozenset(eps),
    )


def parse_problem(text: str) -> ProblemFile:
    sections = list(_split_sections(text))
    if not sections or sections[0][0] != "Ops":
        raise ParseError("missing Ops section", sections[0][2] if sections else 1)
    _, toks, lineno, body = sections[0]
    if body:
        raise ParseError("unexpected lines after Ops", body[0][0])
    pf = ProblemFile(_parse_ops(toks, lineno))
    sig = pf.signature
    for keyword, toks, lineno, body in sections[1:]:
        if keyword == "Ops":
            raise ParseError("duplicate Ops section", lineno)
        if keyword == "Vars":
            if body:
                raise ParseError("unexpected lines after Vars", body[0][0])
            for t in toks:
                if t.kind != "ident" or t.text in sig:
                    raise ParseError(f"bad variable name {t.text!r}", t.line, t.col)
            pf.variables += tuple(t.text for t in toks)
            continue
        name = _header_name(keyword, toks, lineno)
        if name in pf.names():
            raise ParseError(f"duplicate section name {name!r}", lineno)
        if keyword == "TRS":
            pf.trs[name] = _parse_trs(body, sig, frozenset(pf.variables))
        elif keyword == "Automaton":
            pf.automata[name] = _parse_automaton(body, sig)
        else:
            pf.sets[name] = tuple(_term_from(tokenize(l, n), sig, lineno=n) for n, l in body)
    return pf


# -- printing -----------------------------------------------------------------


def format_automaton(name: str, a: TreeAutomaton) -> str:
    lines = [
        f"Automaton {name}",
        "States " + " ".join(sorted(q.name for q in a.states)),
        "Final " + " ".join(sorted(q.name for q in a.finals)),
        "Transitions",
    ]
    lines += sorted((str(t) for t in a.delta), key=_transition_order)
    for e in sorted(a.epsilon, key=lambda e: (e.source.name, e.target.name)):
        tag = f" [{','.join(str(i) for i in sorted(e.rule_tags))}]" if e.rule_tags else ""
        lines.append(f"{e}{tag}")
    return "\n".join(lines)


def _transition_order(s: str):
    return (s.count("("), s)


def format_problem(pf: ProblemFile) -> str:
    blocks = ["Ops " + " ".join(f"{n}:{a}" for n, a in pf.signature.items())]
    if pf.variables:
        blocks.append("Vars " + " ".join(pf.variables))
    for name, trs in pf.trs.items():
        blocks.append("\n".join([f"TRS {name}"] + [str(r) for r in trs.rules]))
    for name, a in pf.automata.items():
        blocks.append(format_automaton(name, a))
    for name, ts in pf.sets.items():
        blocks.append("\n".join([f"Set {name}"] + [str(t) for t in ts]))
    return "\n\n".join(blocks) + "\n"
