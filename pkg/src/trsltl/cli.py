"""Command line driver.

Exit codes: 0 success (fixpoint / HOLDS / SAFE / member), 1 property
violated (FAILS / UNSAFE / not a member), 2 usage or parse error, 3 a
resource bound was exceeded.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import __version__
from .automata import (
    accepts,
    canonical_mapping,
    from_terms,
    grounded_target,
    intersection,
    is_empty,
    relabel,
)
from .buchi import check
from .completion import CompletionConfig, complete
from .errors import AmbiguousTarget, BoundExceeded, CompletionBoundError, ParseError, TrsLtlError
from .kripke import FinalStates, SubTerms, build_kripke, to_dot
from .ltl import parse_formula
from .problem import ProblemFile, format_automaton, parse_problem
from .syntax import parse_term

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_BOUND = 0, 1, 2, 3


class UsageError(TrsLtlError):
    pass


def _load(path: str) -> ProblemFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_problem(text)


def _lookup(pf: ProblemFile, table: str, name: str):
    try:
        return getattr(pf, table)[name]
    except KeyError:
        raise UsageError(f"no {table.rstrip('s')} section named {name!r}") from None


def _initial(pf: ProblemFile, name: str):
    try:
        return pf.initial_automaton(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _completed(pf: ProblemFile, args):
    trs = _lookup(pf, "trs", args.trs)
    cfg = CompletionConfig(max_steps=args.max_steps, max_states=args.max_states)
    return complete(_initial(pf, args.initial), trs, cfg)


def _rules(spec: str | None, trs):
    if spec is None:
        return trs.indices
    try:
        chosen = frozenset(int(x) for x in spec.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"--rules expects comma separated indices, got {spec!r}") from None
    unknown = chosen - trs.indices
    if unknown:
        raise UsageError(f"unknown rule indices {sorted(unknown)}")
    return chosen


def _kripke(pf: ProblemFile, args, astar):
    trs = _lookup(pf, "trs", args.trs)
    init = FinalStates() if args.init_sub is None else SubTerms(_lookup(pf, "sets", args.init_sub))
    return build_kripke(astar, _rules(args.rules, trs), init)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_complete(args) -> int:
    pf = _load(args.problem)
    res = _completed(pf, args)
    mapping = canonical_mapping(res.automaton)
    a = relabel(res.automaton, mapping)
    stats = [
        f"# steps: {res.steps_taken}",
        f"# states: {len(a.states)}",
        f"# delta: {len(a.delta)}",
        f"# epsilon: {len(a.epsilon)}",
    ]
    body = "Ops " + " ".join(f"{n}:{k}" for n, k in pf.signature.items()) + "\n\n"
    body += format_automaton(f"{args.initial}_completed", a) + "\n\n" + "\n".join(stats) + "\n"
    if args.log:
        names = {q.name: r.name for q, r in mapping.items()}
        rename = lambda m: names.get(m.group(0), m.group(0))  # noqa: E731
        body += "".join("# " + re.sub(r"[A-Za-z_][A-Za-z0-9_'.]*", rename, str(e)) + "\n" for e in res.log)
    _write(body, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    pf = _load(args.problem)
    if args.formula_text is not None:
        text = args.formula_text
    elif args.formula is not None:
        try:
            text = Path(args.formula).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {args.formula}: {exc.strerror}") from None
    else:
        raise UsageError("one of --formula or --formula-text is required")
    formula = parse_formula(text.strip(), pf.signature)
    astar = _completed(pf, args).automaton
    k = _kripke(pf, args, astar)
    if args.dot:
        _write(to_dot(k), args.dot)
    verdict = check(k, formula, pf.signature, pf.automata)
    print(verdict.render())
    for q in verdict.empty_label_states:
        print(f"warning: state {q.name} has an empty label", file=sys.stderr)
    return EXIT_OK if verdict.holds else EXIT_VIOLATED


def cmd_reach(args) -> int:
    pf = _load(args.problem)
    astar = _completed(pf, args).automaton
    bad = _initial(pf, args.bad)
    w = is_empty(intersection(astar, bad))
    if w is None:
        print("SAFE")
        return EXIT_OK
    print(f"UNSAFE\n  witness: {w}")
    return EXIT_VIOLATED


def cmd_kripke(args) -> int:
    pf = _load(args.problem)
    astar = _completed(pf, args).automaton
    _write(to_dot(_kripke(pf, args, astar)), args.out)
    return EXIT_OK


def cmd_member(args) -> int:
    pf = _load(args.problem)
    if args.automaton is not None:
        a = _lookup(pf, "automata", args.automaton)
    elif args.trs is not None and args.initial is not None:
        a = _completed(pf, args).automaton
    else:
        raise UsageError("member needs --automaton or both --trs and --initial")
    t = parse_term(args.term, pf.signature)
    reached = sorted(q.name for q in a.run(t))
    try:
        g = grounded_target(a, t)
    except AmbiguousTarget:
        g = None
    print("states: " + (" ".join(reached) if reached else "(none)"))
    if g is not None:
        print(f"grounded: {g.name}")
    print("accepted" if accepts(a, t) else "rejected")
    return EXIT_OK if accepts(a, t) else EXIT_VIOLATED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trsltl", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def system(sp, required=True):
        sp.add_argument("problem", help="problem file")
        sp.add_argument("--trs", required=required, help="TRS section name")
        sp.add_argument("--initial", "--set", dest="initial", required=required,
                        help="Set or Automaton section giving the initial terms")
        sp.add_argument("--max-steps", type=int, default=1000)
        sp.add_argument("--max-states", type=int, default=10_000)

    def kripke_opts(sp):
        sp.add_argument("--rules", help="comma separated rule indices (default: all)")
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--init", choices=["final"], default="final")
        g.add_argument("--init-sub", metavar="SET", help="Set of initial subterms")

    sp = sub.add_parser("complete", help="compute the completed automaton")
    system(sp)
    sp.add_argument("--out", help="output path (default stdout)")
    sp.add_argument("--log", action="store_true", help="append the per-step log")
    sp.set_defaults(func=cmd_complete)

    sp = sub.add_parser("check", help="model-check a formula")
    system(sp)
    kripke_opts(sp)
    sp.add_argument("--formula", help="file holding the formula")
    sp.add_argument("--formula-text", help="formula given inline")
    sp.add_argument("--dot", help="also write the Kripke structure as DOT")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("reach", help="check that no bad term is reachable")
    system(sp)
    sp.add_argument("--bad", required=True, help="Set or Automaton of bad terms")
    sp.set_defaults(func=cmd_reach)

    sp = sub.add_parser("kripke", help="emit the Kripke structure as DOT")
    system(sp)
    kripke_opts(sp)
    sp.add_argument("--out", help="output path (default stdout)")
    sp.set_defaults(func=cmd_kripke)

    sp = sub.add_parser("member", help="membership of a term")
    system(sp, required=False)
    sp.add_argument("--automaton", help="Automaton section to test against")
    sp.add_argument("term")
    sp.set_defaults(func=cmd_member)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CompletionBoundError, BoundExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except (ParseError, UsageError, TrsLtlError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
