"""Walk through the running example: completion, both Kripke structures,
the two temporal properties and the two reachability queries."""

import argparse
from pathlib import Path

from trsltl.automata import intersection, is_empty
from trsltl.buchi import check
from trsltl.completion import complete
from trsltl.kripke import SubTerms, build_kripke, to_dot
from trsltl.ltl import parse_formula
from trsltl.problem import format_automaton, parse_problem

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--problem", default=str(ROOT / "problems" / "running.txt"))
    ap.add_argument("--dot-dir", help="write the two Kripke structures as DOT files here")
    args = ap.parse_args()

    pf = parse_problem(Path(args.problem).read_text())
    trs = pf.trs["R"]
    res = complete(pf.initial_automaton("E"), trs)
    astar = res.automaton
    print(format_automaton("completed", astar))
    print(f"\n{res.steps_taken} steps\n{res.log_text()}\n")

    structures = {
        "constant_rules": build_kripke(astar, {0, 1}, SubTerms(pf.sets["Sub"])),
        "head_rules": build_kripke(astar, {2, 3, 4}),
    }
    for name, k in structures.items():
        path = [str(k.canonical(q)) for q in k.reachable()]
        print(f"{name}: states {path}, added self-loops {len(k.self_loops_added)}")
        if args.dot_dir:
            out = Path(args.dot_dir) / f"{name}.dot"
            out.write_text(to_dot(k))
            print(f"  wrote {out}")

    k = structures["head_rules"]
    for text in ["G({f(a)} -> X {g(a)})", "G({f(a)} -> X {h(a)})"]:
        verdict = check(k, parse_formula(text, pf.signature), pf.signature)
        print(f"\n{text}\n{verdict.render()}")

    for bad in ["Bad", "Bad2"]:
        w = is_empty(intersection(astar, pf.initial_automaton(bad)))
        print(f"\nreach {bad}: " + ("SAFE" if w is None else f"UNSAFE, witness {w}"))


if __name__ == "__main__":
    main()
