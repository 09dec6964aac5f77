"""Cross-check completion on every system of the corpus and print a table.

Columns: reachable terms, automaton size, completion steps, language
exactness, epsilon relation agreement over rule subsets, and whether the
structural invariants held after every step.
"""

import argparse
import time

from trsltl.completion import CompletionConfig, complete
from trsltl.crosscheck import (
    CORPUS_DIR,
    epsilon_pairs,
    invariant_violations,
    language_exactness,
    load_corpus,
    oracle_pairs,
    rule_subsets,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--corpus", default=str(CORPUS_DIR))
    ap.add_argument("--max-steps", type=int, default=1000)
    args = ap.parse_args()
    cfg = CompletionConfig(max_steps=args.max_steps)

    header = f"{'system':<14}{'terms':>6}{'states':>7}{'delta':>6}{'eps':>5}{'steps':>6}  exact  links  invariants  time"
    print(header)
    print("-" * len(header))
    for e in load_corpus(args.corpus):
        start = time.perf_counter()
        res = complete(e.initial, e.trs, cfg)
        a = res.automaton
        exact = language_exactness(a, e.initial_terms, e.trs)
        subsets = rule_subsets(e.trs)
        links = sum(epsilon_pairs(a, s) == oracle_pairs(a, e.trs, s) for s in subsets)
        inv = not invariant_violations(e.initial, e.trs, cfg)
        elapsed = time.perf_counter() - start
        print(
            f"{e.name:<14}{len(exact.oracle):>6}{len(a.states):>7}{len(a.delta):>6}{len(a.epsilon):>5}"
            f"{res.steps_taken:>6}  {'yes' if exact.ok else 'NO':<5}  {links}/{len(subsets):<3}  "
            f"{'yes' if inv else 'NO':<10}  {elapsed:.3f}s"
        )


if __name__ == "__main__":
    main()
