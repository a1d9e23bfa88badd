#!/usr/bin/env python3
"""Wall-clock feasibility probe for exact solves on the distance kernel.

Doubles n from --start, printing clique number, explored nodes, and
seconds per solve, until a solve trips the per-step time budget. The
node counts grow far faster than any polynomial in n, which is why the
exact scaling study caps out around n=512 on desk hardware: W(x,y) =
1 - |x - y| has no flat maximizer for the coloring bound to exploit,
so the search degenerates toward enumeration.
"""

import argparse
import time

from graphon_lab.cliques import SolveBudget, exact_max_clique
from graphon_lab.experiments import _trial_seed
from graphon_lab.graphons import line
from graphon_lab.sampling import SampleConfig, sample


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--start", type=int, default=128)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget-s", type=float, default=300.0,
                    help="wall budget per solve; the first abort ends the probe")
    ns = ap.parse_args()
    budget = SolveBudget(max_nodes=0, max_millis=int(ns.budget_s * 1000))
    n = ns.start
    print(f"{'n':>6} {'omega':>6} {'nodes':>14} {'seconds':>9}  status")
    while True:
        g = sample(SampleConfig(line(), n, seed=_trial_seed(ns.seed, n, 0)))
        t0 = time.perf_counter()
        res = exact_max_clique(g, budget)
        dt = time.perf_counter() - t0
        print(f"{n:>6} {res.size:>6} {res.stats['nodes']:>14,} {dt:>9.2f}  {res.status}")
        if res.status != "optimal":
            print(f"aborted at n={n}: incumbent {res.size} is only a lower bound")
            return 0
        n *= 2


if __name__ == "__main__":
    raise SystemExit(main())
