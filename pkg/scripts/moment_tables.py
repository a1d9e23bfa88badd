#!/usr/bin/env python3
"""First- and second-moment tables for a product kernel.

Per n: the first-moment cutoff k*(n) (smallest k with E[X_k] < 1, an
a.a.s. ceiling for the clique number) next to the predicted c*n^e
scaling, then the second-moment ratio E[X_k^2]/E[X_k]^2 at
k = ceil(sqrt(n)) in log space. The ratio diverging is what rules out
the plain second-moment method for these kernels.
"""

import argparse
import math

from graphon_lab.errors import UnsupportedSpecError
from graphon_lab.graphons import parse_spec
from graphon_lab.moments import first_moment_cutoff, predicted_constants, variance_ratio


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graphon", default="sqrt:r=1")
    ap.add_argument("--grid", type=int, nargs="+",
                    default=[100, 400, 1600, 6400, 25600])
    ns = ap.parse_args()
    spec = parse_spec(ns.graphon)
    try:
        p = predicted_constants(spec)
        print(f"{ns.graphon}: predicted omega ~ c * n^{p.exponent:.3f}, "
              f"c in [{p.lower_constant:.3f}, {p.upper_constant:.3f}]")
    except UnsupportedSpecError:
        print(f"{ns.graphon}: no closed-form scaling prediction")
    print(f"{'n':>8} {'k*':>8} {'k*/n^e':>8} {'k=ceil(sqrt n)':>14} {'log E[X^2]/E[X]^2':>18}")
    for n in ns.grid:
        k_star = first_moment_cutoff(spec, n).k_star
        k = math.isqrt(n - 1) + 1
        ratio = variance_ratio(spec, n, k).log_ratio
        try:
            norm = f"{k_star / n ** predicted_constants(spec).exponent:>8.3f}"
        except UnsupportedSpecError:
            norm = f"{'-':>8}"
        print(f"{n:>8} {k_star:>8} {norm} {k:>14} {ratio:>18.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
