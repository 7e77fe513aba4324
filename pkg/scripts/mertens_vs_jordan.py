"""Growth of Mertens-type sums against their square-root / power-law targets.

Two experiments off one sieve table:
  1. max |M(x)| / sqrt(x) at doubling limits (the ratio famously creeps,
     never settling below its x=5 maximum 2/sqrt(5) until far out);
  2. partial sums of the generalized Jordan function J_(-beta) against the
     main term x^(1-beta) / ((1-beta) zeta(1-beta)) for a few beta < 1/2.

    python3 scripts/mertens_vs_jordan.py --limit 1000000
"""

import argparse

from raflab.asymptotics import jordan_partial_check, mertens_ratio_report
from raflab.sieve import sieve


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=1_000_000)
    ap.add_argument("--betas", type=float, nargs="*", default=[0.1, 0.25, 0.4])
    args = ap.parse_args()

    table = sieve(args.limit)

    print("max |M(x)|/sqrt(x):")
    x = 1000
    while x <= args.limit:
        rep = mertens_ratio_report(table, x)
        print("  x <= %-9d  %.6f  at x=%d" % (x, rep.max_ratio, rep.argmax_x))
        x *= 10

    print("\nJordan partial sums, fitted exponent vs 1 - beta:")
    for beta in args.betas:
        rep = jordan_partial_check(table, beta, args.limit)
        dev = abs(rep.empirical_constant - rep.predicted_constant)
        rel = dev / abs(rep.predicted_constant)
        print("  beta=%.2f  slope %.4f (expect %.2f)  const %.6f vs %.6f  "
              "(rel dev %.2e)" % (beta, rep.slope, 1 - beta,
                                  rep.empirical_constant,
                                  rep.predicted_constant, rel))


if __name__ == "__main__":
    main()
