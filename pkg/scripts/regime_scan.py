"""Sweep the right-hand-side exponent beta across a kernel's regularity index
and watch the partial sums switch regime.

Below the index the sums track x^-beta / G*(beta) with a predictable
constant; at and above it they flatten onto the bounded-decay envelope.

    python3 scripts/regime_scan.py --kernel ingham --n 1000000
"""

import argparse
import math

from raflab.asymptotics import default_checkpoints, regime_check
from raflab.kernels import parse_kernel
from raflab.solver import RhsSpec, partial_sums, solve


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--kernel", default="ingham")
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--betas", type=float, nargs="*",
                    default=[-1.0, -0.5, 0.0, 0.25, 0.4, 0.5, 0.6, 0.75, 1.0, 2.0])
    args = ap.parse_args()

    kernel = parse_kernel(args.kernel)
    cps = default_checkpoints(args.n)
    print("kernel=%s  N=%d" % (kernel.spec, args.n))
    print("%8s  %9s  %9s  %12s  %12s  %s"
          % ("beta", "slope", "stderr", "pred const", "emp const", "verdict"))
    for beta in args.betas:
        coeffs = solve(kernel, RhsSpec("power", beta), args.n)
        v = regime_check(partial_sums(coeffs, cps), beta, kernel)
        pred = "--"
        if v.predicted_constant is not None and math.isfinite(abs(v.predicted_constant)):
            pred = "%12.6f" % v.predicted_constant.real
        emp = "--" if v.empirical_constant is None else "%12.6f" % v.empirical_constant
        print("%8.2f  %9.4f  %9.4f  %12s  %12s  %s"
              % (beta, v.fitted_slope, v.slope_stderr, pred, emp, v.verdict))


if __name__ == "__main__":
    main()
