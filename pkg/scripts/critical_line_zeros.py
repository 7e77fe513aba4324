"""Zeros of the f-scaled Ingham transform for f(x) = q^x + 1.

For every integer q >= 2 the transform has the closed form
(q^2z - 2 q^z + q) / (q - q^z) and its zeros solve q T^2 - 2T + 1 = 0 with
T = q^-z, so |T| = q^-1/2 identically: every zero sits on Re z = 1/2 and
they repeat with period 2 pi / ln q.  This script lists them and evaluates
the transform there as a residual check.

    python3 scripts/critical_line_zeros.py --tmax 30
"""

import argparse
import math

from raflab.kernels import FSpec, Ingham, Scaled
from raflab.mellin import closed_transform, phi_f_zeros


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--qmin", type=int, default=2)
    ap.add_argument("--qmax", type=int, default=10)
    ap.add_argument("--tmax", type=float, default=30.0)
    args = ap.parse_args()

    for q in range(args.qmin, args.qmax + 1):
        kernel = Scaled(Ingham(), FSpec("exp_plus_one", q=q))
        zeros = phi_f_zeros(q, (0.0, args.tmax))
        period = 2 * math.pi / math.log(q)
        worst = max(abs(closed_transform(kernel, z).value) for z in zeros)
        print("q=%-2d  %2d zeros in (0, %g],  period 2pi/ln q = %.6f,  "
              "max |phi_f*| = %.1e" % (q, len(zeros), args.tmax, period, worst))
        for z in zeros[:4]:
            print("      z = %.1f + %.12fi" % (z.real, z.imag))
        if len(zeros) > 4:
            print("      ... (%d more)" % (len(zeros) - 4))


if __name__ == "__main__":
    main()
