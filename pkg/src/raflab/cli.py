"""raf — command-line front end.

Subcommands: solve, scan, index, hlr, mellin, zeros, count, jordan,
mertens, verify.  Every subcommand accepts --out <path> (CSV artifact; a
<out>.manifest.json sidecar records cmd/kernel/rhs/n/backend/tolerances/
outputs/wall_ms/version) and --json (machine-readable stdout).  Option
precedence: explicit flags > --config JSON file > built-in defaults.

Exit codes: 0 ok; 1 verification failure (an asserted identity or
tolerance was violated); 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .asymptotics import (
    DEFAULT_TOL,
    BracketFailureError,
    Tolerances,
    default_checkpoints,
    estimate_index,
    hlr_report,
    jordan_partial_check,
    mertens_ratio_report,
    regime_check,
)
from .counting import (
    count_formula,
    count_oracle,
    elias_scan,
    log2_floor_table,
    meissel_scan,
    parse_count_what,
    smooth_bridge_scan,
)
from .kernels import (
    FSpec,
    Ingham,
    KernelDomainError,
    Scaled,
    UnsupportedKernelError,
    parse_kernel,
)
from .mellin import (
    PoleError,
    RegionError,
    closed_transform,
    limit_transform,
    limit_transform_wrt_f,
    phi_f_zeros,
)
from .sieve import MobiusTable, load_cache, save_cache, sieve
from .solver import (
    RhsSpec,
    delta_coeff_closed,
    parse_rhs,
    partial_sums,
    partial_sums_exact,
    solve,
)

# ---------------------------------------------------------------------------
# small parsing/formatting helpers
# ---------------------------------------------------------------------------


class UsageError(ValueError):
    pass


def _parse_z(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError('bad --z %r: use "<re>,<im>" or "<re>"' % (text,))


def _parse_betas(text: str) -> List[float]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            lo, hi, step = (float(p) for p in parts)
            if step <= 0 or hi < lo:
                raise ValueError
            count = int(round((hi - lo) / step))
            vals = [lo + i * step for i in range(count + 1)]
            return [v for v in vals if v <= hi + 1e-12]
    except ValueError:
        pass
    raise UsageError('bad range %r: use "<lo>:<hi>:<step>"' % (text,))


def _parse_im_range(text: str) -> Tuple[float, float]:
    parts = text.split(":")
    try:
        if len(parts) == 2:
            return float(parts[0]), float(parts[1])
    except ValueError:
        pass
    raise UsageError('bad --im %r: use "<lo>:<hi>"' % (text,))


def _fmt_c(z: complex) -> str:
    if abs(z.imag) < 1e-12:
        return "%.10g" % z.real
    return "%.10g%+.10gi" % (z.real, z.imag)


def _f(x: float) -> str:
    return "%.17g" % float(x)


def _write_csv(path: str, header: Sequence[str], rows: List[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_manifest(
    out: str,
    cmd: str,
    outputs: List[str],
    wall_ms: int,
    kernel: Optional[str] = None,
    rhs: Optional[str] = None,
    n: Optional[int] = None,
    backend: Optional[str] = None,
    tolerances: Optional[Dict[str, float]] = None,
) -> None:
    manifest = {
        "cmd": cmd,
        "kernel": kernel,
        "rhs": rhs,
        "n": n,
        "backend": backend,
        "tolerances": tolerances or {},
        "outputs": outputs,
        "wall_ms": wall_ms,
        "version": __version__,
    }
    with open(out + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _get_table(limit: int, cache: Optional[str]) -> MobiusTable:
    if cache:
        try:
            t = load_cache(cache)
            if t.limit >= limit:
                return t
        except (OSError, ValueError):
            pass
        t = sieve(limit)
        try:
            save_cache(t, cache)
        except OSError:
            pass
        return t
    return sieve(limit)


def _tol_from(args: argparse.Namespace) -> Tolerances:
    kw = {}
    if getattr(args, "slope_tol", None) is not None:
        kw["slope_tol_low"] = args.slope_tol
        kw["slope_tol_high"] = max(args.slope_tol, 2 * args.slope_tol)
    if getattr(args, "const_tol", None) is not None:
        kw["const_tol"] = args.const_tol
    return Tolerances(**kw)


def _tol_dict(tol: Tolerances) -> Dict[str, float]:
    return {
        "slope_tol_low": tol.slope_tol_low,
        "slope_tol_high": tol.slope_tol_high,
        "const_tol": tol.const_tol,
        "decay_slope_max": tol.decay_slope_max,
    }


# ---------------------------------------------------------------------------
# subcommand implementations (each returns the exit code)
# ---------------------------------------------------------------------------


def _cmd_solve(args: argparse.Namespace, cmdline: str) -> int:
    kernel = parse_kernel(args.kernel)
    rhs = parse_rhs(args.rhs)
    t0 = time.monotonic()
    coeffs = solve(kernel, rhs, args.n, backend=args.backend)
    wall = int(1000 * (time.monotonic() - t0))
    outputs: List[str] = []
    if args.out:
        if coeffs.backend == "exact":
            rows = [
                (n, coeffs.values[n].numerator, coeffs.values[n].denominator)
                for n in range(1, coeffs.limit + 1)
            ]
            _write_csv(args.out, ("n", "a_num", "a_den"), rows)
        else:
            rows = [(n, _f(coeffs.values[n])) for n in range(1, coeffs.limit + 1)]
            _write_csv(args.out, ("n", "a_n"), rows)
        outputs.append(args.out)
        _write_manifest(
            args.out, cmdline, outputs, wall, kernel=kernel.spec, rhs=rhs.label,
            n=args.n, backend=coeffs.backend,
        )
    a1 = coeffs.values[1]
    an = coeffs.values[coeffs.limit]
    if args.json:
        head = [
            str(coeffs.values[k]) if coeffs.backend == "exact" else float(coeffs.values[k])
            for k in range(1, min(coeffs.limit, 10) + 1)
        ]
        print(json.dumps({
            "kernel": kernel.spec, "rhs": rhs.label, "n": args.n,
            "backend": coeffs.backend, "a_head": head, "wall_ms": wall,
            "outputs": outputs,
        }))
    else:
        print(
            "solved %s | %s | n=%d backend=%s: a_1=%s a_%d=%s"
            % (kernel.spec, rhs.label, args.n, coeffs.backend, a1, coeffs.limit, an)
        )
    return 0


def _scan_rows(kernel, betas: List[float], n: int, tol: Tolerances):
    rows = []
    verdicts = []
    for b in betas:
        coeffs = solve(kernel, RhsSpec("power", b), n)
        series = partial_sums(coeffs, default_checkpoints(n))
        v = regime_check(series, b, kernel, tol)
        verdicts.append(v)
        pred = v.predicted_constant
        if pred is None:
            pred = complex(math.nan, math.nan)
        rows.append((
            "%g" % b, _f(v.fitted_slope), _f(v.slope_stderr),
            _f(pred.real), _f(pred.imag),
            _f(v.empirical_constant if v.empirical_constant is not None else math.nan),
            v.verdict,
        ))
    return rows, verdicts


_SCAN_HEADER = ("beta", "slope", "stderr", "pred_const_re", "pred_const_im", "emp_const", "verdict")


def _cmd_scan(args: argparse.Namespace, cmdline: str) -> int:
    kernel = parse_kernel(args.kernel)
    betas = _parse_betas(args.betas)
    tol = _tol_from(args)
    t0 = time.monotonic()
    rows, verdicts = _scan_rows(kernel, betas, args.n, tol)
    wall = int(1000 * (time.monotonic() - t0))
    outputs = []
    if args.out:
        _write_csv(args.out, _SCAN_HEADER, rows)
        outputs.append(args.out)
        _write_manifest(
            args.out, cmdline, outputs, wall, kernel=kernel.spec, rhs="power:<grid>",
            n=args.n, backend="float", tolerances=_tol_dict(tol),
        )
    if args.json:
        print(json.dumps([dict(zip(_SCAN_HEADER, r)) for r in rows]))
    else:
        print(",".join(_SCAN_HEADER))
        for r in rows:
            print(",".join(str(c) for c in r))
    return 0


def _cmd_index(args: argparse.Namespace, cmdline: str) -> int:
    kernel = parse_kernel(args.kernel)
    grid = _parse_betas(args.grid)
    tol = _tol_from(args)
    t0 = time.monotonic()
    try:
        est = estimate_index(kernel, grid, args.n, tol)
    except BracketFailureError as exc:
        print("index bracket failure: %s" % exc, file=sys.stderr)
        return 1
    wall = int(1000 * (time.monotonic() - t0))
    outputs = []
    if args.out:
        rows = [(
            "%g" % v.beta, _f(v.fitted_slope), _f(v.slope_stderr),
            _f(v.predicted_constant.real if v.predicted_constant else math.nan),
            _f(v.predicted_constant.imag if v.predicted_constant else 0.0),
            _f(v.empirical_constant if v.empirical_constant is not None else math.nan),
            v.verdict,
        ) for v in est.grid]
        _write_csv(args.out, _SCAN_HEADER, rows)
        outputs.append(args.out)
        _write_manifest(
            args.out, cmdline, outputs, wall, kernel=kernel.spec, rhs="power:<grid>",
            n=args.n, backend="float", tolerances=_tol_dict(tol),
        )
    if args.json:
        print(json.dumps({
            "kernel": kernel.spec, "alpha_hat": est.alpha_hat,
            "beta_lo": est.beta_lo, "beta_hi": est.beta_hi,
            "bisections": est.bisections, "wall_ms": wall,
        }))
    else:
        print(
            "alpha_hat=%.6g bracket=[%.6g, %.6g] after %d bisections (%s)"
            % (est.alpha_hat, est.beta_lo, est.beta_hi, est.bisections, kernel.spec)
        )
    return 0


def _cmd_hlr(args: argparse.Namespace, cmdline: str) -> int:
    kernel = parse_kernel(args.kernel)
    rhs = RhsSpec("delta") if args.beta == math.inf else RhsSpec("power", args.beta)
    t0 = time.monotonic()
    coeffs = solve(kernel, rhs, args.n)
    rep = hlr_report(coeffs)
    wall = int(1000 * (time.monotonic() - t0))
    outputs = []
    if args.out:
        _write_csv(
            args.out,
            ("sup_abs", "growth_exponent", "prime_tail_mean", "limit", "primes_used"),
            [(_f(rep.sup_abs), _f(rep.growth_exponent), _f(rep.prime_tail_mean),
              rep.limit, rep.primes_used)],
        )
        outputs.append(args.out)
        _write_manifest(
            args.out, cmdline, outputs, wall, kernel=kernel.spec, rhs=rhs.label,
            n=args.n, backend="float",
        )
    if args.json:
        print(json.dumps({
            "sup_abs": rep.sup_abs, "growth_exponent": rep.growth_exponent,
            "prime_tail_mean": rep.prime_tail_mean, "limit": rep.limit,
            "primes_used": rep.primes_used,
        }))
    else:
        print(
            "sup|n a_n| = %.10g  growth_exponent = %.4g  prime_tail_mean = %.6g  (n <= %d)"
            % (rep.sup_abs, rep.growth_exponent, rep.prime_tail_mean, rep.limit)
        )
    return 0


def _cmd_mellin(args: argparse.Namespace, cmdline: str) -> int:
    kernel = parse_kernel(args.kernel)
    z = _parse_z(args.z)
    t0 = time.monotonic()
    if args.method == "closed":
        res = closed_transform(kernel, z)
    else:
        if isinstance(kernel, Scaled):
            res = limit_transform_wrt_f(kernel.base, kernel.f, z, args.n)
        else:
            res = limit_transform(kernel, z, args.n)
    wall = int(1000 * (time.monotonic() - t0))
    outputs = []
    if args.out:
        _write_csv(
            args.out,
            ("kernel", "z_re", "z_im", "method", "value_re", "value_im", "n"),
            [(kernel.spec, _f(z.real), _f(z.imag), res.method,
              _f(res.value.real), _f(res.value.imag), res.n if res.n else "")],
        )
        outputs.append(args.out)
        _write_manifest(args.out, cmdline, outputs, wall, kernel=kernel.spec, n=args.n)
    if args.json:
        print(json.dumps({
            "kernel": kernel.spec, "z": [z.real, z.imag], "method": res.method,
            "value": [res.value.real, res.value.imag], "n": res.n, "note": res.note,
        }))
    else:
        tail = "  (%s)" % res.note if res.note else ""
        print(_fmt_c(res.value) + tail)
    return 0


def _cmd_zeros(args: argparse.Namespace, cmdline: str) -> int:
    lo, hi = _parse_im_range(args.im)
    t0 = time.monotonic()
    zs = phi_f_zeros(args.q, (lo, hi))
    kernel = Scaled(Ingham(), FSpec("exp_plus_one", q=args.q))
    rows = []
    for z in zs:
        av = abs(closed_transform(kernel, z).value)
        rows.append((args.q, _f(z.real), _f(z.imag), _f(av)))
    wall = int(1000 * (time.monotonic() - t0))
    outputs = []
    if args.out:
        _write_csv(args.out, ("q", "re", "im", "abs_value"), rows)
        outputs.append(args.out)
        _write_manifest(args.out, cmdline, outputs, wall, kernel=kernel.spec)
    if args.json:
        print(json.dumps([{"q": args.q, "re": z.real, "im": z.imag} for z in zs]))
    else:
        print("%d zero(s) of the f-relative transform, q=%d, Im in [%g, %g]:"
              % (len(zs), args.q, lo, hi))
        for z in zs:
            print("  %s" % _fmt_c(z))
    return 0


def _cmd_count(args: argparse.Namespace, cmdline: str) -> int:
    spec = parse_count_what(args.what, args.n)
    need = spec.n
    if spec.kind == "prime_powers":
        need = spec.p * spec.n
    elif spec.kind == "smooth":
        prod = 1
        for qq in spec.primes:
            prod *= qq
        need = prod * spec.n
    table = _get_table(need, args.sieve_cache)
    t0 = time.monotonic()
    formula = count_formula(spec, table)
    oracle_val: Optional[int] = None
    match = True
    if args.oracle:
        oracle_val = count_oracle(spec)
        match = formula == oracle_val
    wall = int(1000 * (time.monotonic() - t0))
    outputs = []
    if args.out:
        _write_csv(
            args.out,
            ("what", "n", "formula", "oracle", "match"),
            [(spec.label, spec.n, formula,
              oracle_val if oracle_val is not None else "",
              str(match).lower() if args.oracle else "")],
        )
        outputs.append(args.out)
        _write_manifest(args.out, cmdline, outputs, wall, n=args.n)
    if args.json:
        print(json.dumps({
            "what": spec.label, "n": spec.n, "formula": formula,
            "oracle": oracle_val, "match": match if args.oracle else None,
        }))
    elif args.oracle:
        print("formula=%d oracle=%d match=%s" % (formula, oracle_val, str(match).lower()))
    else:
        print("formula=%d" % formula)
    return 0 if match else 1


def _cmd_jordan(args: argparse.Namespace, cmdline: str) -> int:
    table = _get_table(args.x, args.sieve_cache)
    t0 = time.monotonic()
    rep = jordan_partial_check(table, args.beta, args.x)
    wall = int(1000 * (time.monotonic() - t0))
    outputs = []
    if args.out:
        rows = [(int(x), _f(v)) for x, v in zip(rep.checkpoints, rep.values)]
        _write_csv(args.out, ("x", "jordan_sum"), rows)
        outputs.append(args.out)
        _write_manifest(
            args.out, cmdline, outputs, wall, rhs="jordan:%g" % args.beta, n=args.x,
        )
    if args.json:
        print(json.dumps({
            "beta": rep.beta, "x": rep.limit, "slope": rep.slope, "stderr": rep.stderr,
            "predicted_constant": rep.predicted_constant,
            "empirical_constant": rep.empirical_constant,
        }))
    else:
        print(
            "jordan beta=%g x<=%d: slope=%.4f (expect %.4f), constant=%.6g (predicted %.6g)"
            % (rep.beta, rep.limit, rep.slope, 1.0 - rep.beta,
               rep.empirical_constant, rep.predicted_constant)
        )
    return 0


def _cmd_mertens(args: argparse.Namespace, cmdline: str) -> int:
    table = _get_table(args.x, args.sieve_cache)
    t0 = time.monotonic()
    rep = mertens_ratio_report(table, args.x)
    wall = int(1000 * (time.monotonic() - t0))
    outputs = []
    if args.out:
        _write_csv(args.out, ("limit", "max_ratio", "argmax_x"),
                   [(rep.limit, _f(rep.max_ratio), rep.argmax_x)])
        outputs.append(args.out)
        _write_manifest(args.out, cmdline, outputs, wall, n=args.x)
    if args.json:
        print(json.dumps({
            "x": rep.limit, "max_ratio": rep.max_ratio, "argmax_x": rep.argmax_x,
        }))
    else:
        print("max |M(x)|/sqrt(x) over 2<=x<=%d: %.6f at x=%d"
              % (rep.limit, rep.max_ratio, rep.argmax_x))
    return 0


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------


def _checks_exact() -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
    def meissel() -> Tuple[bool, str]:
        table = sieve(100_000)
        t = meissel_scan(table, 100_000)
        bad = np.nonzero(t[1:] != 1)[0]
        return len(bad) == 0, "all n <= 1e5" if len(bad) == 0 else "fails at n=%d" % (bad[0] + 1)

    def elias() -> Tuple[bool, str]:
        table = sieve(100_000)
        t = elias_scan(table, 100_000)
        expect = 1 + 2 * log2_floor_table(100_000)
        ok = bool(np.all(t[1:] == expect[1:]))
        return ok, "1+2*floor(log2 n) for all n <= 1e5" if ok else "mismatch"

    def beta1() -> Tuple[bool, str]:
        table = sieve(10_000)
        coeffs = solve(Ingham(), RhsSpec("power", 1.0), 10_000, backend="exact")
        for n in range(1, 10_001):
            if coeffs.values[n] != Fraction(int(table.mu[n]), n):
                return False, "a_%d != mu/n" % n
        return True, "a_n = mu(n)/n for n <= 1e4"

    def beta_inf() -> Tuple[bool, str]:
        table = sieve(10_000)
        coeffs = solve(Ingham(), RhsSpec("delta"), 10_000, backend="exact")
        closed = delta_coeff_closed(table, 10_000)
        for n in range(1, 10_001):
            if coeffs.values[n] * n != closed[n]:
                return False, "n*a_n mismatch at n=%d" % n
        cps = list(range(200, 10_001, 200))
        _, a1 = partial_sums_exact(coeffs, cps)
        for x, v in zip(cps, a1):
            if v != int(table.mertens[x]) - int(table.mertens[x // 2]):
                return False, "A1(%d) != M - M(x/2)" % x
        return True, "delta solve = closed form; A1 = M(x)-M(x/2) at 50 checkpoints"

    def mu6_rhs() -> Tuple[bool, str]:
        table = sieve(30_000)
        coeffs = solve(Ingham(), RhsSpec("l0pow", 1.0), 5_000, backend="exact")
        for k in range(1, 5_001):
            if coeffs.values[k] * k != int(table.mu[6 * k]):
                return False, "a_%d != mu(6k)/k" % k
        return True, "3-smooth RHS gives a_k = mu(6k)/k for k <= 5000"

    def bridge() -> Tuple[bool, str]:
        table = sieve(60_000)
        lhs = smooth_bridge_scan(table, 10_000)
        from .solver import l0_three_smooth

        rhs = l0_three_smooth(10_000)
        ok = bool(np.all(lhs[1:] == rhs[1:]))
        return ok, "sum mu(6k) floor(n/k) = 3-smooth count, n <= 1e4" if ok else "mismatch"

    return [
        ("meissel-identity", meissel),
        ("elias-identity", elias),
        ("beta1-exact", beta1),
        ("delta-exact", beta_inf),
        ("mu6-closed-form", mu6_rhs),
        ("smooth-bridge", bridge),
    ]


def _checks_asymptotic() -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
    def regimes() -> Tuple[bool, str]:
        kernel = Ingham()
        tol = Tolerances()
        for b in (-1.0, 0.25):
            coeffs = solve(kernel, RhsSpec("power", b), 1_000_000)
            series = partial_sums(coeffs, default_checkpoints(1_000_000))
            v = regime_check(series, b, kernel, tol)
            if v.verdict != "asymptotic_match":
                return False, "beta=%g: %s (slope %.3f)" % (b, v.verdict, v.fitted_slope)
        for b in (0.75, 1.0, 2.0):
            coeffs = solve(kernel, RhsSpec("power", b), 1_000_000)
            series = partial_sums(coeffs, default_checkpoints(1_000_000))
            v = regime_check(series, b, kernel, tol)
            if v.fitted_slope > -0.35:
                return False, "beta=%g: slope %.3f > -0.35" % (b, v.fitted_slope)
        return True, "match at beta in {-1, 0.25}; decay at {0.75, 1, 2}"

    def mellin_agree() -> Tuple[bool, str]:
        kernel = Ingham()
        for z in (-0.5, -1.0, -2.0, complex(-1, 1)):
            c = closed_transform(kernel, z).value
            l = limit_transform(kernel, z, 100_000).value
            if abs(l - c) / abs(c) >= 0.01:
                return False, "z=%s: rel err %.3g" % (z, abs(l - c) / abs(c))
        return True, "limit vs closed < 1% at n=1e5"

    def scaled() -> Tuple[bool, str]:
        v = limit_transform_wrt_f(Ingham(), FSpec("exp_plus_one", q=2), -1.0, 60).value
        if abs(v - 5.0 / 6.0) > 1e-6:
            return False, "wrt-f value %.9f != 5/6" % v.real
        for q in range(2, 11):
            for z in phi_f_zeros(q, (0.0, 2.0)):
                if abs(z.real - 0.5) > 1e-9:
                    return False, "q=%d zero off critical line" % q
        return True, "wrt-f = 5/6 at q=2; zeros on Re z = 1/2 for q in 2..10"

    def hlr() -> Tuple[bool, str]:
        coeffs = solve(Ingham(), RhsSpec("power", 1.0), 100_000, backend="exact")
        rep = hlr_report(coeffs)
        if rep.sup_abs != 1.0:
            return False, "beta=1 sup = %g != 1" % rep.sup_abs
        for b in (0.25, 0.5, 2.0):
            rep = hlr_report(solve(Ingham(), RhsSpec("power", b), 100_000))
            if rep.growth_exponent >= 0.05:
                return False, "beta=%g growth %.3g" % (b, rep.growth_exponent)
            if not (-1.05 <= rep.prime_tail_mean <= -0.95):
                return False, "beta=%g tail mean %.3f" % (b, rep.prime_tail_mean)
        return True, "sup=1 at beta=1; growth<0.05 and tail mean ~ -1 at {0.25,0.5,2}"

    def jordan() -> Tuple[bool, str]:
        table = sieve(1_000_000)
        rep = jordan_partial_check(table, 0.25, 1_000_000)
        if abs(rep.slope - 0.75) > 0.05:
            return False, "slope %.3f" % rep.slope
        if abs(rep.empirical_constant - rep.predicted_constant) > 0.05 * abs(
            rep.predicted_constant
        ):
            return False, "constant %.4f vs %.4f" % (
                rep.empirical_constant, rep.predicted_constant)
        return True, "exponent 0.75 and constant within 5%"

    def mertens() -> Tuple[bool, str]:
        table = sieve(1_000_000)
        rep = mertens_ratio_report(table, 1_000_000)
        return rep.max_ratio < 1.0, "max ratio %.4f at x=%d" % (rep.max_ratio, rep.argmax_x)

    return [
        ("regime-suite", regimes),
        ("mellin-agreement", mellin_agree),
        ("scaled-transform", scaled),
        ("hlr-suite", hlr),
        ("jordan-sums", jordan),
        ("mertens-ratio", mertens),
    ]


def _checks_full() -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
    def index() -> Tuple[bool, str]:
        # Generic kernels at N=2e4 sit deep in their transients (corrections
        # O(x^{beta-alpha}), log factors for the log kernel), so the
        # bracketing runs pin wider, pilot-calibrated tolerances; the
        # constant check is the sharp detector — 1/G*(beta) diverges and
        # flips sign across the index while the measured value stays put.
        wide = Tolerances(slope_tol_low=0.2, slope_tol_high=0.2, const_tol=0.6)
        disc_tol = Tolerances(slope_tol_low=0.1, slope_tol_high=0.1, const_tol=0.15)
        grid9 = [round(0.1 * i, 2) for i in range(1, 10)]
        for spec, grid, n, tol, lo, hi in (
            ("affine:0.5", grid9, 20_000, wide, 0.4, 0.6),
            ("log:0.5", grid9, 20_000, wide, 0.4, 0.6),
            ("disc:2", _parse_betas("0.5:1.4:0.1"), 20_000, disc_tol, 0.85, 1.15),
            ("ingham", grid9, 1_000_000, DEFAULT_TOL, 0.35, 0.65),
        ):
            est = estimate_index(parse_kernel(spec), grid, n, tol)
            if not (lo <= est.alpha_hat <= hi):
                return False, "%s alpha_hat %.3f outside [%g, %g]" % (
                    spec, est.alpha_hat, lo, hi)
        return True, "affine/log ~ 0.5, disc(2) ~ 1, ingham in [0.35, 0.65]"

    return [("index-estimation", index)]


def _cmd_verify(args: argparse.Namespace, cmdline: str) -> int:
    suites = {
        "exact": _checks_exact(),
        "asymptotic": _checks_asymptotic(),
        "full": _checks_exact() + _checks_asymptotic() + _checks_full(),
    }
    if args.suite not in suites:
        raise UsageError("unknown suite %r (exact|asymptotic|full)" % (args.suite,))
    t0 = time.monotonic()
    results = []
    failed = 0
    for name, fn in suites[args.suite]:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, "raised %s: %s" % (type(exc).__name__, exc)
        results.append((name, ok, detail))
        if not ok:
            failed += 1
        print("%s %s: %s" % ("PASS" if ok else "FAIL", name, detail))
    wall = int(1000 * (time.monotonic() - t0))
    print("suite=%s checks=%d failed=%d wall_ms=%d" % (args.suite, len(results), failed, wall))
    outputs = []
    if args.out:
        _write_csv(args.out, ("check", "status", "detail"),
                   [(n, "PASS" if ok else "FAIL", d) for n, ok, d in results])
        outputs.append(args.out)
        _write_manifest(args.out, cmdline, outputs, wall)
    if args.json:
        print(json.dumps({
            "suite": args.suite, "failed": failed, "wall_ms": wall,
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in results],
        }))
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--out", default=None, help="write CSV artifact (+ manifest sidecar)")
    sp.add_argument("--json", action="store_true", help="machine-readable stdout")
    sp.add_argument("--config", default=None, help="JSON config file (flags override it)")
    sp.add_argument("--sieve-cache", dest="sieve_cache", default=None,
                    help="path for the binary sieve cache")
    # accept values like "-1,0" or "-2:0" after value-taking options
    sp._negative_number_matcher = re.compile(r"^-\d")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="raf",
        description="Triangular-recurrence solver, Mellin transforms, regularity "
        "indices, and exact floor/Mobius counting identities.",
    )
    ap.add_argument("--version", action="version", version="raf-lab " + __version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve the triangular system a_1..a_N")
    sp.add_argument("--kernel", default=None)
    sp.add_argument("--rhs", default=None, help="power:<beta> | delta | l0pow:<beta>")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--backend", choices=("float", "exact"), default=None)
    _add_common(sp)

    sp = sub.add_parser("scan", help="regime verdicts over a beta range")
    sp.add_argument("--kernel", default=None)
    sp.add_argument("--betas", default=None, help="<lo>:<hi>:<step>")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--slope-tol", dest="slope_tol", type=float, default=None)
    sp.add_argument("--const-tol", dest="const_tol", type=float, default=None)
    _add_common(sp)

    sp = sub.add_parser("index", help="bracket the regularity index")
    sp.add_argument("--kernel", default=None)
    sp.add_argument("--grid", default=None, help="<lo>:<hi>:<step>")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--slope-tol", dest="slope_tol", type=float, default=None)
    sp.add_argument("--const-tol", dest="const_tol", type=float, default=None)
    _add_common(sp)

    sp = sub.add_parser("hlr", help="bounded-coefficient report (sup |n a_n|, prime tail)")
    sp.add_argument("--kernel", default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--n", type=int, default=None)
    _add_common(sp)

    sp = sub.add_parser("mellin", help="evaluate a transform at one point")
    sp.add_argument("--kernel", default=None)
    sp.add_argument("--z", default=None, help='"<re>,<im>"')
    sp.add_argument("--method", choices=("closed", "limit"), default=None)
    sp.add_argument("--n", type=int, default=None, help="truncation for --method limit")
    _add_common(sp)

    sp = sub.add_parser("zeros", help="critical-line zeros of the q^x+1 scaled transform")
    sp.add_argument("--q", type=int, default=None)
    sp.add_argument("--im", default=None, help="<lo>:<hi>")
    _add_common(sp)

    sp = sub.add_parser("count", help="exact floor/Mobius counting identities")
    sp.add_argument("--what", default=None,
                    help="coprime:<m>|pfree:<p>|ppow:<p>|smooth:<p,..>|elias")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")
    _add_common(sp)

    sp = sub.add_parser("jordan", help="generalized Jordan partial sums vs main term")
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--x", type=int, default=None)
    _add_common(sp)

    sp = sub.add_parser("mertens", help="max |M(x)|/sqrt(x) report")
    sp.add_argument("--x", type=int, default=None)
    _add_common(sp)

    sp = sub.add_parser("verify", help="bundled verification suites")
    sp.add_argument("--suite", default=None, choices=("exact", "asymptotic", "full"))
    _add_common(sp)

    return ap


_DEFAULTS: Dict[str, Dict[str, object]] = {
    "solve": {"kernel": "ingham", "rhs": "power:1", "n": 10_000, "backend": "float"},
    "scan": {"kernel": "ingham", "betas": "0:1:0.25", "n": 100_000},
    "index": {"kernel": "ingham", "grid": "0.1:0.9:0.1", "n": 100_000},
    "hlr": {"kernel": "ingham", "beta": 1.0, "n": 100_000},
    "mellin": {"kernel": "ingham", "z": "-1,0", "method": "closed", "n": 100_000},
    "zeros": {"q": 2, "im": "0:10"},
    "count": {"what": "coprime:1", "n": 1000},
    "jordan": {"beta": 0.25, "x": 100_000},
    "mertens": {"x": 100_000},
    "verify": {"suite": "exact"},
}

_HANDLERS = {
    "solve": _cmd_solve,
    "scan": _cmd_scan,
    "index": _cmd_index,
    "hlr": _cmd_hlr,
    "mellin": _cmd_mellin,
    "zeros": _cmd_zeros,
    "count": _cmd_count,
    "jordan": _cmd_jordan,
    "mertens": _cmd_mertens,
    "verify": _cmd_verify,
}


def _apply_config(args: argparse.Namespace) -> None:
    """flags > config file > defaults (None marks 'not given on the CLI')."""
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise UsageError("--config must contain a JSON object")
    for key, val in {**_DEFAULTS.get(args.command, {}), **cfg}.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is None:
            setattr(args, attr, val)


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    ap = build_parser()
    try:
        args = ap.parse_args(list(argv))
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    cmdline = "raf " + " ".join(str(a) for a in argv)
    try:
        _apply_config(args)
        return _HANDLERS[args.command](args, cmdline)
    except (UsageError, KernelDomainError, UnsupportedKernelError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (PoleError, RegionError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
