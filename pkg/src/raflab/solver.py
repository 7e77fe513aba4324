"""Triangular-recurrence solver for sum_{k<=n} a_k G(n,k) = R(n), a_1 = 1.

Right-hand sides: R(n) = n^-beta ("power"), the delta sequence (1,0,0,...)
— the beta = infinity limit — and n^-beta * L0(n) for a slowly varying
integer-valued L0 ("l0pow", default L0 = 3-smooth counting function).

Backends:
  * float  — double precision; O(N log N) fast path for the x*floor(1/x)
             kernel, generic O(N^2) forward substitution otherwise.
  * exact  — Fraction arithmetic; x*floor(1/x) kernel only, with an RHS
             whose values are rational (delta, integer beta).

Fast-path algebra (convention-free, used by both backends): multiply the
defining relation by n, write b_k = k*a_k, and note floor(n/k) counts
multiples of k up to n, so

    sum_{k<=n} b_k floor(n/k) = sum_{m<=n} sum_{d|m} b_d = n R(n).

The inner divisor sums are therefore s(m) := m R(m) - (m-1) R(m-1), and the
triangular system collapses to b_m = s(m) - sum_{d|m, d<m} b_d, solved in
O(N log N) by one sieve-like pass (for d ascending: b[2d::d] -= b[d]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .kernels import Ingham, Kernel
from .sieve import MobiusTable

DEFAULT_GENERIC_CAP = 20_000


class SingularKernelError(ZeroDivisionError):
    """G(n,n) = 0 at some n: the triangular system is unsolvable."""

    def __init__(self, n: int):
        super().__init__("kernel is singular: G(n,n) = 0 at n = %d" % n)
        self.n = n


class BackendMismatchError(TypeError):
    """Exact backend requested for a kernel/RHS pair that is not rational."""


@dataclass(frozen=True)
class RhsSpec:
    """Right-hand side description.

    kind: "power" (R(n) = n^-beta), "delta" (R = 1,0,0,...; beta = inf),
    or "l0pow" (R(n) = n^-beta * L0(n)).  For l0pow, l0_values may carry a
    custom non-decreasing integer sequence indexed 0..N; None means the
    3-smooth counting function, filled in at solve time.
    """

    kind: str
    beta: float = 0.0
    l0_values: Optional[tuple] = None

    def __post_init__(self) -> None:
        if self.kind not in ("power", "delta", "l0pow"):
            raise ValueError("unknown rhs kind %r" % (self.kind,))
        if self.kind == "delta":
            object.__setattr__(self, "beta", math.inf)
        elif not math.isfinite(self.beta):
            raise ValueError("power/l0pow rhs needs finite beta")

    @property
    def beta_is_integer(self) -> bool:
        return math.isfinite(self.beta) and float(self.beta) == int(self.beta)

    @property
    def exactable(self) -> bool:
        """True when every R(n) is rational: delta, or integer beta >= 0."""
        if self.kind == "delta":
            return True
        return self.beta_is_integer and self.beta >= 0

    @property
    def label(self) -> str:
        if self.kind == "delta":
            return "delta"
        if self.kind == "power":
            return "power:%g" % self.beta
        return "l0pow:%g" % self.beta

    def values_float(self, limit: int, l0: Optional[np.ndarray] = None) -> np.ndarray:
        """R(n) for n = 0..limit as float64 (index 0 is zero-filled)."""
        n = np.arange(limit + 1, dtype=np.float64)
        if self.kind == "delta":
            r = np.zeros(limit + 1)
            r[1] = 1.0
            return r
        with np.errstate(divide="ignore"):
            r = n ** (-self.beta)
        r[0] = 0.0
        if self.kind == "l0pow":
            if l0 is None:
                l0 = l0_three_smooth(limit)
            r *= l0[: limit + 1]
        return r

    def value_exact(self, n: int, l0: Optional[np.ndarray] = None) -> Fraction:
        if self.kind == "delta":
            return Fraction(1 if n == 1 else 0)
        b = int(self.beta)
        base = Fraction(1, n**b) if b >= 0 else Fraction(n ** (-b))
        if self.kind == "l0pow":
            assert l0 is not None
            base *= int(l0[n])
        return base


def parse_rhs(spec: str) -> RhsSpec:
    """Parse "power:<beta>" | "delta" | "l0pow:<beta>"."""
    s = spec.strip()
    if s == "delta":
        return RhsSpec("delta")
    for head in ("power", "l0pow"):
        if s.startswith(head + ":"):
            try:
                return RhsSpec(head, float(s[len(head) + 1 :]))
            except ValueError as exc:
                raise ValueError("bad rhs spec %r" % (spec,)) from exc
    raise ValueError('bad rhs spec %r — use "power:<beta>", "delta" or "l0pow:<beta>"' % (spec,))


@dataclass(frozen=True)
class Coefficients:
    """Solved coefficient sequence a_1..a_N for a (kernel, rhs) pair.

    values: length N+1; index 0 unused.  Exact backend stores Fractions,
    float backend a float64 array.  n_a_n gives the n*a_n sequence, the
    natural object for the bounded-coefficient (HLR) statements.
    """

    kernel: Kernel
    rhs: RhsSpec
    limit: int
    backend: str
    values: Union[np.ndarray, list]

    def a(self, n: int):
        if not (1 <= n <= self.limit):
            raise IndexError("n=%d outside [1, %d]" % (n, self.limit))
        return self.values[n]

    def n_a_n(self) -> Union[np.ndarray, list]:
        """n * a_n, same container type as values (index 0 unused)."""
        if self.backend == "exact":
            return [Fraction(0)] + [n * self.values[n] for n in range(1, self.limit + 1)]
        return np.arange(self.limit + 1, dtype=np.float64) * self.values

    def values_float(self) -> np.ndarray:
        if self.backend == "exact":
            out = np.zeros(self.limit + 1)
            for n in range(1, self.limit + 1):
                out[n] = float(self.values[n])
            return out
        return self.values


@dataclass(frozen=True)
class PartialSumSeries:
    """Checkpointed A(x) = sum_{n<=x} a_n and A1(x) = sum_{n<=x} n a_n."""

    checkpoints: np.ndarray
    A: np.ndarray
    A1: np.ndarray
    provenance: str = ""

    def __post_init__(self) -> None:
        if len(self.checkpoints) == 0:
            raise ValueError("empty checkpoint list")
        if len(self.A) != len(self.checkpoints) or len(self.A1) != len(self.checkpoints):
            raise ValueError("checkpoint/value length mismatch")
        if np.any(np.diff(self.checkpoints) <= 0):
            raise ValueError("checkpoints must be strictly increasing")


# --------------------------------------------------------------------------
# solve
# --------------------------------------------------------------------------


def solve(
    kernel: Kernel,
    rhs: RhsSpec,
    limit: int,
    backend: str = "float",
    generic_cap: int = DEFAULT_GENERIC_CAP,
    force_generic: bool = False,
) -> Coefficients:
    """Solve the triangular system for a_1..a_limit.

    The x*floor(1/x) kernel takes the O(N log N) divisor fast path unless
    force_generic is set; everything else runs generic forward substitution
    a_n = (R(n) - sum_{k<n} a_k G(n,k)) / G(n,n), which is O(N^2) and
    refused above generic_cap.

    Raises:
        SingularKernelError: G(n,n) = 0 for some n.
        BackendMismatchError: exact backend with a non-ingham kernel or an
            RHS whose values are not rational (delta / integer beta >= 0
            are rational; fractional beta is not).
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    is_ingham = isinstance(kernel, Ingham)

    if backend == "exact":
        if not is_ingham:
            raise BackendMismatchError(
                "exact backend supports only the ingham kernel, got %s" % kernel.name
            )
        if not rhs.exactable:
            raise BackendMismatchError(
                "exact backend needs rational RHS values (delta or integer beta >= 0), "
                "got %s" % rhs.label
            )
        values = _solve_ingham_exact(rhs, limit)
    elif backend == "float":
        if is_ingham and not force_generic:
            values = _solve_ingham_float(rhs, limit)
        else:
            if limit > generic_cap:
                raise ValueError(
                    "generic O(N^2) solve capped at N=%d (asked %d); raise generic_cap "
                    "to override" % (generic_cap, limit)
                )
            values = _solve_generic_float(kernel, rhs, limit)
    else:
        raise ValueError("backend must be 'exact' or 'float', got %r" % (backend,))

    coeffs = Coefficients(kernel=kernel, rhs=rhs, limit=limit, backend=backend, values=values)
    _spot_check(coeffs)
    return coeffs


def _rhs_l0(rhs: RhsSpec, limit: int) -> Optional[np.ndarray]:
    if rhs.kind != "l0pow":
        return None
    if rhs.l0_values is not None:
        l0 = np.asarray(rhs.l0_values, dtype=np.int64)
        if len(l0) < limit + 1:
            raise ValueError("l0_values shorter than limit+1")
        d = np.diff(l0[1:])
        if np.any(d < 0):
            raise ValueError("L0 must be non-decreasing")
        return l0
    return l0_three_smooth(limit)


def _solve_ingham_float(rhs: RhsSpec, limit: int) -> np.ndarray:
    l0 = _rhs_l0(rhs, limit)
    r = rhs.values_float(limit, l0)
    n = np.arange(limit + 1, dtype=np.float64)
    s = np.empty(limit + 1, dtype=np.float64)
    s[0] = 0.0
    s[1:] = n[1:] * r[1:] - n[:-1] * r[:-1]
    b = s  # b_m = s(m) - sum_{d|m, d<m} b_d, resolved in place
    for d in range(1, limit // 2 + 1):
        bd = b[d]
        if bd != 0.0:
            b[2 * d :: d] -= bd
    a = np.zeros(limit + 1, dtype=np.float64)
    a[1:] = b[1:] / n[1:]
    return a


def _solve_ingham_exact(rhs: RhsSpec, limit: int) -> list:
    l0 = _rhs_l0(rhs, limit)
    # s(m) = m R(m) - (m-1) R(m-1); integers for delta / beta in {0,1},
    # Fractions otherwise.  Stay in ints when possible — much faster.
    s: list = [0] * (limit + 1)
    if rhs.kind == "delta":
        s[1] = 1
        if limit >= 2:
            s[2] = -1
    elif rhs.kind in ("power", "l0pow"):
        beta = int(rhs.beta)
        for m in range(1, limit + 1):
            if beta == 0:
                hi: Union[int, Fraction] = m
                lo: Union[int, Fraction] = m - 1
            elif beta == 1:
                hi, lo = 1, (0 if m == 1 else 1)
            else:
                hi = Fraction(1, m ** (beta - 1))
                lo = 0 if m == 1 else Fraction(1, (m - 1) ** (beta - 1))
            if rhs.kind == "l0pow":
                assert l0 is not None
                hi *= int(l0[m])
                lo *= int(l0[m - 1]) if m >= 2 else 0
            s[m] = hi - lo
    b = s
    for d in range(1, limit // 2 + 1):
        bd = b[d]
        if bd:
            for m in range(2 * d, limit + 1, d):
                b[m] -= bd
    values: list = [Fraction(0)] * (limit + 1)
    for m in range(1, limit + 1):
        values[m] = Fraction(b[m], m) if isinstance(b[m], int) else b[m] / m
    return values


def _solve_generic_float(kernel: Kernel, rhs: RhsSpec, limit: int) -> np.ndarray:
    l0 = _rhs_l0(rhs, limit)
    r = rhs.values_float(limit, l0)
    a = np.zeros(limit + 1, dtype=np.float64)
    ks = np.arange(1, limit + 1, dtype=np.int64)
    g11 = kernel.eval(1, 1)
    if g11 == 0.0:
        raise SingularKernelError(1)
    a[1] = r[1] / g11
    for n in range(2, limit + 1):
        row = kernel.eval_row(n, ks[:n])
        gnn = row[n - 1]
        if gnn == 0.0:
            raise SingularKernelError(n)
        # numpy dot is pairwise/BLAS-accumulated: error ~ eps*log2(n),
        # well inside the 1e-9*n residual budget
        acc = float(np.dot(a[1:n], row[: n - 1]))
        a[n] = (r[n] - acc) / gnn
    return a


def _spot_check(coeffs: Coefficients) -> None:
    """Cheap post-solve assertions: a_1, and the residual at n = limit."""
    g11 = coeffs.kernel.eval(1, 1)
    if coeffs.backend == "exact":
        assert coeffs.values[1] == 1, "a_1 != 1 on exact backend"
    elif g11 == 1.0:
        assert abs(coeffs.values[1] - 1.0) < 1e-12, "a_1 != 1"
    res = residual(coeffs, coeffs.limit)
    if coeffs.backend == "exact":
        assert res == 0, "nonzero exact residual at n=%d" % coeffs.limit
    else:
        l0 = _rhs_l0(coeffs.rhs, coeffs.limit)
        rn = coeffs.rhs.values_float(coeffs.limit, l0)[coeffs.limit]
        tol = 1e-9 * max(1.0, abs(rn)) * coeffs.limit
        assert abs(res) <= tol, "residual %g at n=%d exceeds %g" % (res, coeffs.limit, tol)


def residual(coeffs: Coefficients, n: int):
    """sum_{k<=n} a_k G(n,k) - R(n), by direct kernel evaluation.

    Exact backend returns an exact Fraction (ingham only); float backend
    uses compensated (fsum) accumulation so the report is trustworthy.
    """
    if not (1 <= n <= coeffs.limit):
        raise IndexError("n outside solved range")
    l0 = _rhs_l0(coeffs.rhs, coeffs.limit)
    if coeffs.backend == "exact":
        acc = Fraction(0)
        for k in range(1, n + 1):
            # a_k * (k*floor(n/k))/n, all exact
            acc += coeffs.values[k] * Fraction(k * (n // k), n)
        return acc - coeffs.rhs.value_exact(n, l0)
    row = coeffs.kernel.eval_row(n, np.arange(1, n + 1, dtype=np.int64))
    acc_f = math.fsum((row * coeffs.values[1 : n + 1]).tolist())
    rn = coeffs.rhs.values_float(coeffs.limit, l0)[n]
    return acc_f - rn


def verify_residuals(coeffs: Coefficients, ns: Optional[Sequence[int]] = None) -> float:
    """Check the residual invariant on a set of n; returns the worst |residual|
    relative to its tolerance (<= 1 means pass; exact backend returns 0.0).

    Default sample: all n <= 64, then a geometric sweep up to the limit.
    """
    if ns is None:
        ns = sorted(
            set(range(1, min(coeffs.limit, 64) + 1))
            | {min(coeffs.limit, int(round(64 * 1.5**j))) for j in range(64)}
        )
        ns = [n for n in ns if n <= coeffs.limit]
    worst = 0.0
    l0 = _rhs_l0(coeffs.rhs, coeffs.limit)
    rfl = coeffs.rhs.values_float(coeffs.limit, l0)
    for n in ns:
        res = residual(coeffs, n)
        if coeffs.backend == "exact":
            if res != 0:
                return math.inf
            continue
        tol = 1e-9 * max(1.0, abs(rfl[n])) * n
        worst = max(worst, abs(res) / tol)
    return worst


# --------------------------------------------------------------------------
# closed forms for the x*floor(1/x) kernel
# --------------------------------------------------------------------------


def ingham_coeff_closed(
    table: MobiusTable, beta: float, limit: int, exact: bool = False
) -> Union[np.ndarray, list]:
    """All n*a_n for R(n) = n^-beta in O(N log N), via Mobius inversion.

    n*a_n = sum_{d|n} mu(n/d) t(d) with t(1) = 1 and, for d >= 2,
    t(d) = d^(1-beta) - (d-1)^(1-beta).  (The d=1 summand is mu(n)*1 for
    every beta: x^0 := 1 for x > 0 and 0^(1-beta) := 0, which reproduces
    both the beta=1 row n*a_n = mu(n) and the beta=0 row [n=1].)

    Computed by accumulating, for each squarefree j, mu(j)*t(m) into index
    j*m — one sieve-style pass over multiples.  exact=True (integer beta
    only) returns Fractions; default returns float64.
    """
    if limit > table.limit:
        raise ValueError("limit %d exceeds table limit %d" % (limit, table.limit))
    if not math.isfinite(beta):
        raise ValueError("beta must be finite (use delta_coeff_closed for the limit case)")
    mu = table.mu
    if exact:
        if float(beta) != int(beta):
            raise BackendMismatchError("exact closed form needs integer beta")
        bi = int(beta)
        t: list = [0] * (limit + 1)
        t[1] = 1
        for d in range(2, limit + 1):
            if bi == 0:
                t[d] = 1
            elif bi == 1:
                t[d] = 0
            else:
                t[d] = Fraction(1, d ** (bi - 1)) - Fraction(1, (d - 1) ** (bi - 1))
        out: list = [Fraction(0)] * (limit + 1)
        for j in range(1, limit + 1):
            m = int(mu[j])
            if m == 0:
                continue
            for mult in range(1, limit // j + 1):
                tv = t[mult]
                if tv:
                    out[j * mult] += m * tv
        return [v if isinstance(v, Fraction) else Fraction(v) for v in out]

    d = np.arange(limit + 1, dtype=np.float64)
    t_arr = np.zeros(limit + 1, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_arr[2:] = d[2:] ** (1.0 - beta) - d[1:-1] ** (1.0 - beta)
    t_arr[1] = 1.0
    out_arr = np.zeros(limit + 1, dtype=np.float64)
    for j in range(1, limit + 1):
        m = int(mu[j])
        if m == 0:
            continue
        ln = limit // j
        if m == 1:
            out_arr[j :: j][: ln] += t_arr[1 : ln + 1]
        else:
            out_arr[j :: j][: ln] -= t_arr[1 : ln + 1]
    return out_arr


def delta_coeff_closed(table: MobiusTable, limit: int) -> np.ndarray:
    """n*a_n for the delta RHS: mu(n) - [n even] mu(n/2), int64."""
    if limit > table.limit:
        raise ValueError("limit %d exceeds table limit %d" % (limit, table.limit))
    mu = table.mu
    out = mu[: limit + 1].astype(np.int64)
    evens = np.arange(2, limit + 1, 2)
    out[evens] -= mu[evens // 2]
    out[0] = 0
    return out


# --------------------------------------------------------------------------
# partial sums and the slowly varying RHS
# --------------------------------------------------------------------------


def partial_sums(coeffs: Coefficients, checkpoints: Sequence[int]) -> PartialSumSeries:
    """A(x) and A1(x) at the given ascending checkpoints (one cumulative pass)."""
    if len(checkpoints) == 0:
        raise ValueError("empty checkpoint list")
    cps = np.asarray(list(checkpoints), dtype=np.int64)
    if cps[0] < 1 or cps[-1] > coeffs.limit:
        raise ValueError("checkpoints outside [1, limit]")
    a = coeffs.values_float()
    ca = np.cumsum(a)
    cb = np.cumsum(np.arange(coeffs.limit + 1, dtype=np.float64) * a)
    return PartialSumSeries(
        checkpoints=cps,
        A=ca[cps],
        A1=cb[cps],
        provenance="%s|%s" % (coeffs.kernel.spec, coeffs.rhs.label),
    )


def partial_sums_exact(coeffs: Coefficients, checkpoints: Sequence[int]):
    """Exact (A, A1) Fraction lists at checkpoints; exact backend only."""
    if coeffs.backend != "exact":
        raise BackendMismatchError("exact partial sums need the exact backend")
    if len(checkpoints) == 0:
        raise ValueError("empty checkpoint list")
    cps = list(checkpoints)
    acc_a = Fraction(0)
    acc_b = Fraction(0)
    out_a, out_b = [], []
    idx = 0
    for n in range(1, coeffs.limit + 1):
        acc_a += coeffs.values[n]
        acc_b += n * coeffs.values[n]
        while idx < len(cps) and cps[idx] == n:
            out_a.append(acc_a)
            out_b.append(acc_b)
            idx += 1
    if idx != len(cps):
        raise ValueError("checkpoints outside [1, limit] or not ascending")
    return out_a, out_b


def l0_three_smooth(limit: int) -> np.ndarray:
    """L0(n) = #{m <= n : m = 2^a 3^b}, n = 0..limit (L0[0] = 0), int64."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    hits = np.zeros(limit + 1, dtype=np.int64)
    p2 = 1
    while p2 <= limit:
        v = p2
        while v <= limit:
            hits[v] = 1
            v *= 3
        p2 *= 2
    return np.cumsum(hits)
