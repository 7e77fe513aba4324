"""Kernel catalog: every two-index function G(n,k) used by the solver.

FGV kernels are defined by a one-variable profile g on (0,1] with
G(n,k) = g(k/n); the rational kernel (n+k+x)/(n+k+y) is the one non-FGV
member of the catalog.  Scaled kernels compose an FGV profile with a
rescaling f, G(n,k) = g(f(k)/f(n)).

Floor conventions: wherever the profile contains a floor of a rational
ratio (the x*floor(1/x) profile and its generalized version), the floor is
computed by integer division of integers, never by flooring a float ratio —
floating division is off-by-one-prone exactly at divisor points, where the
counting identities need exactness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


class KernelDomainError(ValueError):
    """k outside [1, n] or invalid kernel parameters."""


class UnsupportedKernelError(TypeError):
    """Operation not defined for this kernel kind (e.g. scaling a non-FGV)."""


# --------------------------------------------------------------------------
# rescaling specs f(x)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FSpec:
    """Rescaling function: identity, x^r (0<r<=1), or q^x + 1 (integer q>=2).

    f is positive and strictly increasing on [1, inf); f(0) is defined by
    the formula (0 for power, 2 for exp_plus_one).
    """

    kind: str  # "identity" | "power" | "exp_plus_one"
    r: float = 1.0
    q: int = 2

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "power", "exp_plus_one"):
            raise KernelDomainError("unknown FSpec kind %r" % (self.kind,))
        if self.kind == "power" and not (0.0 < self.r <= 1.0):
            raise KernelDomainError("power FSpec needs 0 < r <= 1, got %r" % (self.r,))
        if self.kind == "exp_plus_one":
            if int(self.q) != self.q or self.q < 2:
                raise KernelDomainError(
                    "exp_plus_one FSpec needs integer q >= 2, got %r" % (self.q,)
                )

    def value(self, x: int):
        """f(x); exact int for identity/exp_plus_one, float for power."""
        if self.kind == "identity":
            return x
        if self.kind == "power":
            return float(x) ** self.r
        return self.q ** x + 1  # exact Python int

    def log_value(self, x: int) -> float:
        """log f(x), overflow-free (exp_plus_one uses x*log q + log1p(q^-x))."""
        if self.kind == "identity":
            return math.log(x)
        if self.kind == "power":
            return self.r * math.log(x)
        if x == 0:
            return math.log(2.0)
        return x * math.log(self.q) + math.log1p(self.q ** (-float(x)) if x < 1020 else 0.0)

    @property
    def label(self) -> str:
        if self.kind == "identity":
            return "id"
        if self.kind == "power":
            return "pow:%g" % self.r
        return "exp:%d" % self.q


IDENTITY = FSpec("identity")


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------


class Kernel:
    """Base class; concrete kernels are immutable value objects."""

    name = "kernel"
    is_fgv = False
    unproven_index = False

    def eval(self, n: int, k: int) -> float:
        raise NotImplementedError

    def eval_row(self, n: int, ks: np.ndarray) -> np.ndarray:
        """Vectorized G(n, k) over an int array of k values in [1, n]."""
        return np.array([self.eval(n, int(k)) for k in ks], dtype=np.float64)

    def profile(self, t: float) -> float:
        """g(t) for FGV kernels, 0 < t <= 1."""
        raise UnsupportedKernelError("%s has no one-variable profile" % self.name)

    def _check(self, n: int, k: int) -> None:
        if k < 1 or k > n:
            raise KernelDomainError("need 1 <= k <= n, got n=%d k=%d" % (n, k))

    @property
    def spec(self) -> str:
        """Round-trippable CLI spec string."""
        return self.name


@dataclass(frozen=True)
class Ingham(Kernel):
    """G(n,k) = (k/n) * floor(n/k), the x*floor(1/x) profile on rationals."""

    name = "ingham"
    is_fgv = True

    def eval(self, n: int, k: int) -> float:
        self._check(n, k)
        return (k * (n // k)) / n

    def eval_exact(self, n: int, k: int) -> Fraction:
        self._check(n, k)
        return Fraction(k * (n // k), n)

    def eval_row(self, n: int, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        return (ks * (n // ks)) / float(n)

    def profile(self, t: float) -> float:
        if t == 1.0:
            return 1.0
        if t < 1e-300:  # floor(1/t) overflows float; value is within t of 1
            return 1.0
        return t * math.floor(1.0 / t)


@dataclass(frozen=True)
class Affine(Kernel):
    """g(t) = (1-lam)*t + lam with 0 < lam < 1."""

    lam: float
    name = "affine"
    is_fgv = True

    def __post_init__(self) -> None:
        if not (0.0 < self.lam < 1.0):
            raise KernelDomainError("affine needs 0 < lam < 1, got %r" % (self.lam,))

    def eval(self, n: int, k: int) -> float:
        self._check(n, k)
        return (1.0 - self.lam) * (k / n) + self.lam

    def eval_row(self, n: int, ks: np.ndarray) -> np.ndarray:
        return (1.0 - self.lam) * (np.asarray(ks, dtype=np.float64) / n) + self.lam

    def profile(self, t: float) -> float:
        return (1.0 - self.lam) * t + self.lam

    @property
    def spec(self) -> str:
        return "affine:%g" % self.lam


@dataclass(frozen=True)
class LogKernel(Kernel):
    """g(t) = 1 - lam*ln(t) with 0 < lam <= 1 (unbounded as t -> 0+)."""

    lam: float
    name = "log"
    is_fgv = True

    def __post_init__(self) -> None:
        if not (0.0 < self.lam <= 1.0):
            raise KernelDomainError("log kernel needs 0 < lam <= 1, got %r" % (self.lam,))

    def eval(self, n: int, k: int) -> float:
        self._check(n, k)
        return 1.0 - self.lam * math.log(k / n)

    def eval_row(self, n: int, ks: np.ndarray) -> np.ndarray:
        return 1.0 - self.lam * np.log(np.asarray(ks, dtype=np.float64) / n)

    def profile(self, t: float) -> float:
        return 1.0 - self.lam * math.log(t)

    @property
    def spec(self) -> str:
        return "log:%g" % self.lam


# Snap tolerance for floor(-ln t / ln lam): float logs jitter by ~1e-16
# relative, so a computed exponent within 1e-9 of an integer can only happen
# at a true power boundary (for integer lam and denominators <= 1e7 the
# nearest non-equal rational is >= 1e-7 away in log scale).
_DISC_SNAP = 1e-9


@dataclass(frozen=True)
class Disc(Kernel):
    """g(t) = t * lam^floor(-ln t / ln lam), lam > 1 (geometric staircase).

    Integer lam >= 2 is the proven-index case; non-integer lam is accepted
    but carries unproven_index = True.
    """

    lam: float
    name = "disc"
    is_fgv = True

    def __post_init__(self) -> None:
        if not (self.lam > 1.0):
            raise KernelDomainError("disc needs lam > 1, got %r" % (self.lam,))

    @property
    def unproven_index(self) -> bool:  # type: ignore[override]
        return float(self.lam) != float(int(self.lam))

    def _steps(self, t: float) -> int:
        return int(math.floor(-math.log(t) / math.log(self.lam) + _DISC_SNAP))

    def eval(self, n: int, k: int) -> float:
        self._check(n, k)
        return self.profile(k / n)

    def eval_row(self, n: int, ks: np.ndarray) -> np.ndarray:
        t = np.asarray(ks, dtype=np.float64) / n
        j = np.floor(-np.log(t) / math.log(self.lam) + _DISC_SNAP)
        return t * np.power(self.lam, j)

    def profile(self, t: float) -> float:
        return t * self.lam ** self._steps(t)

    @property
    def spec(self) -> str:
        return "disc:%g" % self.lam


@dataclass(frozen=True)
class RationalRaf(Kernel):
    """G(n,k) = (n+k+x)/(n+k+y) — a RAF that is not an FGV (depends on n+k)."""

    x: float
    y: float
    name = "ratraf"
    is_fgv = False

    def __post_init__(self) -> None:
        if self.x == self.y:
            raise KernelDomainError("rational kernel needs x != y")
        if not (self.x > 0.0 and self.y > 0.0):
            raise KernelDomainError("rational kernel needs x > 0 and y > 0")

    def eval(self, n: int, k: int) -> float:
        self._check(n, k)
        return (n + k + self.x) / (n + k + self.y)

    def eval_row(self, n: int, ks: np.ndarray) -> np.ndarray:
        s = n + np.asarray(ks, dtype=np.float64)
        return (s + self.x) / (s + self.y)

    @property
    def spec(self) -> str:
        return "ratraf:%g,%g" % (self.x, self.y)


@dataclass(frozen=True)
class GeneralizedIngham(Kernel):
    """G(n,k) = sum_{1<=j<=n/k} (u_j/j) * Phi(j*k/n), weights periodic.

    u_j cycles through the supplied weight table (period = len(weights)),
    e.g. a Dirichlet-character sign pattern.  Equivalent profile:
    Phi_u(x) = x * sum_{j<=1/x} u_j * floor(1/(j x)), so this is an FGV.
    """

    weights: tuple
    name = "genin"
    is_fgv = True

    def __post_init__(self) -> None:
        if len(self.weights) == 0:
            raise KernelDomainError("generalized kernel needs >= 1 weight")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    def eval(self, n: int, k: int) -> float:
        self._check(n, k)
        w = self.weights
        period = len(w)
        total = 0.0
        for j in range(1, n // k + 1):
            uj = w[(j - 1) % period]
            if uj != 0.0:
                total += uj * (n // (j * k))
        return total * k / n

    def eval_row(self, n: int, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        if len(ks) == 0:
            return np.zeros(0, dtype=np.float64)
        if len(ks) > 1 and not np.all(np.diff(ks) > 0):
            return super().eval_row(n, ks)  # rare: unsorted query
        w = self.weights
        period = len(w)
        total = np.zeros(len(ks), dtype=np.float64)
        jmax = int(n // ks[0])
        for j in range(1, jmax + 1):
            uj = w[(j - 1) % period]
            if uj == 0.0:
                continue
            # ks ascending: k <= n//j is a prefix
            hi = int(np.searchsorted(ks, n // j, side="right"))
            if hi == 0:
                break
            total[:hi] += uj * (n // (j * ks[:hi]))
        return total * ks / float(n)

    def profile(self, t: float) -> float:
        w = self.weights
        period = len(w)
        total = 0.0
        for j in range(1, int(math.floor(1.0 / t + 1e-12)) + 1):
            uj = w[(j - 1) % period]
            if uj != 0.0:
                total += uj * math.floor(1.0 / (j * t) + 1e-12)
        return total * t

    @property
    def spec(self) -> str:
        return "genin:" + ",".join("%g" % w for w in self.weights)


@dataclass(frozen=True)
class Scaled(Kernel):
    """G(n,k) = g(f(k)/f(n)) for an FGV base profile g and rescaling f."""

    base: Kernel
    f: FSpec
    name = "scaled"
    is_fgv = True

    def __post_init__(self) -> None:
        if not self.base.is_fgv:
            raise UnsupportedKernelError(
                "cannot rescale %s: only FGV kernels have a profile" % self.base.name
            )

    def eval(self, n: int, k: int) -> float:
        self._check(n, k)
        if self.f.kind == "identity":
            return self.base.eval(n, k)
        if self.f.kind == "exp_plus_one" and isinstance(self.base, Ingham):
            # exact: t = (q^k+1)/(q^n+1), floor(1/t) by integer division
            fk = self.f.value(k)
            fn = self.f.value(n)
            m = fn // fk
            return float(Fraction(m * fk, fn))
        lt = self.f.log_value(k) - self.f.log_value(n)
        return self.base.profile(math.exp(lt))

    def profile(self, t: float) -> float:
        # the profile of the *scaled* kernel is g composed with the f-ratio
        # structure; only the base profile is well-defined pointwise
        return self.base.profile(t)

    @property
    def spec(self) -> str:
        return "scaled:%s:%s" % (self.base.spec, self.f.label)


# --------------------------------------------------------------------------
# spec-string grammar (shared by the CLI)
# --------------------------------------------------------------------------

_GRAMMAR = (
    'kernel spec grammar: "ingham" | "affine:<lam>" | "log:<lam>" | '
    '"disc:<lam>" | "ratraf:<x>,<y>" | "genin:<w1>,<w2>,..." | '
    '"scaled:ingham:exp:<q>" | "scaled:ingham:pow:<r>" | "scaled:ingham:id"'
)


def parse_kernel(spec: str) -> Kernel:
    """Parse a kernel spec string (see _GRAMMAR); raises KernelDomainError."""
    parts = spec.strip().split(":")
    head = parts[0]
    try:
        if head == "ingham" and len(parts) == 1:
            return Ingham()
        if head == "affine" and len(parts) == 2:
            return Affine(float(parts[1]))
        if head == "log" and len(parts) == 2:
            return LogKernel(float(parts[1]))
        if head == "disc" and len(parts) == 2:
            return Disc(float(parts[1]))
        if head == "ratraf" and len(parts) == 2:
            x, y = parts[1].split(",")
            return RationalRaf(float(x), float(y))
        if head == "genin" and len(parts) == 2:
            return GeneralizedIngham(tuple(float(w) for w in parts[1].split(",")))
        if head == "scaled" and len(parts) >= 3:
            base = parse_kernel(parts[1])
            tag = parts[2]
            if tag == "id" and len(parts) == 3:
                return Scaled(base, IDENTITY)
            if tag == "exp" and len(parts) == 4:
                return Scaled(base, FSpec("exp_plus_one", q=int(parts[3])))
            if tag == "pow" and len(parts) == 4:
                return Scaled(base, FSpec("power", r=float(parts[3])))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, (KernelDomainError, UnsupportedKernelError)):
            raise
        raise KernelDomainError("bad kernel spec %r — %s" % (spec, _GRAMMAR)) from exc
    raise KernelDomainError("bad kernel spec %r — %s" % (spec, _GRAMMAR))
