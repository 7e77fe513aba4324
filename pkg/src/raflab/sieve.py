"""Sieved arithmetic tables: Mobius, Mertens, smallest prime factor, totient.

Provides:
- sieve(limit)         -> MobiusTable (mu, Mertens prefix sums, spf)
- divisors(n, table)   -> ascending divisor list via the spf factorization
- totient_table(limit) -> Euler phi for all n <= limit
- save_cache / load_cache -> binary mu cache ("RAFSIEVE1" format)

The table is immutable after construction and safe to share read-only
across workers; sieving itself is single-threaded.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

# Refuse sieve requests whose arrays would not plausibly fit in memory
# (three arrays of limit+1 entries; 2e8 is ~3.4 GB total).
MAX_SIEVE_LIMIT = 200_000_000

_CACHE_MAGIC = b"RAFSIEVE1"


class CapacityError(ValueError):
    """Sieve limit is zero or exceeds the configured memory budget."""


@dataclass(frozen=True)
class MobiusTable:
    """Precomputed arithmetic arrays up to ``limit``.

    Attributes:
        limit: Maximum index N.
        mu: int8 array of length N+1, mu[n] in {-1, 0, +1}, mu[0] = 0.
        mertens: int64 array of length N+1, mertens[x] = sum_{n<=x} mu[n].
        spf: int64 array of length N+1, smallest prime factor (spf[1] = 1).
    """

    limit: int
    mu: np.ndarray
    mertens: np.ndarray
    spf: np.ndarray


def _small_primes(limit: int, spf: np.ndarray) -> np.ndarray:
    """Primes p <= sqrt(limit), read off a partially built spf array."""
    root = int(np.sqrt(limit))
    while (root + 1) * (root + 1) <= limit:
        root += 1
    while root * root > limit:
        root -= 1
    idx = np.arange(2, root + 1)
    return idx[spf[2 : root + 1] == idx]


def sieve(limit: int) -> MobiusTable:
    """Build the full MobiusTable for 1..limit.

    Vectorized sieving: smallest prime factors are assigned by masked slice
    writes over primes p <= sqrt(limit); mu comes from a signed product
    array (multiply val[p::p] by -p, zero out val[p^2::p^2], then compare
    |val[n]| against n to detect one leftover prime factor > sqrt(limit)).

    Args:
        limit: Upper bound N >= 1.

    Returns:
        MobiusTable with mu, mertens, spf populated.

    Raises:
        CapacityError: limit < 1 or limit > MAX_SIEVE_LIMIT.
    """
    if limit < 1:
        raise CapacityError("sieve limit must be >= 1, got %r" % (limit,))
    if limit > MAX_SIEVE_LIMIT:
        raise CapacityError(
            "sieve limit %d exceeds memory budget (max %d)" % (limit, MAX_SIEVE_LIMIT)
        )

    n = limit
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        spf[1] = 1

    # Mark composites: when p is processed, every m in [p^2, N] step p with
    # spf[m] still unset has smallest prime factor exactly p.
    p = 2
    while p * p <= n:
        if spf[p] == 0:
            spf[p] = p
            sl = spf[p * p :: p]
            sl[sl == 0] = p
        p += 1
    # Everything still unset at index >= 2 is a prime > sqrt(N).
    rest = np.nonzero(spf[2:] == 0)[0] + 2
    spf[rest] = rest

    # mu via the signed product trick.
    val = np.ones(n + 1, dtype=np.int64)
    for p in _small_primes(n, spf):
        val[p::p] *= -p
        sq = int(p) * int(p)
        val[sq::sq] = 0
    mu = np.zeros(n + 1, dtype=np.int8)
    idx = np.arange(n + 1, dtype=np.int64)
    nonzero = val != 0
    sign = np.sign(val).astype(np.int8)
    # |val[n]| == n  -> all prime factors were <= sqrt(N): mu = sign
    # |val[n]| <  n  -> exactly one extra prime factor > sqrt(N): mu = -sign
    complete = np.abs(val) == idx
    mu[nonzero & complete] = sign[nonzero & complete]
    mu[nonzero & ~complete] = -sign[nonzero & ~complete]
    mu[0] = 0
    if n >= 1:
        mu[1] = 1

    mertens = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(mu[1:], dtype=np.int64, out=mertens[1:])

    return MobiusTable(limit=n, mu=mu, mertens=mertens, spf=spf)


def factorize(n: int, table: MobiusTable) -> list[tuple[int, int]]:
    """(prime, exponent) pairs of n in ascending prime order, via spf."""
    if n < 1 or n > table.limit:
        raise ValueError("n=%d out of table range [1, %d]" % (n, table.limit))
    out: list[tuple[int, int]] = []
    spf = table.spf
    m = n
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        out.append((p, e))
    return out


def divisors(n: int, table: MobiusTable) -> list[int]:
    """Ascending list of all divisors of n, from the spf factorization."""
    if n < 1 or n > table.limit:
        raise ValueError("n=%d out of table range [1, %d]" % (n, table.limit))
    divs = [1]
    for p, e in factorize(n, table):
        pk = 1
        ext = []
        for _ in range(e):
            pk *= p
            ext.extend(d * pk for d in divs)
        divs.extend(ext)
    divs.sort()
    return divs


def totient_table(limit: int) -> np.ndarray:
    """phi(n) for n = 0..limit (phi[0] = 0), int64.

    Uses phi(n) = n * prod_{p|n} (1 - 1/p): start from identity and fold in
    every prime once; the integer divisions are exact in this order.
    """
    if limit < 1:
        raise CapacityError("totient limit must be >= 1, got %r" % (limit,))
    if limit > MAX_SIEVE_LIMIT:
        raise CapacityError(
            "totient limit %d exceeds memory budget (max %d)" % (limit, MAX_SIEVE_LIMIT)
        )
    phi = np.arange(limit + 1, dtype=np.int64)
    is_comp = np.zeros(limit + 1, dtype=bool)
    for p in range(2, limit + 1):
        if not is_comp[p]:
            phi[p::p] -= phi[p::p] // p
            is_comp[p * p :: p] = True
    phi[0] = 0
    return phi


def save_cache(table: MobiusTable, path: str) -> None:
    """Write the binary mu cache: magic, little-endian u64 limit, mu bytes."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<Q", table.limit))
        fh.write(table.mu.astype(np.int8).tobytes())


def load_cache(path: str) -> MobiusTable:
    """Load a mu cache written by save_cache; mertens and spf are recomputed.

    Raises:
        ValueError: wrong magic or truncated file.
    """
    with open(path, "rb") as fh:
        magic = fh.read(len(_CACHE_MAGIC))
        if magic != _CACHE_MAGIC:
            raise ValueError("not a RAFSIEVE1 cache file: %r" % (path,))
        (limit,) = struct.unpack("<Q", fh.read(8))
        raw = fh.read(limit + 1)
        if len(raw) != limit + 1:
            raise ValueError("truncated RAFSIEVE1 cache: %r" % (path,))
    mu = np.frombuffer(raw, dtype=np.int8).copy()
    mertens = np.zeros(limit + 1, dtype=np.int64)
    np.cumsum(mu[1:], dtype=np.int64, out=mertens[1:])
    # spf is cheap relative to the mu sieve; rebuild it.
    spf = sieve_spf_only(limit)
    return MobiusTable(limit=int(limit), mu=mu, mertens=mertens, spf=spf)


def sieve_spf_only(limit: int) -> np.ndarray:
    """Just the smallest-prime-factor array (used when mu comes from cache)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        spf[1] = 1
    p = 2
    while p * p <= limit:
        if spf[p] == 0:
            spf[p] = p
            sl = spf[p * p :: p]
            sl[sl == 0] = p
        p += 1
    rest = np.nonzero(spf[2:] == 0)[0] + 2
    spf[rest] = rest
    return spf
