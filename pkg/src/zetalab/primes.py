"""Primes, prime powers and the prime sums that parameterize the model.

The sums here feed every Euler-product quantity in the package, so they are
computed order-independently: finite sums go through :func:`math.fsum`
(exactly rounded, hence invariant under permutation of the terms).

Two routes to the variance sum ``psi(sigma) = sum_{p,k} k^-2 p^(-2 k sigma)``
are provided:

* :func:`psi` sums primes up to a cutoff and replaces the rest by the
  prime-number-theorem integral, returning an explicit error bound;
* :func:`psi_exact` uses the prime zeta function, which converges for every
  ``sigma > 1/2`` and is what the density code relies on near the critical
  line, where the truncated sum converges far too slowly.
"""

from __future__ import annotations

import functools
import math
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special

from .errors import DivergenceError, EmptyTableError, TableTooSmallError, ZetaLabError

__all__ = [
    "PrimeTable",
    "PsiValue",
    "build_prime_table",
    "default_table",
    "prime_sum",
    "prime_zeta",
    "prime_zeta_tail",
    "psi",
    "psi_exact",
    "sigma_T",
    "psi_T",
    "save_prime_table",
    "load_prime_table",
    "cached_prime_table",
]


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primes up to ``limit`` and every prime power ``p**k <= limit``.

    ``prime_powers`` is an ``(M, 3)`` integer array of ``(p, k, p**k)`` rows
    sorted by ``p**k``. Arrays are read-only, so a table can be shared freely.
    """

    limit: int
    primes: np.ndarray
    prime_powers: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.primes.setflags(write=False)
        self.prime_powers.setflags(write=False)

    def __len__(self):
        return len(self.primes)

    def __repr__(self):
        return f"PrimeTable(limit={self.limit}, n_primes={len(self.primes)})"

    def check_covers(self, Y):
        if Y > self.limit:
            raise TableTooSmallError(f"need primes up to {Y:g}, table only reaches {self.limit}")

    def primes_upto(self, Y):
        self.check_covers(Y)
        return self.primes[: np.searchsorted(self.primes, math.floor(Y), side="right")]

    def prime_powers_upto(self, Y):
        self.check_covers(Y)
        pp = self.prime_powers
        return pp[: np.searchsorted(pp[:, 2], math.floor(Y), side="right")]


def _sieve(limit):
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    is_prime[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if is_prime[p]:
            is_prime[p * p :: 2 * p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _table_from_primes(limit, primes):
    rows = []
    for p in primes[primes <= math.isqrt(limit)].tolist():
        k, q = 2, p * p
        while q <= limit:
            rows.append((p, k, q))
            k += 1
            q *= p
    higher = np.array(rows, dtype=np.int64).reshape(-1, 3)
    first = np.column_stack([primes, np.ones_like(primes), primes])
    pp = np.concatenate([first, higher])
    pp = pp[np.lexsort((pp[:, 0], pp[:, 2]))]
    return PrimeTable(int(limit), primes, pp)


def build_prime_table(limit):
    """Sieve primes up to ``limit`` (inclusive)."""
    limit = int(limit)
    if limit < 2:
        raise EmptyTableError(f"limit={limit} contains no primes")
    return _table_from_primes(limit, _sieve(limit))


@functools.lru_cache(maxsize=8)
def default_table(limit=10**6):
    return cached_prime_table(limit)


def prime_sum(table, sigma, Y):
    """``sum_{p <= Y} p**(-2 sigma)`` as an exactly rounded finite sum."""
    if sigma <= 0:
        raise DivergenceError("sigma must be positive")
    ps = table.primes_upto(Y)
    return math.fsum(np.exp(-2.0 * sigma * np.log(ps.astype(float))))


# --- prime zeta function ---------------------------------------------------


@functools.lru_cache(maxsize=1)
def _mobius_table(n=256):
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in _sieve(n).tolist():
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def prime_zeta(s):
    """``P(s) = sum_p p**-s`` for real ``s > 1``.

    Moebius inversion of the Euler product: ``P(s) = sum_n mu(n)/n log zeta(ns)``.
    The terms fall off like ``2**(-ns)``, so a few dozen suffice at any ``s > 1``.
    """
    if s <= 1:
        raise DivergenceError(f"prime zeta diverges at s={s}")
    mu = _mobius_table()
    terms = []
    n = 1
    while True:
        x = n * s
        lz = math.log1p(float(special.zetac(x)))
        if mu[n]:
            terms.append(mu[n] * lz / n)
        if lz < 1e-19 * n:
            break
        n += 1
        if n >= len(mu):
            raise ZetaLabError("prime zeta series did not converge")
    return math.fsum(terms)


def prime_zeta_tail(s, X, table):
    """``sum_{p > X} p**-s``.

    Two routes, whichever has the smaller error bound: ``P(s)`` minus the head
    (rounding ~1e-16 P(s), poor once the tail is tiny), or the primes in
    ``(X, table.limit]`` plus a prime-number-theorem integral for the rest.
    """
    if s <= 1:
        raise DivergenceError(f"prime zeta diverges at s={s}")
    X = math.floor(X)
    Y = table.limit
    P = prime_zeta(s)
    err_sub = 4e-16 * P
    if Y >= max(2 * X, _PNT_X0):
        lY = math.log(Y)
        err_dir = _pnt_tail_error(s, Y) + 1e-16 * P * (X + 1) ** -s * (X + 1)
        if err_dir < err_sub:
            ps = table.primes[np.searchsorted(table.primes, X, side="right") :]
            direct = math.fsum(np.exp(-s * np.log(ps.astype(float))))
            return direct + float(special.exp1((s - 1) * lY))
    head = math.fsum(np.exp(-s * np.log(table.primes_upto(X).astype(float))))
    return P - head


def psi_exact(sigma):
    """``psi(sigma) = sum_{k>=1} P(2 k sigma) / k**2`` via the prime zeta function."""
    if sigma <= 0.5:
        raise DivergenceError(f"psi diverges for sigma <= 1/2 (got {sigma})")
    terms = []
    k = 1
    while True:
        t = prime_zeta(2.0 * k * sigma) / (k * k)
        terms.append(t)
        if t < 1e-19:
            break
        k += 1
    return math.fsum(terms)


# --- psi with an explicit prime number theorem tail --------------------------

# |pi(x) - li(x)| <= 0.2795 x (log x)^(-3/4) exp(-sqrt(log x / 6.455)), x >= 229
# (Trudgian's unconditional explicit prime number theorem).
_PNT_X0 = 229


def _pnt_ratio(x):
    lx = math.log(x)
    return 0.2795 * lx ** -0.75 * math.exp(-math.sqrt(lx / 6.455))


def _pnt_tail_error(alpha, X):
    """Bound on |sum_{p>X} p^-alpha - int_X^inf x^-alpha/log x dx| for alpha > 1, X >= 229."""
    c = _pnt_ratio(X)
    return c * X ** (1.0 - alpha) * (1.0 + alpha / (alpha - 1.0))


@dataclass(frozen=True)
class PsiValue:
    value: float
    head: float
    tail: float
    tail_error: float

    def __float__(self):
        return self.value


def psi(sigma, tail_cutoff=10**6, table=None):
    """Truncated ``psi(sigma)`` with an integral tail for primes above ``tail_cutoff``.

    The tail keeps the ``k = 1, 2`` prime-power layers as exponential integrals
    ``E1((2k sigma - 1) log X) / k**2``; ``tail_error`` bounds their deviation from
    the true prime sums (explicit PNT) plus everything dropped for ``k >= 3``.
    """
    if sigma <= 0.5:
        raise DivergenceError(f"psi diverges for sigma <= 1/2 (got {sigma})")
    X = int(tail_cutoff)
    if X < 100:
        raise ValueError("tail_cutoff must be at least 100")
    if table is None or table.limit < max(X, _PNT_X0):
        table = default_table(max(X, _PNT_X0, 10**6 if X <= 10**6 else X))
    ps = table.primes_upto(X).astype(float)
    logs = np.log(ps)
    head_terms = []
    k = 1
    while True:
        layer = np.exp(-2.0 * k * sigma * logs) / (k * k)
        head_terms.append(math.fsum(layer))
        if layer[0] < 1e-20:
            break
        k += 1
    head = math.fsum(head_terms)

    lx = math.log(X)
    tail = special.exp1((2 * sigma - 1) * lx) + special.exp1((4 * sigma - 1) * lx) / 4.0

    err = 0.0
    X0 = X
    if X < _PNT_X0:
        # primes in (X, 229] handled exactly in the error bound
        gap = table.primes[(table.primes > X) & (table.primes <= _PNT_X0)].astype(float)
        for kk, alpha in ((1, 2 * sigma), (2, 4 * sigma)):
            exact = math.fsum(gap ** -alpha)
            integ = special.exp1((alpha - 1) * lx) - special.exp1((alpha - 1) * math.log(_PNT_X0))
            err += abs(exact - integ) / (kk * kk)
        X0 = _PNT_X0
    err += _pnt_tail_error(2 * sigma, X0) + _pnt_tail_error(4 * sigma, X0) / 4.0
    # k >= 3 layers, not included in the value
    k = 3
    while True:
        a = 2 * k * sigma
        b = X ** (1.0 - a) / (a - 1.0) / (k * k)
        err += b
        if b < 1e-20 or k > 200:
            break
        k += 1
    return PsiValue(head + float(tail), head, float(tail), err)


def sigma_T(theta, T):
    """``1/2 + (log T)**-theta``."""
    return 0.5 + math.log(T) ** (-theta)


def psi_T(theta, T):
    return psi_exact(sigma_T(theta, T))


# --- binary cache ------------------------------------------------------------

_MAGIC = b"ZLPT"
_VERSION = 1
_HEADER = struct.Struct("<4sHQQ")


def save_prime_table(table, path):
    """Write primes as ``header(magic, version, limit, count)`` + uint16 gaps."""
    gaps = np.diff(np.concatenate([[0], table.primes]))
    if gaps.max(initial=0) > np.iinfo(np.uint16).max:
        raise ZetaLabError("prime gap does not fit the cache format")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, table.limit, len(table.primes)))
        fh.write(gaps.astype("<u2").tobytes())


def load_prime_table(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, limit, count = _HEADER.unpack_from(raw)
    if magic != _MAGIC or version != _VERSION:
        raise ZetaLabError(f"{path}: not a prime table cache (version {version})")
    gaps = np.frombuffer(raw, dtype="<u2", count=count, offset=_HEADER.size)
    primes = np.cumsum(gaps.astype(np.int64))
    return _table_from_primes(int(limit), primes)


def cached_prime_table(limit, cache_dir=None):
    """Load from ``$ZETALAB_CACHE`` (or ``cache_dir``) if present, else sieve and store."""
    cache_dir = cache_dir or os.environ.get("ZETALAB_CACHE")
    if not cache_dir:
        return build_prime_table(limit)
    path = Path(cache_dir) / f"primes_{int(limit)}.bin"
    if path.exists():
        return load_prime_table(path)
    table = build_prime_table(limit)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_prime_table(table, path)
    return table
