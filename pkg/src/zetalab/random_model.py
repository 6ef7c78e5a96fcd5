"""Monte Carlo for the random Euler product and its Dirichlet-polynomial truncation.

A realization is one phase ``theta_p`` per prime, drawn from the counter-based
stream of a 64-bit seed (see :mod:`zetalab.rng`).  The product is truncated at a
prime cutoff; the discarded tail ``sum_{p > cutoff} -log(1 - X(p) p^-sigma)`` is
a sum of many small independent terms, and by default it is replaced by a complex
Gaussian with exactly the tail's variance.  This makes moderate cutoffs usable
near ``sigma = 1/2``, where the tail converges only in mean square.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit, uint64
from scipy import stats

from . import rng
from .errors import DivergenceError, DomainError
from .primes import default_table, prime_sum, prime_zeta_tail
from .rng import _gauss_pair, _key, _u01

__all__ = [
    "PhaseAssignment",
    "SampleSet",
    "tail_variance",
    "sample_log_zeta_rand",
    "sample_R_Y_rand",
    "sample_set",
    "log_zeta_rand_batch",
    "R_Y_rand_batch",
    "exact_prime_moment",
    "MomentReport",
    "check_moment_bound",
    "TailReport",
    "check_tail_bound",
    "tail_profile",
    "ExpMomentReport",
    "compare_exp_moments",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseAssignment:
    """One realization of ``{X(p) = e^{i theta_p}}`` for ``p <= limit``.

    Seeded assignments draw ``theta_p = 2 pi U(seed, p)``; ``conjugate=True``
    negates every phase.  :meth:`constant` builds a deterministic assignment
    (all phases equal), mostly for consistency checks.
    """

    seed: int | None
    limit: int
    conjugate: bool = False
    fixed_angle: float | None = None

    @classmethod
    def constant(cls, limit, angle=0.0):
        return cls(None, int(limit), False, float(angle))

    def phases(self, primes=None):
        """Angles for ``primes`` (default: every prime up to ``limit``) in ``[0, 2 pi)``."""
        if primes is None:
            primes = default_table(max(self.limit, 2)).primes_upto(self.limit)
        primes = np.asarray(primes)
        if primes.size and primes.max() > self.limit:
            raise DomainError("prime beyond the assignment limit")
        if self.fixed_angle is not None:
            th = np.full(len(primes), self.fixed_angle % _TWO_PI)
        else:
            th = _TWO_PI * rng.uniforms(self.seed, primes)
        if self.conjugate:
            th = np.where(th == 0, 0.0, _TWO_PI - th)
        return th

    def phase_map(self):
        primes = default_table(max(self.limit, 2)).primes_upto(self.limit)
        return dict(zip(primes.tolist(), self.phases(primes).tolist()))


# --- kernels -----------------------------------------------------------------------


@njit(cache=True)
def _log_zeta_kernel(seeds, primes, w, tail_sd, sign):
    n = len(seeds)
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        key = _key(seeds[i])
        re = 0.0
        im = 0.0
        for j in range(len(primes)):
            th = 2.0 * math.pi * _u01(key, primes[j])
            c = math.cos(th)
            s = sign * math.sin(th)
            wj = w[j]
            re -= 0.5 * math.log1p(wj * (wj - 2.0 * c))
            im -= math.atan2(-wj * s, 1.0 - wj * c)
        if tail_sd > 0.0:
            g1, g2 = _gauss_pair(key)
            re += tail_sd * g1
            im += sign * tail_sd * g2
        out[i] = complex(re, im)
    return out


@njit(cache=True)
def _R_Y_kernel(seeds, pp_p, pp_k, amp, sign):
    n = len(seeds)
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        key = _key(seeds[i])
        re = 0.0
        im = 0.0
        last_p = uint64(0)
        th = 0.0
        for j in range(len(pp_p)):
            if pp_p[j] != last_p:
                last_p = pp_p[j]
                th = 2.0 * math.pi * _u01(key, last_p)
            ph = pp_k[j] * th
            re += amp[j] * math.cos(ph)
            im += sign * amp[j] * math.sin(ph)
        out[i] = complex(re, im)
    return out


# --- single samples ------------------------------------------------------------------


def tail_variance(sigma, cutoff, table=None):
    """``E|sum_{p > cutoff} log(1 - X(p) p^-sigma)|^2 = sum_{p > cutoff, k} k^-2 p^(-2k sigma)``."""
    if sigma <= 0.5:
        raise DivergenceError(f"random Euler product diverges for sigma <= 1/2 (got {sigma})")
    table = table or default_table(max(int(cutoff), 2))
    total = []
    k = 1
    while True:
        term = prime_zeta_tail(2 * k * sigma, cutoff, table) / (k * k)
        total.append(term)
        if abs(term) < 1e-18 or k > 200:
            break
        k += 1
    return max(0.0, math.fsum(total))


def _grouped_prime_powers(table, Y):
    pp = table.prime_powers_upto(Y)
    order = np.lexsort((pp[:, 1], pp[:, 0]))  # group by prime so each phase is drawn once
    return pp[order]


def _seeds_array(seeds):
    return np.ascontiguousarray(np.asarray(seeds, dtype=np.uint64))


def log_zeta_rand_batch(sigma, cutoff, seeds, gaussian_tail=True, conjugate=False, table=None):
    """``log zeta(sigma, X)`` truncated at ``cutoff`` for each seed.

    Returns ``(values, tail_rms)``.  ``tail_rms`` is the root-mean-square size of
    the discarded tail; with ``gaussian_tail`` a complex normal of that size is
    added in place of the tail.
    """
    if sigma <= 0.5:
        raise DivergenceError(f"random Euler product diverges for sigma <= 1/2 (got {sigma})")
    table = table or default_table(max(int(cutoff), 10**6))
    ps = table.primes_upto(cutoff)
    w = np.exp(-sigma * np.log(ps.astype(float)))
    rms = math.sqrt(tail_variance(sigma, cutoff, table))
    sd = rms / math.sqrt(2.0) if gaussian_tail else 0.0
    vals = _log_zeta_kernel(_seeds_array(seeds), ps.astype(np.uint64), w, sd, -1.0 if conjugate else 1.0)
    return vals, rms


def R_Y_rand_batch(sigma, Y, seeds, conjugate=False, primes_only=False, table=None):
    """``R_Y(sigma, X) = sum_{p^k <= Y} X(p)^k / (k p^{k sigma})`` for each seed."""
    table = table or default_table(max(int(Y), 10**6))
    if Y < 2:
        return np.zeros(len(seeds), dtype=complex)
    pp = _grouped_prime_powers(table, Y)
    if primes_only:
        pp = pp[pp[:, 1] == 1]
    amp = np.exp(-sigma * np.log(pp[:, 2].astype(float))) / pp[:, 1]
    return _R_Y_kernel(
        _seeds_array(seeds), pp[:, 0].astype(np.uint64), pp[:, 1].astype(np.float64), amp, -1.0 if conjugate else 1.0
    )


def sample_log_zeta_rand(sigma, cutoff, assignment, gaussian_tail=False):
    """One sample of ``sum_{p <= cutoff} -log(1 - e^{i theta_p} p^-sigma)``.

    Returns ``(value, tail_bound)``.  For seeded phases ``tail_bound`` is six
    times the RMS of the omitted tail; for a constant assignment it is the
    deterministic bound, finite only for ``sigma > 1``.
    """
    if cutoff > assignment.limit:
        raise DomainError("cutoff exceeds the phase assignment limit")
    if assignment.fixed_angle is None:
        v, rms = log_zeta_rand_batch(
            sigma, cutoff, [assignment.seed], gaussian_tail, assignment.conjugate
        )
        return complex(v[0]), 6.0 * rms
    if sigma <= 0.5:
        raise DivergenceError(f"random Euler product diverges for sigma <= 1/2 (got {sigma})")
    table = default_table(max(int(cutoff), 10**6))
    ps = table.primes_upto(cutoff).astype(float)
    x = np.exp(1j * assignment.phases(ps.astype(np.int64))) * ps ** (-sigma)
    val = -np.log1p(-x)
    out = complex(math.fsum(val.real), math.fsum(val.imag))
    # allowance for rounding in the head sum and in the prime-zeta tails
    return out, _deterministic_tail(sigma, cutoff, table) + 1e-14 * (1 + abs(out))


def _deterministic_tail(sigma, cutoff, table):
    """``sum_{p > cutoff} |log(1 - X(p) p^-sigma)| <= sum_k P_{>cutoff}(k sigma) / k`` (infinite for sigma <= 1)."""
    if sigma <= 1:
        return math.inf
    terms = []
    k = 1
    while True:
        t = prime_zeta_tail(k * sigma, cutoff, table) / k
        terms.append(t)
        if t < 1e-20 or k > 200:
            break
        k += 1
    return math.fsum(terms)


def sample_R_Y_rand(sigma, Y, assignment):
    if Y < 2:
        return 0j
    if Y > assignment.limit:
        raise DomainError("Y exceeds the phase assignment limit")
    if assignment.fixed_angle is None:
        return complex(R_Y_rand_batch(sigma, Y, [assignment.seed], assignment.conjugate)[0])
    table = default_table(max(int(Y), 10**6))
    pp = table.prime_powers_upto(Y)
    th = assignment.phases(pp[:, 0])
    terms = np.exp(1j * pp[:, 1] * th) * np.exp(-sigma * np.log(pp[:, 2].astype(float))) / pp[:, 1]
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


# --- sample sets ---------------------------------------------------------------------


@dataclass
class SampleSet:
    sigma: float
    Y_or_cutoff: float
    values: np.ndarray
    seeds: np.ndarray
    kind: str = "log_zeta"
    base_seed: int | None = None
    gaussian_tail: bool = True
    tail_rms: float = 0.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.values) != len(self.seeds):
            raise ValueError("values and seeds differ in length")

    def __len__(self):
        return len(self.values)

    def regenerate(self):
        if self.kind == "log_zeta":
            return log_zeta_rand_batch(self.sigma, self.Y_or_cutoff, self.seeds, self.gaussian_tail)[0]
        return R_Y_rand_batch(self.sigma, self.Y_or_cutoff, self.seeds)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["seed", "re", "im"])
            for s, v in zip(self.seeds.tolist(), self.values):
                wr.writerow([s, repr(float(v.real)), repr(float(v.imag))])

    def manifest(self):
        return {
            "kind": self.kind,
            "sigma": self.sigma,
            "Y_or_cutoff": self.Y_or_cutoff,
            "n_samples": len(self),
            "base_seed": self.base_seed,
            "gaussian_tail": self.gaussian_tail,
            "tail_rms": self.tail_rms,
            "rng": "splitmix64-counter(seed, prime)",
            **self.extra,
        }

    @classmethod
    def from_csv(cls, path, sigma, Y_or_cutoff, kind="log_zeta", gaussian_tail=True):
        seeds, vals = [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                seeds.append(int(row["seed"]))
                vals.append(complex(float(row["re"]), float(row["im"])))
        return cls(sigma, Y_or_cutoff, np.array(vals), np.array(seeds, dtype=np.uint64), kind, None, gaussian_tail)


def sample_set(sigma, cutoff, n, base_seed, kind="log_zeta", gaussian_tail=True, chunk=200_000):
    """``n`` independent realizations with seeds derived from ``base_seed``."""
    seeds = rng.derive_seeds(base_seed, n)
    parts = []
    rms = 0.0
    for lo in range(0, n, chunk):
        if kind == "log_zeta":
            v, rms = log_zeta_rand_batch(sigma, cutoff, seeds[lo : lo + chunk], gaussian_tail)
        elif kind == "R_Y":
            v = R_Y_rand_batch(sigma, cutoff, seeds[lo : lo + chunk])
        else:
            raise DomainError(f"unknown sample kind {kind!r}")
        parts.append(v)
    vals = np.concatenate(parts) if parts else np.zeros(0, dtype=complex)
    return SampleSet(sigma, cutoff, vals, seeds, kind, int(base_seed), gaussian_tail and kind == "log_zeta", rms)


# --- moment and tail checks ---------------------------------------------------------------


def exact_prime_moment(sigma, Y, k, table=None):
    """Exact ``E|sum_{p <= Y} X(p) p^-sigma|^{2k}``.

    Expanding the product, only terms where every prime appears equally often in
    the sum and its conjugate survive, so the moment is
    ``(k!)^2 [x^k] prod_p sum_n p^(-2 n sigma) x^n / (n!)^2``.
    """
    table = table or default_table(max(int(Y), 10**6))
    a2 = np.exp(-2 * sigma * np.log(table.primes_upto(Y).astype(float)))
    fact = np.array([math.factorial(n) for n in range(k + 1)], dtype=float)
    poly = np.zeros(k + 1)
    poly[0] = 1.0
    for a in a2:
        factor = a ** np.arange(k + 1) / fact**2
        poly = np.convolve(poly, factor)[: k + 1]
    return math.factorial(k) ** 2 * poly[k]


@dataclass(frozen=True)
class MomentReport:
    sigma: float
    Y: float
    k: int
    n_samples: int
    S: float
    prime_moment: float
    prime_moment_se: float
    prime_moment_exact: float
    factorial_bound: float
    R_moment: float
    R_moment_se: float
    implied_C1: float
    passed: bool


def check_moment_bound(sigma, Y, k, n_samples, seed=0):
    """Monte Carlo ``2k``-th moments of the prime sum and of ``R_Y``.

    The prime sum ``sum_{p <= Y} X(p) p^-sigma`` is tested against
    ``k! S^k`` with ``S = sum_{p <= Y} p^(-2 sigma)`` (3-SE slack).  For ``R_Y`` the
    report gives the smallest ``C1`` with ``E|R_Y|^{2k} <= (C1 k S)^k``.
    """
    if not 1 <= k <= 6:
        raise DomainError("k must be in 1..6")
    table = default_table(max(int(Y), 10**6))
    S = prime_sum(table, sigma, Y)
    seeds = rng.derive_seeds(seed, n_samples)
    P = np.abs(R_Y_rand_batch(sigma, Y, seeds, primes_only=True, table=table)) ** (2 * k)
    R = np.abs(R_Y_rand_batch(sigma, Y, seeds, table=table)) ** (2 * k)
    se = lambda x: float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0
    bound = math.factorial(k) * S**k
    pm = float(P.mean())
    rm = float(R.mean())
    return MomentReport(
        sigma, Y, k, n_samples, S, pm, se(P), exact_prime_moment(sigma, Y, k, table), bound,
        rm, se(R), rm ** (1.0 / k) / (k * S) if S > 0 else math.nan, pm <= bound + 3 * se(P),
    )


@dataclass(frozen=True)
class TailReport:
    sigma: float
    Y: float
    A: float
    n_samples: int
    frequency: float
    ci_low: float
    ci_high: float
    S: float
    deterministic_sup: float
    bounds: dict
    consistent: dict


def _wilson(count, n, level=0.95):
    ci = stats.binomtest(int(count), int(n)).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def _tail_report(sigma, Y, A, absR, S, sup, cs):
    n = len(absR)
    hits = int(np.count_nonzero(absR >= A))
    lo, hi = _wilson(hits, n)
    bounds = {c: math.exp(-A * A / (c * S)) if S > 0 else 0.0 for c in cs}
    # a candidate constant is ruled out only if the whole interval sits above its bound
    consistent = {c: lo <= b for c, b in bounds.items()}
    return TailReport(sigma, Y, A, n, hits / n, lo, hi, S, sup, bounds, consistent)


def check_tail_bound(sigma, Y, A, n_samples, seed=0, constants=(1, 4, 10)):
    """Tail frequency ``P[|R_Y| >= A]`` with a Wilson interval against ``exp(-A^2/(c S))``."""
    if A < 0:
        raise DomainError("A must be nonnegative")
    table = default_table(max(int(Y), 10**6))
    S = prime_sum(table, sigma, Y) if Y >= 2 else 0.0
    pp = table.prime_powers_upto(Y)
    sup = float(np.sum(np.exp(-sigma * np.log(pp[:, 2].astype(float))) / pp[:, 1])) if len(pp) else 0.0
    absR = np.abs(R_Y_rand_batch(sigma, Y, rng.derive_seeds(seed, n_samples), table=table))
    return _tail_report(sigma, Y, A, absR, S, sup, constants)


def tail_profile(sigma, Y, As, n_samples, seed=0):
    """Tail frequencies on several thresholds from one sample set, plus the slope of
    ``log frequency`` against ``A^2`` (least squares over thresholds with hits)."""
    table = default_table(max(int(Y), 10**6))
    S = prime_sum(table, sigma, Y)
    absR = np.abs(R_Y_rand_batch(sigma, Y, rng.derive_seeds(seed, n_samples), table=table))
    freqs = np.array([np.mean(absR >= A) for A in As])
    As = np.asarray(As, dtype=float)
    m = freqs > 0
    slope = float(np.polyfit(As[m] ** 2, np.log(freqs[m]), 1)[0]) if m.sum() >= 2 else math.nan
    return freqs, slope, S


# --- exponential moments: time average vs expectation --------------------------------------


@dataclass(frozen=True)
class ExpMomentReport:
    t_average: complex
    quadrature_error: float
    expectation: complex
    expectation_se: float
    gap: float
    tolerance: float
    agree: bool


def _t_average(f, T1, T2, n_t, order=16):
    panels = max(1, n_t // order)
    x, wts = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(T1, T2, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * wts[None, :]).ravel()
    total = 0j
    for lo in range(0, len(t), 20000):
        total += np.dot(wt[lo : lo + 20000], f(t[lo : lo + 20000]))
    return total / (T2 - T1)


def compare_exp_moments(z1, z2, sigma, Y, T1, T2, n_t, n_mc, seed=0):
    """``(1/(T2-T1)) int exp(z1 R_Y + z2 conj R_Y) dt`` against ``E exp(z1 R_Y(X) + z2 conj R_Y(X))``.

    The time average uses composite 16-point Gauss-Legendre panels; its error
    estimate is the change from halving the number of panels.
    """
    from .zeta import dirichlet_R_Y

    if abs(z1) > 5 or abs(z2) > 5:
        raise DomainError("|z1|, |z2| must be at most 5")
    if Y > 10**4 or T2 > 10**6:
        raise DomainError("requires Y <= 1e4 and T2 <= 1e6")
    table = default_table(10**6)

    def f(t):
        R = dirichlet_R_Y(sigma + 1j * t, Y, table)
        return np.exp(z1 * R + z2 * np.conj(R))

    q = _t_average(f, T1, T2, n_t)
    q_half = _t_average(f, T1, T2, n_t // 2)
    qerr = abs(q - q_half)
    R = R_Y_rand_batch(sigma, Y, rng.derive_seeds(seed, n_mc), table=table)
    vals = np.exp(z1 * R + z2 * np.conj(R))
    mean = complex(vals.mean())
    se = math.hypot(vals.real.std(ddof=1), vals.imag.std(ddof=1)) / math.sqrt(n_mc) if n_mc > 1 else 0.0
    gap = abs(q - mean)
    tol = 3 * se + qerr
    return ExpMomentReport(complex(q), qerr, mean, se, gap, tol, gap <= tol)


def write_manifest(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
