"""Euler-Maclaurin evaluation of zeta(s), branch-tracked log zeta, and R_Y(s).

Branch convention for ``log zeta(sigma + i t)``: continuous variation along the
horizontal segment from ``+infinity + i t`` to ``sigma + i t``.  For
``Re s >= 1.1`` the Dirichlet series of ``log zeta`` converges absolutely and
``|Im log zeta(s)| <= log zeta(1.1) < pi``, so on that half-plane the
continuous branch *is* the principal one.  Tracking therefore only starts at
``Re s = 1.1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import special

from .errors import DomainError, PoleError, PrecisionError

__all__ = [
    "ComplexPoint",
    "LogZetaSample",
    "zeta",
    "zeta_many",
    "zeta_lines",
    "em_plan",
    "zeta_derivative",
    "log_zeta_track",
    "log_zeta_batch",
    "dirichlet_R_Y",
    "write_log_zeta_csv",
    "PRINCIPAL_FROM",
]

PRINCIPAL_FROM = 1.1
SIGMA_MIN, SIGMA_MAX, T_MAX = 0.4, 10.0, 1e7
_M_MAX = 40
# B_{2j}/(2j)! = (-1)^(j+1) 2 zeta(2j) / (2 pi)^(2j)
_J = np.arange(1, _M_MAX + 2)
_BERN = (-1.0) ** (_J + 1) * 2.0 * special.zeta(2.0 * _J) / (2 * np.pi) ** (2.0 * _J)
_BERN = np.concatenate([[0.0], _BERN])  # index j -> B_{2j}/(2j)!


@dataclass(frozen=True)
class ComplexPoint:
    sigma: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.t)):
            raise DomainError("point must be finite")
        if not (SIGMA_MIN <= self.sigma <= SIGMA_MAX) or abs(self.t) > T_MAX:
            raise DomainError(
                f"s = {self.sigma}+{self.t}i outside the box "
                f"[{SIGMA_MIN}, {SIGMA_MAX}] x [-{T_MAX:g}, {T_MAX:g}]"
            )

    @property
    def s(self):
        return complex(self.sigma, self.t)


@dataclass(frozen=True)
class LogZetaSample:
    point: ComplexPoint
    log_zeta: complex
    zeta: complex
    branch_ok: bool


def _as_point(point):
    if isinstance(point, ComplexPoint):
        return point
    s = complex(point)
    return ComplexPoint(s.real, s.imag)


# --- Euler-Maclaurin planning -------------------------------------------------


def _log_remainder_coeff(sigma, t, m):
    """log of |s(s+1)...(s+2m+1)| |B_{2m+2}|/(2m+2)! / (sigma+2m+1)."""
    j = np.arange(2 * m + 2)
    lp = 0.5 * np.log((sigma + j) ** 2 + t * t).sum()
    return lp + math.log(abs(_BERN[m + 1])) - math.log(sigma + 2 * m + 1)


def em_plan(sigma, t, eps):
    """Pick ``(N, m, bound)`` minimizing work with remainder bound below ``eps``.

    Uses the classical bound
    ``|R| <= |s(s+1)...(s+2m+1) B_{2m+2} / ((2m+2)! (sigma+2m+1))| N^(-sigma-2m-1)``.
    """
    best = None
    for m in range(2, _M_MAX + 1):
        lc = _log_remainder_coeff(sigma, t, m)
        e = sigma + 2 * m + 1
        N = max(2, math.ceil(math.exp((lc - math.log(eps)) / e)))
        cost = N + 3 * m
        if best is None or cost < best[0]:
            best = (cost, N, m, math.exp(lc - e * math.log(N)))
    _, N, m, bound = best
    return N, m, bound


def _rounding_floor(sigma, t, N):
    # phase error t*log(n)*eps per term, accumulated as a random walk
    lt = abs(t) * math.log(max(N, 2)) + 1.0
    e = 1.0 - 2.0 * sigma
    mass = math.sqrt(1.0 + (math.log(N) if abs(e) < 1e-12 else (N**e - 1.0) / e))
    return 2.2e-16 * (lt * mass + N ** max(0.0, 1 - sigma))


# --- kernels -----------------------------------------------------------------


@njit(cache=True)
def _em_correction(s, N, m, bern):
    logN = math.log(N)
    Ns = cmath.exp(-s * logN)
    out = N * Ns / (s - 1.0) + 0.5 * Ns
    # q_j = s(s+1)...(s+2j-2) N^{-s-2j+1}, updated as a ratio to avoid overflow
    q = s * Ns / N
    NN = float(N) * float(N)
    for j in range(1, m + 1):
        out += bern[j] * q
        q = q * ((s + 2 * j - 1) * (s + 2 * j) / NN)
    return out


@njit(cache=True)
def _zeta_scalar(sig, t, N, m, bern):
    sr = 0.0
    cr = 0.0
    si = 0.0
    ci = 0.0
    for n in range(1, N):
        ln = math.log(n)
        a = math.exp(-sig * ln)
        ph = t * ln
        x = a * math.cos(ph)
        y = -a * math.sin(ph)
        # Neumaier summation on both parts
        tr = sr + x
        if abs(sr) >= abs(x):
            cr += (sr - tr) + x
        else:
            cr += (x - tr) + sr
        sr = tr
        ti = si + y
        if abs(si) >= abs(y):
            ci += (si - ti) + y
        else:
            ci += (y - ti) + si
        si = ti
    return complex(sr + cr, si + ci) + _em_correction(complex(sig, t), N, m, bern)


@njit(cache=True)
def _zeta_points(sigs, ts, Ns, ms, bern):
    out = np.empty(len(ts), dtype=np.complex128)
    for i in range(len(ts)):
        out[i] = _zeta_scalar(sigs[i], ts[i], Ns[i], ms[i], bern)
    return out


@njit(cache=True)
def _zeta_lines(sigs, ts, Ns, ms, bern):
    # zeta at every (t_i, sigma_k); the n^{-it} factors are shared across sigma nodes
    K = len(sigs)
    Nmax = Ns.max()
    logn = np.empty(Nmax)
    pw = np.empty((Nmax, K))
    for n in range(1, Nmax):
        logn[n] = math.log(n)
        for k in range(K):
            pw[n, k] = math.exp(-sigs[k] * logn[n])
    out = np.empty((len(ts), K), dtype=np.complex128)
    re = np.empty(K)
    im = np.empty(K)
    for i in range(len(ts)):
        t = ts[i]
        re[:] = 0.0
        im[:] = 0.0
        for n in range(1, Ns[i]):
            ph = t * logn[n]
            c = math.cos(ph)
            s = math.sin(ph)
            for k in range(K):
                re[k] += pw[n, k] * c
                im[k] -= pw[n, k] * s
        for k in range(K):
            out[i, k] = complex(re[k], im[k]) + _em_correction(complex(sigs[k], t), Ns[i], ms[i], bern)
    return out


# --- public evaluators ----------------------------------------------------------


def zeta(point, precision_target=1e-10):
    """``zeta(s)`` by Euler-Maclaurin summation with remainder below ``precision_target``."""
    p = _as_point(point)
    if precision_target < 1e-12:
        raise DomainError("precision_target must be >= 1e-12")
    if p.sigma == 1.0 and p.t == 0.0:
        raise PoleError("zeta has a pole at s = 1")
    N, m, bound = em_plan(p.sigma, p.t, precision_target / 4)
    floor = _rounding_floor(p.sigma, p.t, N)
    if floor > precision_target:
        raise PrecisionError(
            f"double precision cannot reach {precision_target:g} at s={p.s}", achieved=floor + bound
        )
    return _zeta_scalar(float(p.sigma), float(p.t), N, m, _BERN)


def _plans(sigma_max_abs, ts, eps):
    ts = np.asarray(ts, dtype=float)
    plans = {}
    Ns = np.empty(len(ts), dtype=np.int64)
    ms = np.empty(len(ts), dtype=np.int64)
    # plans depend on |t| only through a smooth bound; bucket to keep planning cheap
    for i, t in enumerate(ts):
        key = math.ceil(abs(t) / 8.0)
        if key not in plans:
            plans[key] = em_plan(sigma_max_abs, 8.0 * key + 1.0, eps)
        Ns[i], ms[i], _ = plans[key]
    return Ns, ms


def zeta_many(s, precision_target=1e-10):
    """Vectorized ``zeta`` over an array of complex points."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any((s.real == 1.0) & (s.imag == 0.0)):
        raise PoleError("zeta has a pole at s = 1")
    Ns = np.empty(len(s), dtype=np.int64)
    ms = np.empty(len(s), dtype=np.int64)
    cache = {}
    for i, z in enumerate(s):
        key = (round(z.real, 2), math.ceil(abs(z.imag) / 8.0))
        if key not in cache:
            cache[key] = em_plan(key[0] - 0.005, 8.0 * key[1] + 1.0, precision_target / 4)
        Ns[i], ms[i], _ = cache[key]
    return _zeta_points(s.real.copy(), s.imag.copy(), Ns, ms, _BERN)


def zeta_lines(sigmas, ts, precision_target=1e-10):
    """``zeta(sigma_k + i t_j)`` as an array of shape ``(len(ts), len(sigmas))``."""
    sigmas = np.asarray(sigmas, dtype=float)
    Ns, ms = _plans(float(sigmas.min()), ts, precision_target / 4)
    return _zeta_lines(sigmas, np.asarray(ts, dtype=float), Ns, ms, _BERN)


def zeta_derivative(s, radius=1e-2, nodes=16, precision_target=1e-12):
    """``zeta'(s)`` from a Cauchy integral over a small circle (trapezoid rule)."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    phi = 2 * np.pi * np.arange(nodes) / nodes
    ring = radius * np.exp(1j * phi)
    vals = zeta_many((s[:, None] + ring[None, :]).ravel(), precision_target).reshape(len(s), nodes)
    return (vals * np.exp(-1j * phi)[None, :]).mean(axis=1) / radius


# --- branch-tracked log zeta -------------------------------------------------------


def _path_nodes(sigma, h=0.05):
    n = max(2, math.ceil((PRINCIPAL_FROM - sigma) / h))
    return np.linspace(PRINCIPAL_FROM, sigma, n + 1)


def _refine_arg(sigma_a, sigma_b, za, t, eps, depth, zero_tol):
    """Continuous arg change of zeta from sigma_a to sigma_b on the line Im s = t."""
    zb = zeta(ComplexPoint(sigma_b, t), eps)
    d = cmath.phase(zb / za) if za != 0 and zb != 0 else math.nan
    if abs(zb) < zero_tol:
        return math.nan, zb
    if abs(d) < math.pi / 4:
        return d, zb
    if depth == 0:
        return math.nan, zb
    mid = 0.5 * (sigma_a + sigma_b)
    d1, zm = _refine_arg(sigma_a, mid, za, t, eps, depth - 1, zero_tol)
    d2, zb2 = _refine_arg(mid, sigma_b, zm, t, eps, depth - 1, zero_tol)
    return d1 + d2, zb2


def log_zeta_track(sigma, t, precision_target=1e-8, step=0.05, max_depth=14, zero_tol=1e-10):
    """``log zeta(sigma + i t)`` by continuous variation from the right.

    ``step`` is the initial node spacing on ``[sigma, 1.1]``; intervals whose
    argument change exceeds ``pi/4`` are bisected up to ``max_depth`` times.  A
    path that runs into a (near-)zero of zeta returns ``branch_ok=False``.
    """
    p = ComplexPoint(sigma, t)
    z0 = zeta(p, precision_target)
    if sigma >= PRINCIPAL_FROM:
        return LogZetaSample(p, cmath.log(z0), z0, True)
    nodes = _path_nodes(sigma, step)
    za = zeta(ComplexPoint(nodes[0], t), precision_target)
    arg = cmath.phase(za)
    for a, b in zip(nodes[:-1], nodes[1:]):
        d, za = _refine_arg(a, b, za, t, precision_target, max_depth, zero_tol)
        if math.isnan(d):
            return LogZetaSample(p, complex(math.nan, math.nan), z0, False)
        arg += d
    if abs(z0) == 0:
        return LogZetaSample(p, complex(math.nan, math.nan), z0, False)
    return LogZetaSample(p, complex(math.log(abs(z0)), arg), z0, True)


def log_zeta_batch(sigma, ts, precision_target=1e-8, step=0.05):
    """Vectorized :func:`log_zeta_track` over many heights.

    Returns ``(log_zeta, zeta, branch_ok)`` arrays.  All heights share one pass of
    the multi-node kernel; rows whose argument steps are large, or that come near
    a zero, are redone by the adaptive scalar tracker.
    """
    ts = np.asarray(ts, dtype=float)
    if sigma >= PRINCIPAL_FROM:
        z = zeta_lines([sigma], ts, precision_target)[:, 0]
        return np.log(z), z, np.ones(len(ts), dtype=bool)
    nodes = _path_nodes(sigma, step)
    Z = zeta_lines(nodes, ts, precision_target)
    d = np.angle(Z[:, 1:] / Z[:, :-1])
    arg = np.angle(Z[:, 0]) + d.sum(axis=1)
    z = Z[:, -1]
    logz = np.log(np.abs(z)) + 1j * arg
    ok = np.ones(len(ts), dtype=bool)
    suspect = (np.abs(d) >= np.pi / 4).any(axis=1) | (np.abs(Z).min(axis=1) < 1e-3)
    for i in np.flatnonzero(suspect):
        r = log_zeta_track(sigma, ts[i], precision_target, step / 4)
        logz[i] = r.log_zeta
        z[i] = r.zeta
        ok[i] = r.branch_ok
    return logz, z, ok


# --- Dirichlet polynomial R_Y --------------------------------------------------------


def dirichlet_R_Y(point, Y, table):
    """``R_Y(s) = sum_{p^k <= Y} 1 / (k p^{ks})``; ``point`` may be an array of complex s."""
    pp = table.prime_powers_upto(Y)
    if isinstance(point, ComplexPoint):
        s = np.array([point.s])
        scalar = True
    else:
        s = np.atleast_1d(np.asarray(point, dtype=complex))
        scalar = np.ndim(point) == 0
    if len(pp) == 0:
        out = np.zeros(len(s), dtype=complex)
    else:
        logq = np.log(pp[:, 2].astype(float))
        coef = 1.0 / pp[:, 1]
        amp = np.exp(-np.outer(s.real, logq)) * coef
        ph = np.outer(s.imag, logq)
        out = (amp * np.cos(ph)).sum(axis=1) - 1j * (amp * np.sin(ph)).sum(axis=1)
    return complex(out[0]) if scalar else out


def write_log_zeta_csv(path, ts, sigma, logz, ok):
    """Batch sampler output: ``t, sigma, re_log_zeta, im_log_zeta, branch_ok``."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "sigma", "re_log_zeta", "im_log_zeta", "branch_ok"])
        for t, lz, b in zip(ts, logz, ok):
            w.writerow([repr(float(t)), repr(float(sigma)), repr(float(lz.real)), repr(float(lz.imag)), int(b)])
