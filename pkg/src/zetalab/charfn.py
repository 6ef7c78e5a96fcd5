"""Characteristic function of the random model, one prime at a time and in aggregate.

For a single prime with ``w = p^-sigma`` and ``L = log(1 - w X)``,

    J(u, v, w) = E exp(-2i u Re L - 2i v Im L)
               = sum_{k,l} i^(k+l) / (k! l!) a_{k,l}(w) z^k conj(z)^l,     z = u + iv,

with ``a_{k,l}(w) = sum_t c_k(t) c_l(t) w^(2t)`` and ``c_k(t)`` the sum of
``1/(n_1...n_k)`` over compositions of ``t`` into ``k`` parts.  The logarithm has
the same shape with coefficients ``b_{k,l}(w)``.  Both are power series in
``q = w^2``; this module stores their coefficients, so sums over all primes
reduce to prime zeta values: ``sum_{p > P} b_{k,l}(p^-sigma) = sum_t beta_{k,l}(t) P_{>P}(2 t sigma)``.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import special

from .errors import DomainError, RadiusError
from .primes import default_table, prime_zeta, prime_zeta_tail, psi_exact

__all__ = [
    "composition_sums",
    "CoefficientSeries",
    "coefficient_series",
    "log_series_recurrence",
    "CoefficientTable",
    "coeff_a",
    "coeff_b",
    "J_quadrature",
    "J_quadrature_grid",
    "J_series",
    "PhiGrid",
    "phi_hat_grid",
    "phi_hat_rand",
    "aggregated_b",
    "a_tilde",
    "phi_hat_expansion",
    "bessel_report",
    "write_coefficient_csv",
    "write_phi_csv",
    "EXPANSION_RADIUS2",
]

EXPANSION_RADIUS2 = 0.04  # u^2 + v^2 bound for the truncated expansion


# --- composition sums and coefficient series ----------------------------------------


def composition_sums(K, t_max):
    """``c[k, t] = sum over compositions t = n_1+...+n_k of 1/(n_1...n_k)``; ``c[0, 0] = 1``."""
    c = np.zeros((K + 1, t_max + 1))
    c[0, 0] = 1.0
    inv = np.zeros(t_max + 1)
    inv[1:] = 1.0 / np.arange(1, t_max + 1)
    for k in range(1, K + 1):
        # c_k = c_{k-1} * (sum_n x^n / n), truncated
        c[k] = np.convolve(c[k - 1], inv)[: t_max + 1]
    return c


@njit(cache=True)
def _series_mul_acc(out, x, y, scale):
    T = len(out)
    for i in range(T):
        if x[i] == 0.0:
            continue
        for j in range(T - i):
            out[i + j] += scale * x[i] * y[j]


@njit(cache=True)
def _multinomial_log(F1, K, T):
    # b_{k,l} / (k! l!) = sum_n (-1)^(n-1)/n F_n[k,l], F_n the n-fold (k,l)-convolution of F1
    out = np.zeros((K + 1, K + 1, T + 1))
    Fn = F1.copy()
    for n in range(1, K + 1):
        sgn = 1.0 if n % 2 == 1 else -1.0
        out += (sgn / n) * Fn
        nxt = np.zeros_like(Fn)
        for k in range(n + 1, K + 1):
            for l in range(n + 1, K + 1):
                for k1 in range(1, k - n + 1):
                    for l1 in range(1, l - n + 1):
                        _series_mul_acc(nxt[k, l], F1[k1, l1], Fn[k - k1, l - l1], 1.0)
        Fn = nxt
    return out


@njit(cache=True)
def _log_recurrence(A, K, T):
    # formal log of a bivariate series with A[0,0] = 1: k B_kl = k A_kl - sum_{(i,j) != (k,l)} i B_ij A_{k-i,l-j}
    B = np.zeros((K + 1, K + 1, T + 1))
    for k in range(1, K + 1):
        for l in range(0, K + 1):
            acc = k * A[k, l].copy()
            for i in range(1, k + 1):
                for j in range(0, l + 1):
                    if i == k and j == l:
                        continue
                    _series_mul_acc(acc, B[i, j], A[k - i, l - j], -float(i))
            B[k, l] = acc / k
    return B


@dataclass(frozen=True)
class CoefficientSeries:
    """Power-series coefficients (in ``q = w^2``) of ``a_{k,l}`` and ``b_{k,l}`` for ``k, l <= K``."""

    K: int
    t_max: int
    alpha: np.ndarray  # (K+1, K+1, t_max+1)
    beta: np.ndarray

    def a(self, w):
        return np.polynomial.polynomial.polyval(w * w, np.moveaxis(self.alpha, 2, 0))

    def b(self, w):
        return np.polynomial.polynomial.polyval(w * w, np.moveaxis(self.beta, 2, 0))


@functools.lru_cache(maxsize=16)
def coefficient_series(K, t_max):
    c = composition_sums(K, t_max)
    alpha = c[:, None, :] * c[None, :, :]
    fk = np.array([math.factorial(k) for k in range(K + 1)], dtype=float)
    norm = fk[:, None] * fk[None, :]
    F1 = alpha / norm[:, :, None]
    F1[0, :, :] = 0.0
    F1[:, 0, :] = 0.0
    beta = _multinomial_log(F1, K, t_max) * norm[:, :, None]
    for arr in (alpha, beta):
        arr.setflags(write=False)
    return CoefficientSeries(K, t_max, alpha, beta)


def log_series_recurrence(K, t_max):
    """Independent route to ``beta``: formal logarithm by the derivative recurrence."""
    c = composition_sums(K, t_max)
    fk = np.array([math.factorial(k) for k in range(K + 1)], dtype=float)
    norm = fk[:, None] * fk[None, :]
    A = (c[:, None, :] * c[None, :, :]) / norm[:, :, None]
    return _log_recurrence(A, K, t_max) * norm[:, :, None]


# --- coefficient tables at a fixed w ------------------------------------------------------


@dataclass(frozen=True)
class CoefficientTable:
    w: float
    K: int
    t_max: int
    a: np.ndarray
    b: np.ndarray | None = None
    a_tail_bound: float = 0.0

    @property
    def C_w(self):
        """``C_r`` at ``r = w``: ``|a_{k,l}(w)| <= (C_w w)^(k+l)``."""
        return -math.log1p(-self.w) / self.w


def _auto_t_max(w, eps=1e-17):
    return max(8, math.ceil(math.log(eps) / (2 * math.log(w))) + 4)


def _a_tail(w, K, t_max):
    # c_k(t) <= H_t^k, so the omitted terms are at most sum_{t > t_max} H_t^(k+l) w^(2t)
    t = np.arange(t_max + 1, t_max + 4000)
    H = special.digamma(t + 1.0) + np.euler_gamma
    return float(np.sum(np.exp(2 * K * np.log(H) + 2.0 * t * math.log(w))))


def coeff_a(w, K=8, t_max=None):
    """``a_{k,l}(w)`` for ``0 <= k, l <= K`` from the composition-sum formula."""
    if not 0 < w < 1:
        raise DomainError("w must lie in (0, 1)")
    if K > 16:
        raise DomainError("K must be at most 16")
    auto = t_max is None
    t_max = t_max or _auto_t_max(w)
    bound = _a_tail(w, K, t_max)
    while auto and bound > 1e-17 and t_max < 1000:
        t_max = int(1.5 * t_max)
        bound = _a_tail(w, K, t_max)
    ser = coefficient_series(K, t_max)
    a = ser.a(w)
    a.setflags(write=False)
    return CoefficientTable(float(w), K, t_max, a, None, bound)


def coeff_b(table):
    """Fill in ``b_{k,l}(w)`` by the multinomial expansion of ``log J``."""
    ser = coefficient_series(table.K, table.t_max)
    b = ser.b(table.w)
    b[0, :] = 0.0
    b[:, 0] = 0.0
    b.setflags(write=False)
    return CoefficientTable(table.w, table.K, table.t_max, table.a, b, table.a_tail_bound)


# --- J by quadrature ---------------------------------------------------------------------


def _log_factor(theta, w):
    L = np.log1p(-w * np.exp(1j * theta))
    return L.real, L.imag


def J_quadrature(u, v, w, tol=1e-12, n0=32, n_max=1 << 16):
    """``(1/2pi) int exp(-2iu Re L - 2iv Im L) dtheta`` by the periodic trapezoid rule."""
    if not 0 < w < 1:
        raise DomainError("w must lie in (0, 1)")
    n = n0
    prev = None
    while True:
        A, B = _log_factor(2 * np.pi * np.arange(n) / n, w)
        val = complex(np.mean(np.exp(-2j * (u * A + v * B))))
        if prev is not None and abs(val - prev) < tol:
            return val
        if n >= n_max:
            return val
        prev = val
        n *= 2


def J_quadrature_grid(us, vs, w, tol=1e-13, n0=32, n_max=1 << 14):
    """``J(u_i, v_j, w)`` on a tensor grid as one complex matrix product per node count."""
    us = np.asarray(us, dtype=float)
    vs = np.asarray(vs, dtype=float)
    n = n0
    prev = None
    while True:
        A, B = _log_factor(2 * np.pi * np.arange(n) / n, w)
        Eu = np.exp(-2j * np.outer(A, us))
        Ev = np.exp(-2j * np.outer(B, vs))
        val = (Eu.T @ Ev) / n
        if prev is not None and np.max(np.abs(val - prev)) < tol:
            return val
        if n >= n_max:
            return val
        prev = val
        n *= 2


# --- J by series -------------------------------------------------------------------------


def _exp_tail(x, K):
    # sum_{k > K} x^k / k!
    return max(0.0, math.exp(x) - sum(x**k / math.factorial(k) for k in range(K + 1)))


def J_series(u, v, table, tol=1e-9):
    """Truncated double series for ``J``; refuses when the certified tail exceeds ``tol``.

    The tail bound uses ``|a_{k,l}(w)| <= lam^(k+l)`` with ``lam = -log(1-w)``
    (``|L| <= lam`` pointwise).
    """
    z = complex(u, v)
    lam = -math.log1p(-table.w)
    x = lam * abs(z)
    head = sum(x**k / math.factorial(k) for k in range(table.K + 1))
    bound = math.exp(2 * x) - head * head + table.a_tail_bound * math.exp(2 * abs(z))
    if bound > tol:
        raise RadiusError(f"series tail bound {bound:.3g} exceeds {tol:g}", bound=bound)
    K = table.K
    zk = z ** np.arange(K + 1)
    zbl = np.conj(z) ** np.arange(K + 1)
    fk = np.array([math.factorial(k) for k in range(K + 1)], dtype=float)
    ipow = 1j ** (np.arange(K + 1)[:, None] + np.arange(K + 1)[None, :])
    terms = ipow * table.a / (fk[:, None] * fk[None, :]) * zk[:, None] * zbl[None, :]
    return complex(terms.sum())


# --- the full product ------------------------------------------------------------------------

_SERIES_THRESHOLD = 0.25  # primes with pi * w * |z| below this go through the aggregated log-series


def aggregated_b(sigma, K, t_max, p_cut=None, table=None):
    """``B_{k,l} = sum_{p > p_cut} b_{k,l}(p^-sigma)`` (all primes if ``p_cut`` is None)."""
    ser = coefficient_series(K, t_max)
    tsum = np.zeros(t_max + 1)
    for t in range(1, t_max + 1):
        s = 2 * t * sigma
        if s <= 1:
            tsum[t] = math.inf
            continue
        tsum[t] = prime_zeta(s) if p_cut is None else prime_zeta_tail(s, p_cut, table)
    B = np.zeros((K + 1, K + 1))
    for k in range(1, K + 1):
        for l in range(1, K + 1):
            beta = ser.beta[k, l]
            nz = beta != 0
            B[k, l] = math.fsum((beta[nz] * tsum[nz]).tolist())
    return B


def _log_series_eval(B, zs):
    """``sum_{k,l} (i pi)^(k+l) B_kl z^k conj(z)^l / (k! l!)`` for an array of ``z``."""
    K = B.shape[0] - 1
    zk = (np.pi * zs)[..., None] ** np.arange(K + 1)
    zl = np.conj(zk)
    fk = np.array([math.factorial(k) for k in range(K + 1)], dtype=float)
    C = (1j ** (np.arange(K + 1)[:, None] + np.arange(K + 1)[None, :])) * B / (fk[:, None] * fk[None, :])
    return np.einsum("...k,kl,...l->...", zk, C, zl)


@dataclass(frozen=True)
class PhiGrid:
    us: np.ndarray
    vs: np.ndarray
    values: np.ndarray  # (len(us), len(vs))
    sigma: float
    p_cut: int
    series_K: int
    tail_error: float


def _default_p_cut(sigma, radius):
    return max(100, math.ceil((np.pi * max(radius, 1e-3) / _SERIES_THRESHOLD) ** (1.0 / sigma)))


def _series_error(sigma, K, t_max, p_cut, table, radius):
    # change in the log-series when its last two powers of w^2 are dropped
    zs = radius * np.exp(1j * np.linspace(0, np.pi / 2, 7))
    B1 = aggregated_b(sigma, K, t_max, p_cut, table)
    B0 = aggregated_b(sigma, K, t_max - 2, p_cut, table)
    return float(np.abs(_log_series_eval(B1 - B0, zs)).max())


def phi_hat_grid(us, vs, sigma, p_cut=None, K=10, skip_below=1e-18, table=None):
    """``Phi_rand(u_i, v_j) = prod_p J(pi u_i, pi v_j, p^-sigma)`` on a tensor grid.

    Primes up to ``p_cut`` are handled by quadrature, the rest by the aggregated
    log-series.  Only nonnegative ``u, v`` are computed; the rest follow from
    ``Phi(u, -v) = Phi(u, v)`` and ``Phi(-u, v) = conj Phi(u, v)``, which therefore
    hold exactly.
    """
    if sigma <= 0.5:
        raise DomainError("sigma must exceed 1/2")
    us = np.atleast_1d(np.asarray(us, dtype=float))
    vs = np.atleast_1d(np.asarray(vs, dtype=float))
    ua, iu = np.unique(np.abs(us), return_inverse=True)
    va, iv = np.unique(np.abs(vs), return_inverse=True)
    radius = float(math.hypot(ua.max(), va.max()))
    if p_cut is None:
        p_cut = _default_p_cut(sigma, radius)
    if table is None or table.limit < 4 * p_cut:
        table = default_table(max(10**6, 4 * int(p_cut)))
    t_max = max(K + 2, math.ceil(math.log(1e-18) / (2 * -sigma * math.log(max(p_cut, 2)))) + 2)
    B = aggregated_b(sigma, K, t_max, p_cut, table)
    Z = ua[:, None] + 1j * va[None, :]
    logtail = _log_series_eval(B, Z)
    G = np.exp(logtail.real) * np.exp(1j * logtail.imag)
    err = _series_error(sigma, K, t_max, p_cut, table, radius)
    for p in table.primes_upto(p_cut):
        w = float(p) ** (-sigma)
        alive = np.abs(G) > skip_below
        if not alive.any():
            break
        rows = np.flatnonzero(alive.any(axis=1))
        cols = np.flatnonzero(alive.any(axis=0))
        Jp = J_quadrature_grid(np.pi * ua[rows], np.pi * va[cols], w)
        G[np.ix_(rows, cols)] *= Jp
    G[np.abs(G) <= skip_below * 1e-3] = 0.0
    out = G[iu][:, iv]
    neg = us < 0
    out[neg] = np.conj(out[neg])
    return PhiGrid(us, vs, out, float(sigma), int(p_cut), K, err)


def phi_hat_rand(u, v, sigma, table=None, p_cut=None):
    return complex(phi_hat_grid([u], [v], sigma, p_cut=p_cut, table=table).values[0, 0])


# --- the truncated expansion near the origin -----------------------------------------------


@functools.lru_cache(maxsize=64)
def _a_tilde_cached(sigma, order):
    K = order - 1
    t_max = max(16, math.ceil(math.log(1e-18) / (2 * -sigma * math.log(2))) + 4)
    B = aggregated_b(sigma, K, t_max)
    out = {}
    for k in range(1, K + 1):
        for l in range(1, K + 1):
            if 3 <= k + l <= order:
                out[(k, l)] = (1j * np.pi) ** (k + l) / (math.factorial(k) * math.factorial(l)) * B[k, l]
    return out


def a_tilde(sigma, order=5):
    """``a~_{k,l}(sigma) = (pi i)^(k+l)/(k! l!) sum_p b_{k,l}(p^-sigma)`` for ``3 <= k+l <= order``."""
    if sigma <= 0.5:
        raise DomainError("sigma must exceed 1/2")
    return dict(_a_tilde_cached(float(sigma), int(order)))


def phi_hat_expansion(u, v, sigma, order=5, radius2=EXPANSION_RADIUS2, psi_value=None):
    """``exp(-pi^2 |z|^2 psi) (1 + sum_{3 <= k+l <= order} a~_{k,l} z^k conj(z)^l)``."""
    if u * u + v * v > radius2:
        raise RadiusError(f"u^2+v^2 = {u*u+v*v:g} exceeds the expansion radius {radius2:g}", bound=radius2)
    z = complex(u, v)
    ps = psi_exact(sigma) if psi_value is None else psi_value
    poly = 1.0 + sum(c * z**k * np.conj(z) ** l for (k, l), c in a_tilde(sigma, order).items())
    return complex(math.exp(-np.pi**2 * abs(z) ** 2 * ps) * poly)


# --- reports and exports ------------------------------------------------------------------------


def bessel_report(w, radii, angles=(0.0, 0.7, 1.3)):
    """``|J(z, w) - J0(2 w |z|)|`` over rays; a small-``w`` comparison only."""
    rows = []
    for r in radii:
        for a in angles:
            J = J_quadrature(r * math.cos(a), r * math.sin(a), w)
            rows.append((r, a, J, float(special.j0(2 * w * r)), abs(J - special.j0(2 * w * r))))
    return rows


def write_coefficient_csv(path, table):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["w", "k", "l", "a", "b"])
        for k in range(table.K + 1):
            for l in range(table.K + 1):
                b = table.b[k, l] if table.b is not None else ""
                wr.writerow([repr(table.w), k, l, repr(float(table.a[k, l])), repr(float(b)) if b != "" else ""])


def write_phi_csv(path, grid):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["u", "v", "re", "im"])
        for i, u in enumerate(grid.us):
            for j, v in enumerate(grid.vs):
                z = grid.values[i, j]
                wr.writerow([repr(float(u)), repr(float(v)), repr(float(z.real)), repr(float(z.imag))])
