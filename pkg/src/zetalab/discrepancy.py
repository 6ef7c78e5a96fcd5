"""Empirical law of ``log zeta(sigma + it)`` for ``t`` in ``[T, 2T]`` against the random model.

Heights are equally spaced with one random offset, ``t_j = T + (j + u) T / n``.
Heights where the logarithm could not be continued reliably (too close to a
zero) are excluded and counted.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import rng
from .charfn import phi_hat_grid
from .errors import CoverageError, DomainError
from .zeta import log_zeta_batch

__all__ = [
    "EmpiricalDistribution2D",
    "empirical_log_zeta",
    "DiscrepancyResult",
    "estimate_discrepancy",
    "CharFnComparison",
    "compare_char_functions",
    "empirical_char_function",
    "MAX_EXCLUDED_FRACTION",
]

MAX_EXCLUDED_FRACTION = 0.01


@dataclass
class EmpiricalDistribution2D:
    samples: np.ndarray  # complex log zeta values (excluded rows included, flagged)
    excluded: np.ndarray  # bool
    ts: np.ndarray
    window: tuple
    sigma: float
    seed: int | None = None

    @property
    def n_total(self):
        return len(self.samples)

    @property
    def n_excluded(self):
        return int(self.excluded.sum())

    @property
    def valid(self):
        return self.n_excluded <= MAX_EXCLUDED_FRACTION * self.n_total

    def points(self):
        """Complex samples that count (excluded heights dropped)."""
        return self.samples[~self.excluded]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "re", "im", "excluded"])
            for t, z, e in zip(self.ts, self.samples, self.excluded):
                wr.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag)), int(e)])

    @classmethod
    def from_points(cls, points, sigma, window=(math.nan, math.nan)):
        """Wrap arbitrary complex samples (e.g. random-model draws)."""
        pts = np.asarray(points, dtype=complex)
        return cls(pts, np.zeros(len(pts), dtype=bool), np.full(len(pts), math.nan), tuple(window), float(sigma))


def empirical_log_zeta(sigma, T, n, seed, precision_target=1e-8):
    """Sample ``log zeta(sigma + i t_j)`` on the offset grid over ``[T, 2T]``."""
    if n < 1 or T <= 0:
        raise DomainError("need n >= 1 and T > 0")
    offset = rng.uniform(seed, 0)
    ts = T + (np.arange(n) + offset) * (T / n)
    logz, _, ok = log_zeta_batch(sigma, ts, precision_target)
    return EmpiricalDistribution2D(logz, ~ok, ts, (float(T), 2.0 * T), float(sigma), seed)


# --- rectangle scan -----------------------------------------------------------------------


@njit(cache=True)
def _max_rect(D):
    """Largest ``|sum|`` of ``D`` over index rectangles; returns ``(value, i0, i1, j0, j1)`` (inclusive)."""
    nx, ny = D.shape
    best = -1.0
    bi0 = bi1 = bj0 = bj1 = 0
    col = np.empty(ny)
    for i0 in range(nx):
        col[:] = 0.0
        for i1 in range(i0, nx):
            for j in range(ny):
                col[j] += D[i1, j]
            # Kadane for the maximum and for the minimum at once
            cur_max = 0.0
            cur_min = 0.0
            s_max = 0
            s_min = 0
            for j in range(ny):
                if cur_max <= 0.0:
                    cur_max = col[j]
                    s_max = j
                else:
                    cur_max += col[j]
                if cur_min >= 0.0:
                    cur_min = col[j]
                    s_min = j
                else:
                    cur_min += col[j]
                if cur_max > best:
                    best = cur_max
                    bi0, bi1, bj0, bj1 = i0, i1, s_max, j
                if -cur_min > best:
                    best = -cur_min
                    bi0, bi1, bj0, bj1 = i0, i1, s_min, j
    return best, bi0, bi1, bj0, bj1


@dataclass(frozen=True)
class DiscrepancyResult:
    value: float  # sup over the discretized rectangle family
    certificate: tuple  # (x0, x1, y0, y1)
    empirical_mass: float
    model_mass: float
    discretization_bound: float  # how far the true sup can exceed ``value``
    sampling_error: float  # typical size of the statistic for exact samples, ~ 1/sqrt(n)
    n_used: int
    n_excluded: int
    n_cells: int
    extra: dict = field(default_factory=dict)

    def row(self):
        x0, x1, y0, y1 = self.certificate
        return {
            "D_hat": self.value,
            "x0": x0,
            "x1": x1,
            "y0": y0,
            "y1": y1,
            "empirical_mass": self.empirical_mass,
            "model_mass": self.model_mass,
            "discretization_bound": self.discretization_bound,
            "sampling_error": self.sampling_error,
            "n_used": self.n_used,
            "n_excluded": self.n_excluded,
            "n_cells": self.n_cells,
        }

    def to_csv(self, path):
        row = self.row()
        with open(path, "w", newline="") as fh:
            wr = csv.DictWriter(fh, fieldnames=list(row))
            wr.writeheader()
            wr.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def _cuts(values, lo, hi, n_cells):
    q = np.quantile(values, np.linspace(0, 1, n_cells + 1)[1:-1])
    inner = np.unique(np.concatenate([q, [lo, hi]]))
    return np.concatenate([[-np.inf], inner, [np.inf]])


def estimate_discrepancy(emp, model, n_cells=256, coverage_tol=1e-4):
    """``sup_B |P_emp(B) - P_model(B)|`` over rectangles with corners on a coordinate set.

    The coordinate set holds ``n_cells - 1`` sample quantiles per axis plus the
    mesh edges; rectangles may be unbounded.  Every rectangle is sandwiched
    between two family members differing by at most four coordinate slabs, so
    the true supremum exceeds ``value`` by at most ``discretization_bound``.
    """
    if not emp.valid:
        raise DomainError(f"{emp.n_excluded} of {emp.n_total} heights excluded (limit {MAX_EXCLUDED_FRACTION:.0%})")
    pts = emp.points()
    n = len(pts)
    if n == 0:
        raise DomainError("no samples")
    xs, ys = model.x_nodes, model.y_nodes
    C = model.cdf_table()
    total = float(C[-1, -1])
    ring = total - (C[-2, -2] - C[1, -2] - C[-2, 1] + C[1, 1])
    outside = np.mean((pts.real < xs[0]) | (pts.real > xs[-1]) | (pts.imag < ys[0]) | (pts.imag > ys[-1]))
    if ring > coverage_tol or outside > 10 * coverage_tol + 3 / n:
        raise CoverageError(
            f"model mesh [{xs[0]:.2f}, {xs[-1]:.2f}]^2 too small: edge mass {ring:.1e}, samples outside {outside:.1e}"
        )
    cx = _cuts(pts.real, xs[0], xs[-1], n_cells)
    cy = _cuts(pts.imag, ys[0], ys[-1], n_cells)
    H, _, _ = np.histogram2d(pts.real, pts.imag, bins=[cx, cy])
    H /= n
    # model cell masses from the CDF (clamped at the mesh; normalized to total mass)
    CX, CY = np.meshgrid(cx, cy, indexing="ij")
    G = model.cdf(CX, CY, C) / total
    M = G[1:, 1:] - G[:-1, 1:] - G[1:, :-1] + G[:-1, :-1]
    D = H - M
    val, i0, i1, j0, j1 = _max_rect(D)
    slab = max(
        float(np.maximum(H.sum(axis=1), M.sum(axis=1)).max()),
        float(np.maximum(H.sum(axis=0), M.sum(axis=0)).max()),
    )
    cert = (float(cx[i0]), float(cx[i1 + 1]), float(cy[j0]), float(cy[j1 + 1]))
    return DiscrepancyResult(
        float(val),
        cert,
        float(H[i0 : i1 + 1, j0 : j1 + 1].sum()),
        float(M[i0 : i1 + 1, j0 : j1 + 1].sum()),
        4 * slab,
        1.0 / math.sqrt(n),
        n,
        emp.n_excluded,
        int(D.size),
        {"model_mass_defect": abs(total - 1.0)},
    )


# --- characteristic functions -------------------------------------------------------------------


def empirical_char_function(points, us, vs):
    """``mean exp(2 pi i (u Re z + v Im z))`` on the tensor grid, with standard errors."""
    pts = np.asarray(points, dtype=complex)
    us = np.atleast_1d(np.asarray(us, dtype=float))
    vs = np.atleast_1d(np.asarray(vs, dtype=float))
    Eu = np.exp(2j * np.pi * np.outer(us, pts.real))
    Ev = np.exp(2j * np.pi * np.outer(vs, pts.imag))
    n = len(pts)
    phi = (Eu @ Ev.T) / n
    second = (np.abs(Eu) ** 2 @ (np.abs(Ev) ** 2).T) / n  # = 1 exactly; kept for clarity
    se = np.sqrt(np.maximum(second - np.abs(phi) ** 2, 0.0) / max(n - 1, 1))
    return phi, se


@dataclass
class CharFnComparison:
    sigma: float
    T: float
    us: np.ndarray
    vs: np.ndarray
    empirical: np.ndarray
    model: np.ndarray
    se: np.ndarray
    model_error: float
    n_used: int
    n_excluded: int
    range_limit: float

    @property
    def gap(self):
        return np.abs(self.empirical - self.model)

    def within(self, floor=0.02, n_se=3.0):
        return self.gap <= np.maximum(n_se * self.se, floor) + self.model_error

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["u", "v", "emp_re", "emp_im", "model_re", "model_im", "gap", "se", "model_error"])
            for i, u in enumerate(self.us):
                for j, v in enumerate(self.vs):
                    e, m = self.empirical[i, j], self.model[i, j]
                    wr.writerow([repr(float(u)), repr(float(v)), repr(e.real), repr(e.imag), repr(m.real), repr(m.imag),
                                 repr(float(abs(e - m))), repr(float(self.se[i, j])), repr(self.model_error)])


def compare_char_functions(sigma, T, n_t, us, vs, seed, theta_L=0.2, emp=None, enforce_range=True):
    """Empirical ``Phi_T(u, v)`` on ``[T, 2T]`` next to the model's ``Phi_rand(u, v)``.

    The transform is taken of ``log zeta``.  ``|u|, |v|`` must stay within
    ``(log T)^theta_L``.
    """
    us = np.atleast_1d(np.asarray(us, dtype=float))
    vs = np.atleast_1d(np.asarray(vs, dtype=float))
    limit = math.log(T) ** theta_L
    if enforce_range and max(np.abs(us).max(), np.abs(vs).max()) > limit:
        raise DomainError(f"(u, v) grid exceeds (log T)^{theta_L} = {limit:.3f}")
    if emp is None:
        emp = empirical_log_zeta(sigma, T, n_t, seed)
    if not emp.valid:
        raise DomainError(f"{emp.n_excluded} of {emp.n_total} heights excluded")
    phi, se = empirical_char_function(emp.points(), us, vs)
    grid = phi_hat_grid(us, vs, sigma)
    return CharFnComparison(float(sigma), float(T), us, vs, phi, grid.values, se, float(grid.tail_error),
                            len(emp.points()), emp.n_excluded, limit)
