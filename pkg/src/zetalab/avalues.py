"""Solutions of ``zeta(s) = a``: counting, locating, and Littlewood's lemma.

Counting uses the argument principle: the change of ``arg(zeta - a)`` around a
rectangle, tracked with adaptively refined steps, divided by ``2 pi``, plus one
if the pole at ``s = 1`` lies inside.  Roots are listed by bisecting rectangles
until each holds a single root, which Newton's method then polishes.

Counting convention: a-values are counted with ``0 < gamma``; a bottom edge on
the real axis is moved up by ``AXIS_OFFSET`` (real a-values and the pole sit on
that axis).
"""

from __future__ import annotations

import cmath
import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, special

from .errors import BoundaryError, DomainError, PartialResultError, PoleError, RefinementError
from .primes import psi_exact, sigma_T
from .zeta import SIGMA_MAX, SIGMA_MIN, T_MAX, zeta_derivative, zeta_many

__all__ = [
    "ComplexRect",
    "AValueReport",
    "count_avalues",
    "winding_number",
    "newton_avalue",
    "LittlewoodResult",
    "littlewood_integral",
    "LittlewoodBalance",
    "littlewood_balance",
    "littlewood_asymptotic",
    "littlewood_mean_sampled",
    "predict_count",
    "RegionReport",
    "region_decomposition_integrals",
    "AXIS_OFFSET",
]

AXIS_OFFSET = 1e-2
_PRECISION = 1e-11


@dataclass(frozen=True)
class ComplexRect:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self):
        if not (self.sigma_min < self.sigma_max and self.t_min < self.t_max):
            raise DomainError(f"degenerate rectangle {self}")

    def check_box(self):
        if self.sigma_min < SIGMA_MIN or self.sigma_max > SIGMA_MAX or max(abs(self.t_min), abs(self.t_max)) > T_MAX:
            raise DomainError(f"{self} leaves the evaluator box")

    def contains(self, s, strict=True):
        if strict:
            return self.sigma_min < s.real < self.sigma_max and self.t_min < s.imag < self.t_max
        return self.sigma_min <= s.real <= self.sigma_max and self.t_min <= s.imag <= self.t_max

    def reflect(self):
        return ComplexRect(self.sigma_min, self.sigma_max, -self.t_max, -self.t_min)

    def split(self, at=0.5):
        """Halve along the longer side (in units where a unit of t equals a unit of sigma)."""
        if self.sigma_max - self.sigma_min >= self.t_max - self.t_min:
            m = self.sigma_min + at * (self.sigma_max - self.sigma_min)
            return ComplexRect(self.sigma_min, m, self.t_min, self.t_max), ComplexRect(m, self.sigma_max, self.t_min, self.t_max)
        m = self.t_min + at * (self.t_max - self.t_min)
        return ComplexRect(self.sigma_min, self.sigma_max, self.t_min, m), ComplexRect(self.sigma_min, self.sigma_max, m, self.t_max)

    def quadrants(self):
        sm = 0.5 * (self.sigma_min + self.sigma_max)
        tm = 0.5 * (self.t_min + self.t_max)
        return [
            ComplexRect(self.sigma_min, sm, self.t_min, tm),
            ComplexRect(sm, self.sigma_max, self.t_min, tm),
            ComplexRect(self.sigma_min, sm, tm, self.t_max),
            ComplexRect(sm, self.sigma_max, tm, self.t_max),
        ]

    @property
    def center(self):
        return complex(0.5 * (self.sigma_min + self.sigma_max), 0.5 * (self.t_min + self.t_max))

    @property
    def size(self):
        return max(self.sigma_max - self.sigma_min, self.t_max - self.t_min)


@dataclass
class AValueReport:
    a: complex
    rect: ComplexRect  # rectangle actually integrated over (after any perturbation)
    count: int
    roots: list  # (beta, gamma, residual)
    prediction_main: float = math.nan
    prediction_error_scale: float = math.nan
    requested_rect: ComplexRect | None = None
    winding_residual: float = 0.0
    poles_inside: int = 0
    notes: list = field(default_factory=list)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["beta", "gamma", "residual"])
            for b, g, r in self.roots:
                wr.writerow([repr(b), repr(g), repr(r)])

    def summary(self):
        return {
            "a": [self.a.real, self.a.imag],
            "rect": [self.rect.sigma_min, self.rect.sigma_max, self.rect.t_min, self.rect.t_max],
            "requested_rect": None
            if self.requested_rect is None
            else [self.requested_rect.sigma_min, self.requested_rect.sigma_max, self.requested_rect.t_min, self.requested_rect.t_max],
            "count": self.count,
            "n_roots_listed": len(self.roots),
            "winding_residual": self.winding_residual,
            "poles_inside": self.poles_inside,
            "prediction_main": self.prediction_main,
            "prediction_error_scale": self.prediction_error_scale,
            "gap": self.count - self.prediction_main if math.isfinite(self.prediction_main) else None,
            "notes": self.notes,
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2)


# --- argument tracking ---------------------------------------------------------------


def _f(a):
    def f(s):
        return zeta_many(s, _PRECISION) - a

    return f


def _track_segment(f, s0, s1, clearance, n0, edge, max_nodes=400_000):
    """Total change of ``arg f`` from ``s0`` to ``s1`` plus the smallest ``|f|`` seen.

    Intervals are bisected until ``|f(b) - f(a)| < min(|f(a)|, |f(b)|) / 2``;
    then the segment ``f([a, b])`` stays in a half-plane avoiding 0 (for locally
    linear ``f``) and each step changes the argument by less than ``pi/6``.
    """
    tau = np.linspace(0.0, 1.0, n0 + 1)
    F = f(s0 + (s1 - s0) * tau)
    span = abs(s1 - s0)
    while True:
        absF = np.abs(F)
        if absF.min() < clearance:
            raise BoundaryError(f"|zeta - a| = {absF.min():.2e} on the {edge} edge", edge=edge, clearance=float(absF.min()))
        bad = np.abs(np.diff(F)) >= 0.5 * np.minimum(absF[1:], absF[:-1])
        if not bad.any():
            break
        if len(tau) > max_nodes or np.diff(tau)[bad].min() * span < 1e-13:
            raise RefinementError(f"argument tracking on the {edge} edge did not settle")
        mids = 0.5 * (tau[:-1][bad] + tau[1:][bad])
        Fm = f(s0 + (s1 - s0) * mids)
        tau = np.concatenate([tau, mids])
        F = np.concatenate([F, Fm])
        order = np.argsort(tau, kind="stable")
        tau, F = tau[order], F[order]
    return float(np.angle(F[1:] / F[:-1]).sum()), float(np.abs(F).min()), tau, F


def _edges(rect):
    z0 = complex(rect.sigma_min, rect.t_min)
    z1 = complex(rect.sigma_max, rect.t_min)
    z2 = complex(rect.sigma_max, rect.t_max)
    z3 = complex(rect.sigma_min, rect.t_max)
    return [("bottom", z0, z1), ("right", z1, z2), ("top", z2, z3), ("left", z3, z0)]


def _nodes_for(s0, s1):
    L = abs(s1 - s0)
    t = max(abs(s0.imag), abs(s1.imag), 3.0)
    return max(16, math.ceil(L * (4 + math.log(t))))


def winding_number(a, rect, clearance=1e-6, check_halving=True):
    """``(1/2 pi) Delta arg (zeta - a)`` around ``rect`` (counterclockwise).

    Returns ``(winding, residual)`` with ``residual`` the distance of the raw
    winding from the nearest integer.
    """
    f = _f(a)
    total = 0.0
    for name, s0, s1 in _edges(rect):
        try:
            d, _, tau, F = _track_segment(f, s0, s1, clearance, _nodes_for(s0, s1), name)
        except PoleError as exc:
            raise BoundaryError(f"pole on the {name} edge", edge=name, clearance=0.0) from exc
        if check_halving:
            mids = 0.5 * (tau[:-1] + tau[1:])
            Fm = f(s0 + (s1 - s0) * mids)
            both = np.empty(2 * len(F) - 1, dtype=complex)
            both[0::2] = F
            both[1::2] = Fm
            d2 = float(np.angle(both[1:] / both[:-1]).sum())
            if abs(d2 - d) > 1e-6:
                raise RefinementError(f"winding on the {name} edge changed under step halving ({d} vs {d2})")
        total += d
    w = total / (2 * math.pi)
    n = round(w)
    return int(n), abs(w - n)


def _poles_inside(rect):
    return int(rect.sigma_min < 1.0 < rect.sigma_max and rect.t_min < 0.0 < rect.t_max)


def newton_avalue(a, s, rect=None, tol=1e-13, max_iter=60):
    """Newton iteration for ``zeta(s) = a``; returns ``(root, residual)`` or ``None``."""
    if s == 1:
        s = complex(1.0, 0.25 * rect.size if rect else 1e-3)
    try:
        return _newton(a, s, rect, tol, max_iter)
    except PoleError:
        return None


def _newton(a, s, rect, tol, max_iter):
    for _ in range(max_iter):
        fs = zeta_many([s], _PRECISION)[0] - a
        if abs(fs) < tol:
            break
        d = zeta_derivative([s], radius=min(1e-2, 0.25 * (rect.size if rect else 1e-2)), precision_target=_PRECISION)[0]
        if d == 0:
            return None
        step = fs / d
        s = s - step
        if rect is not None and not rect.contains(s, strict=False):
            return None
        if abs(step) < 1e-15 * max(1.0, abs(s)):
            break
    res = abs(zeta_many([s], _PRECISION)[0] - a)
    return (s, res) if res <= 1e-8 else None


def _count_with_nudges(a, rect, clearance, max_tries=6):
    """Count in ``rect``, moving an edge that touches an a-value slightly inward."""
    r = rect
    for k in range(max_tries):
        try:
            w, res = winding_number(a, r, clearance)
            return w + _poles_inside(r), res, r
        except BoundaryError as exc:
            shift = 1e-4 * r.size * 3**k
            r = _shift_edge(r, exc.edge, shift)
    raise BoundaryError(f"could not find a clear boundary near {rect}")


def _shift_edge(r, edge, shift):
    if edge == "bottom":
        return replace(r, t_min=r.t_min + shift)
    if edge == "top":
        return replace(r, t_max=r.t_max - shift)
    if edge == "left":
        return replace(r, sigma_min=r.sigma_min + shift)
    return replace(r, sigma_max=r.sigma_max - shift)


def _locate(a, rect, count, clearance, depth=0, out=None):
    out = [] if out is None else out
    if count <= 0:
        return out
    if count == 1 or rect.size < 1e-9:
        hit = newton_avalue(a, rect.center, rect)
        if hit is not None and rect.contains(hit[0]):
            out.extend([(float(hit[0].real), float(hit[0].imag), float(hit[1]))] * count)
            return out
        if rect.size < 1e-9 or depth > 60:
            raise RefinementError(f"could not isolate {count} root(s) in {rect}")
    for at in (0.5, 0.4871, 0.5379, 0.4419):
        halves = rect.split(at)
        try:
            counts = [winding_number(a, h, clearance)[0] + _poles_inside(h) for h in halves]
        except (BoundaryError, RefinementError):
            continue
        if sum(counts) != count:
            raise RefinementError(f"subdivision counts {counts} do not add up to {count} in {rect}")
        for h, c in zip(halves, counts):
            _locate(a, h, c, clearance, depth + 1, out)
        return out
    raise RefinementError(f"no clear split line found for {rect}")


def count_avalues(a, rect, refine=True, clearance=1e-6, auto_perturb=True, theta=None, T=None):
    """Number of solutions of ``zeta(s) = a`` inside ``rect`` (and their locations).

    With ``auto_perturb`` an edge lying on the real axis is moved to
    ``t = +/- AXIS_OFFSET`` and any edge passing within ``clearance`` of an
    a-value is nudged inward; the rectangle actually used is ``report.rect``.
    ``theta`` and ``T`` attach the main term and error scale of the prediction.
    """
    a = complex(a)
    if a == 0:
        raise DomainError("a must be nonzero")
    rect.check_box()
    notes = []
    r = rect
    if auto_perturb:
        if r.t_min == 0.0:
            r = replace(r, t_min=AXIS_OFFSET)
            notes.append(f"bottom edge moved to t={AXIS_OFFSET} (count convention 0 < gamma)")
        if r.t_max == 0.0:
            r = replace(r, t_max=-AXIS_OFFSET)
            notes.append(f"top edge moved to t=-{AXIS_OFFSET}")
        count, res, used = _count_with_nudges(a, r, clearance)
        if used != r:
            notes.append("edge nudged off a nearby a-value")
        r = used
    else:
        w, res = winding_number(a, r, clearance)
        count = w + _poles_inside(r)
    roots = []
    if refine and count > 0:
        roots = sorted(_locate(a, r, count, clearance), key=lambda x: (x[1], x[0]))
        if len(roots) != count:
            raise RefinementError(f"listed {len(roots)} roots for a count of {count}")
    rep = AValueReport(a, r, int(count), roots, requested_rect=rect, winding_residual=res,
                       poles_inside=_poles_inside(r), notes=notes)
    if theta is not None and T is not None:
        rep.prediction_main, rep.prediction_error_scale = predict_count(a, theta, T)
    return rep


# --- predictions ------------------------------------------------------------------------------


def predict_count(a, theta, T, h1=None, h2=None, allow_any_theta=False):
    """Main term and error scale of ``N_a(sigma_T; T, 2T)``.

    ``main = T (log T)^theta / (8 pi^(3/2) sqrt(theta) sqrt(log log T))`` and
    ``error_scale = T (log T)^theta / (log log T)^(3/4)`` (its constant is unknown).
    With ``h1 < h2`` the main term is multiplied by ``1/h1 - 1/h2``, the count
    between ``1/2 + h_i (log T)^-theta``.  The statement is proved for
    ``0 < theta < 1/13`` only; other values need ``allow_any_theta``.  For
    ``a = 1`` the full count ``N_1(T)`` has the separate main term
    ``T/(2 pi) log(T/(4 pi e))``, which is not what this returns.
    """
    if complex(a) == 0:
        raise DomainError("a must be nonzero")
    if T < 3:
        raise DomainError("T must be at least 3")
    if not (0 < theta < 1 / 13) and not allow_any_theta:
        raise DomainError(f"theta={theta} outside (0, 1/13), where the count asymptotic is proved")
    if theta <= 0:
        raise DomainError("theta must be positive")
    lT = math.log(T)
    llT = math.log(lT)
    main = T * lT**theta / (8 * math.pi**1.5 * math.sqrt(theta) * math.sqrt(llT))
    if h1 is not None or h2 is not None:
        if not (h1 is not None and h2 is not None and 0 < h1 < h2):
            raise DomainError("need 0 < h1 < h2")
        main *= 1.0 / h1 - 1.0 / h2
    return main, T * lT**theta / llT**0.75


def littlewood_asymptotic(a, theta, T):
    """``sqrt(psi_T)/(2 sqrt(pi)) + log|a|/2 + (log|a|)^2/(2 sqrt(pi) sqrt(psi_T))``."""
    ps = psi_exact(sigma_T(theta, T))
    la = math.log(abs(a))
    return math.sqrt(ps) / (2 * math.sqrt(math.pi)) + la / 2 + la * la / (2 * math.sqrt(math.pi) * math.sqrt(ps))


# --- Littlewood integrals ---------------------------------------------------------------------


def _log_abs_antideriv(u, d):
    # int log|d + i u| du = (1/2) [u log(d^2+u^2) - 2u + 2 d arctan(u/d)]
    if d == 0:
        return u * math.log(u * u) - u if u != 0 else 0.0
    return 0.5 * (u * math.log(d * d + u * u) - 2 * u + 2 * d * math.atan(u / d))


def _gl_panels(lo, hi, panel, order=16):
    n = max(1, math.ceil((hi - lo) / panel))
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, n + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


@dataclass(frozen=True)
class LittlewoodResult:
    a: complex
    sigma: float
    T1: float
    T2: float
    integral: float
    mean: float
    error: float
    singular_roots: tuple


def littlewood_integral(a, sigma, T1, T2, delta=0.5, panel=0.5, tol=1e-9, max_singular=500, roots=None):
    """``int_{T1}^{T2} log|zeta(sigma + i t) - a| dt``.

    a-values within ``delta`` of the segment are located first; their
    logarithmic singularities ``log|s - rho|`` are subtracted and integrated in
    closed form, and the smooth remainder goes to composite Gauss-Legendre
    panels.  ``error`` is the change when the panel length is halved.
    """
    a = complex(a)
    if a == 0:
        raise DomainError("a must be nonzero")
    if roots is None:
        box = ComplexRect(max(SIGMA_MIN, sigma - delta), min(SIGMA_MAX, sigma + delta), T1 - delta, T2 + delta)
        if box.t_min <= 0 < box.t_max:
            box = replace(box, t_min=AXIS_OFFSET)
        rep = count_avalues(a, box, refine=True)
        roots = [complex(b, g) for b, g, _ in rep.roots]
    if len(roots) > max_singular:
        raise PartialResultError(f"{len(roots)} near-singularities exceed the budget {max_singular}", covered=0.0)
    rho = np.array(roots, dtype=complex)

    def smooth(t):
        s = sigma + 1j * t
        val = np.log(np.abs(zeta_many(s, _PRECISION) - a))
        if len(rho):
            val = val - np.log(np.abs(s[:, None] - rho[None, :])).sum(axis=1)
        return val

    def quad(p):
        x, w = _gl_panels(T1, T2, p)
        return float(np.dot(w, smooth(x)))

    q1 = quad(panel)
    q2 = quad(panel / 2)
    sing = math.fsum(
        _log_abs_antideriv(T2 - r.imag, sigma - r.real) - _log_abs_antideriv(T1 - r.imag, sigma - r.real) for r in rho
    )
    total = q2 + sing
    return LittlewoodResult(a, float(sigma), float(T1), float(T2), total, total / (T2 - T1), abs(q2 - q1), tuple(roots))


def _arg_track(a, t, sig_hi, sig_lo, arg_start, nodes):
    """Continuous ``arg(zeta - a)`` at ``nodes`` (between the bounds) tracked leftwards from ``sig_hi``."""
    f = _f(a)
    pts = np.concatenate([[sig_hi], np.sort(nodes)[::-1], [sig_lo]])
    d, _, tau, F = _track_segment(f, complex(sig_hi, t), complex(sig_lo, t), 0.0, 32, f"t={t}")
    sig_track = sig_hi + (sig_lo - sig_hi) * tau
    arg = arg_start + np.concatenate([[0.0], np.cumsum(np.angle(F[1:] / F[:-1]))])
    # values at the requested nodes: follow the tracked branch from the nearest tracked point
    idx = np.clip(np.searchsorted(-sig_track, -nodes), 1, len(sig_track) - 1)
    Fn = f(nodes + 1j * t)
    base = F[idx - 1]
    return arg[idx - 1] + np.angle(Fn / base)


@dataclass(frozen=True)
class LittlewoodBalance:
    a: complex
    sigma1: float
    sigma2: float
    T1: float
    T2: float
    left_integral: float
    right_integral: float
    top_arg_integral: float
    bottom_arg_integral: float
    lhs: float  # (1/2pi)(left - right + top - bottom)
    rhs: float  # int_{sigma1}^{sigma2} nu(w) dw from the listed roots
    gap: float
    quadrature_error: float
    roots: tuple


def _no_avalues_right_of(a):
    """Abscissa beyond which ``zeta(s) = a`` has no solutions (|zeta - 1| <= zeta(sigma) - 1)."""
    gap = abs(a - 1)
    if gap == 0:
        raise DomainError("a = 1 has solutions arbitrarily far right")
    lo, hi = 1.0001, 60.0
    if special.zeta(hi) - 1 >= gap:
        raise DomainError("a too close to 1")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if special.zeta(mid) - 1 < gap:
            hi = mid
        else:
            lo = mid
    return hi


def littlewood_balance(a, sigma1, sigma2, T1, T2, panel=0.25):
    """Both sides of Littlewood's lemma on ``[sigma1, sigma2] x [T1, T2]``.

    ``2 pi int nu = int log|f(sigma1+it)| - int log|f(sigma2+it)| + int arg f(sigma+iT2) - int arg f(sigma+iT1)``
    with ``nu(w)`` the number of a-values with ``beta > w`` and ``arg f`` continued
    leftwards from the right edge, along which it is tracked continuously.
    """
    a = complex(a)
    far = max(sigma2, _no_avalues_right_of(a)) + 0.01
    rep = count_avalues(a, ComplexRect(sigma1, far, T1, T2), refine=True, auto_perturb=False)
    roots = [complex(b, g) for b, g, _ in rep.roots]
    rhs = math.fsum(max(0.0, min(r.real, sigma2) - sigma1) for r in roots)
    left = littlewood_integral(a, sigma1, T1, T2)
    right = littlewood_integral(a, sigma2, T1, T2)
    # arg along the right edge, continuous from an arbitrary principal start at T1
    f = _f(a)
    arg_b = float(np.angle(f(np.array([complex(sigma2, T1)]))[0]))
    d, _, _, _ = _track_segment(f, complex(sigma2, T1), complex(sigma2, T2), 0.0, 64, "right")
    arg_t = arg_b + d
    horiz = []
    for t, start in ((T1, arg_b), (T2, arg_t)):
        vals = []
        for p in (panel, panel / 2):
            x, w = _gl_panels(sigma1, sigma2, p)
            vals.append(float(np.dot(w, _arg_track(a, t, sigma2, sigma1, start, x))))
        horiz.append(vals)
    bottom, top = horiz[0][1], horiz[1][1]
    lhs = (left.integral - right.integral + top - bottom) / (2 * math.pi)
    err = (left.error + right.error + abs(horiz[0][1] - horiz[0][0]) + abs(horiz[1][1] - horiz[1][0])) / (2 * math.pi)
    return LittlewoodBalance(a, sigma1, sigma2, T1, T2, left.integral, right.integral, top, bottom, lhs, rhs,
                             abs(lhs - rhs), err, tuple(roots))


def littlewood_mean_sampled(a, sigma, T, n_windows=8, width=4.0, seed=0):
    """Mean of ``log|zeta(sigma+it) - a|`` over ``[T, 2T]`` estimated from random windows.

    Returns ``(mean, standard_error)``; meant for heights where integrating the
    whole window is out of reach.
    """
    rng = np.random.default_rng(seed)
    starts = T + rng.random(n_windows) * (T - width)
    means = []
    for t0 in starts:
        x, w = _gl_panels(t0, t0 + width, 0.05)
        v = np.log(np.abs(zeta_many(sigma + 1j * x, 1e-8) - a))
        means.append(float(np.dot(w, v)) / width)
    means = np.array(means)
    return float(means.mean()), float(means.std(ddof=1) / math.sqrt(n_windows)) if n_windows > 1 else math.nan


# --- region integrals -------------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionReport:
    a: complex
    psi: float
    A: float
    L: float
    half_width: float
    direct: dict  # (j, m, n) -> value
    reduction: dict
    main_term: dict  # paper-style main term of each region (infinite Gaussian integrals)
    gap: dict  # |direct - reduction|
    series_terms: dict  # (j, m, n) -> number of geometric terms used
    series_bound: dict  # (j, m, n) -> bound on the first omitted term


def _gl(lo, hi, n_panels, order=24):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def _gauss_moment_full(n, ps):
    # int_R y^n exp(-y^2/psi) dy
    if n % 2:
        return 0.0
    return math.gamma((n + 1) / 2) * ps ** ((n + 1) / 2)


def region_decomposition_integrals(a, sigma=None, A=3.0, L=4.0, psi=None, loglogT=None, max_order=5, tol=1e-14):
    """``int_{R_j} log|e^{x+iy} - a| x^m y^n exp(-(x^2+y^2)/psi)`` for ``j = 1, 2``, ``m + n <= max_order``.

    ``R_1 = [log|a| + 1/L, A l] x [-A l, A l]`` and ``R_2 = [-A l, log|a| - 1/L] x [-A l, A l]``
    with ``l = loglogT`` (default ``psi``).  Each integral is computed by direct
    tensor Gauss-Legendre quadrature and by the geometric-series reduction
    ``log|e^w - a| = x - Re sum_k a^k e^{-kw}/k`` on ``R_1``
    (``log|a| - Re sum_k e^{kw} a^{-k}/k`` on ``R_2``), whose one-dimensional
    factors are again integrated by quadrature.
    """
    a = complex(a)
    if a == 0:
        raise DomainError("a must be nonzero")
    ps = psi if psi is not None else psi_exact(sigma)
    ell = loglogT if loglogT is not None else ps
    H = A * ell
    la = math.log(abs(a))
    arg_a = cmath.phase(a)
    x1 = (la + 1.0 / L, H)
    x2 = (-H, la - 1.0 / L)
    ny = max(8, math.ceil(2 * H / 0.5))
    y, wy = _gl(-H, H, ny)
    gy = np.exp(-(y * y) / ps)
    direct, reduction, main, gap, nterms, sbound = {}, {}, {}, {}, {}, {}
    for j, (lo, hi) in ((1, x1), (2, x2)):
        if hi <= lo:
            continue
        nx = max(8, math.ceil((hi - lo) / 0.25))
        x, wx = _gl(lo, hi, nx)
        gx = np.exp(-(x * x) / ps)
        X, Y = np.meshgrid(x, y, indexing="ij")
        logterm = np.log(np.abs(np.exp(X + 1j * Y) - a))
        # geometric series ratio: |a e^{-w}| on R_1, |e^w / a| on R_2; both <= exp(-1/L)
        ratio = math.exp(-1.0 / L)
        K = max(1, math.ceil(math.log(tol) / math.log(ratio)))
        k = np.arange(1, K + 1)
        if j == 1:
            ex = np.exp(-np.outer(k, x)) * (a ** k)[:, None] / k[:, None]  # (K, nx)
            ey = np.exp(-1j * np.outer(k, y))
        else:
            ex = np.exp(np.outer(k, x)) * (a ** (-k.astype(float)))[:, None] / k[:, None]
            ey = np.exp(1j * np.outer(k, y))
        for m in range(max_order + 1):
            for n in range(max_order + 1 - m):
                wxm = wx * x**m * gx
                wyn = wy * y**n * gy
                direct[(j, m, n)] = float(wxm @ logterm @ wyn)
                Ix = ex @ wxm  # (K,)
                Iy = ey @ wyn
                series = float(np.real(np.sum(Ix * Iy)))
                if j == 1:
                    base = float(np.dot(wxm, x)) * float(np.sum(wyn))
                    main[(j, m, n)] = ps ** ((m + n + 3) / 2) * _upper_moment(m + 1, la / math.sqrt(ps)) * _full_moment(n)
                else:
                    base = la * float(np.sum(wxm)) * float(np.sum(wyn))
                    main[(j, m, n)] = la * ps ** ((m + n + 2) / 2) * _lower_moment(m, la / math.sqrt(ps)) * _full_moment(n)
                reduction[(j, m, n)] = base - series
                gap[(j, m, n)] = abs(direct[(j, m, n)] - reduction[(j, m, n)])
                nterms[(j, m, n)] = K
                sbound[(j, m, n)] = ratio ** (K + 1) / (K + 1) * float(np.sum(np.abs(wxm))) * float(np.sum(np.abs(wyn)))
    return RegionReport(a, ps, A, L, H, direct, reduction, main, gap, nterms, sbound)


def _full_moment(n):
    # int_R y^n e^{-y^2} dy
    return 0.0 if n % 2 else math.gamma((n + 1) / 2)


def _upper_moment(m, c):
    # int_c^inf x^m e^{-x^2} dx
    return integrate.quad(lambda x: x**m * math.exp(-x * x), c, math.inf, epsabs=1e-15, epsrel=1e-13)[0]


def _lower_moment(m, c):
    return integrate.quad(lambda x: x**m * math.exp(-x * x), -math.inf, c, epsabs=1e-15, epsrel=1e-13)[0]
