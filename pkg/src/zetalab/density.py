"""Density of ``log zeta(sigma, X)`` by Fourier inversion, and its Gaussian expansion.

Writing ``Phi(u, v) ~ exp(-pi^2 psi |z|^2) P(u, v)`` with ``P`` the degree-5
polynomial built from the ``a~_{k,l}``, completing the square in the inversion
integral gives

    F(x, y) ~ sum_{m+n <= 5} c_{m,n}(1/sqrt(psi)) / psi^(m+n+1) x^m y^n exp(-(x^2+y^2)/psi),

where ``c_{m,n}(alpha)`` integrates the scaled derivative ``P^{(m,n)}`` against
``exp(-pi^2 (u^2+v^2))``.  In the normalized variable ``kappa = log zeta / sqrt(pi psi)``
this becomes ``sum_k psi^(-k/2) g_k(x, y) exp(-pi (x^2+y^2))``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .charfn import a_tilde, phi_hat_grid
from .errors import DomainError, ResourceError
from .primes import psi_exact, sigma_T

__all__ = [
    "GridSpec",
    "DensityGrid",
    "invert_density",
    "phi_radius",
    "ExpansionPolynomials",
    "build_expansion",
    "density_expansion_eval",
    "gaussian_moment",
    "box_moment",
    "clt_box_probability",
    "CLTBox",
]


# --- inversion -----------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    x_max: float | None = None  # default 6 sqrt(psi) + 1
    n_x: int = 201
    phi_floor: float = 1e-16
    period_factor: float = 3.0  # inversion period over x_max; sets the u-step
    max_nodes: int = 2500


@dataclass
class DensityGrid:
    sigma: float
    x_nodes: np.ndarray
    y_nodes: np.ndarray
    values: np.ndarray  # values[i, j] = F(x_i, y_j)
    mesh_step: float
    domain_radius: float  # largest |u|, |v| used in the inversion
    mass_defect: float
    psi: float = 0.0
    u_step: float = 0.0
    extra: dict = field(default_factory=dict)

    def mass(self):
        return float(self.values.sum() * self.mesh_step**2)

    def cdf_table(self):
        """``C[i, j] = int_{x <= x_i, y <= y_j} F`` by cumulative trapezoid sums."""
        h = self.mesh_step
        V = self.values
        cx = np.zeros_like(V)
        cx[1:] = np.cumsum(0.5 * (V[1:] + V[:-1]), axis=0) * h
        C = np.zeros_like(V)
        C[:, 1:] = np.cumsum(0.5 * (cx[:, 1:] + cx[:, :-1]), axis=1) * h
        return C

    def cdf(self, x, y, table=None):
        """Bilinear interpolation of :meth:`cdf_table`, clamped outside the mesh."""
        C = self.cdf_table() if table is None else table
        xs, ys = self.x_nodes, self.y_nodes
        x = np.clip(np.asarray(x, dtype=float), xs[0], xs[-1])
        y = np.clip(np.asarray(y, dtype=float), ys[0], ys[-1])
        i = np.clip(np.searchsorted(xs, x) - 1, 0, len(xs) - 2)
        j = np.clip(np.searchsorted(ys, y) - 1, 0, len(ys) - 2)
        fx = (x - xs[i]) / (xs[i + 1] - xs[i])
        fy = (y - ys[j]) / (ys[j + 1] - ys[j])
        return (
            C[i, j] * (1 - fx) * (1 - fy)
            + C[i + 1, j] * fx * (1 - fy)
            + C[i, j + 1] * (1 - fx) * fy
            + C[i + 1, j + 1] * fx * fy
        )

    def box_probability(self, x0, x1, y0, y1, table=None):
        C = self.cdf_table() if table is None else table
        f = lambda a, b: self.cdf(a, b, C)
        return float(f(x1, y1) - f(x0, y1) - f(x1, y0) + f(x0, y0))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["x", "y", "F"])
            for i, x in enumerate(self.x_nodes):
                for j, y in enumerate(self.y_nodes):
                    wr.writerow([repr(float(x)), repr(float(y)), repr(float(self.values[i, j]))])

    def to_gnuplot_matrix(self, path):
        """Nonuniform-matrix layout: first row ``n_y y_1 ... y_n``, then ``x_i F(x_i, .)``."""
        with open(path, "w") as fh:
            fh.write(" ".join([str(len(self.y_nodes))] + [repr(float(y)) for y in self.y_nodes]) + "\n")
            for i, x in enumerate(self.x_nodes):
                fh.write(" ".join([repr(float(x))] + [repr(float(v)) for v in self.values[i]]) + "\n")

    def metadata(self):
        return {
            "sigma": self.sigma,
            "psi": self.psi,
            "n_x": len(self.x_nodes),
            "x_max": float(self.x_nodes[-1]),
            "mesh_step": self.mesh_step,
            "domain_radius": self.domain_radius,
            "u_step": self.u_step,
            "mass_defect": self.mass_defect,
            **self.extra,
        }


def phi_radius(sigma, floor=1e-16, r_max=64.0, step=0.125):
    """Smallest radius beyond which ``|Phi|`` stays below ``floor`` on the axes and diagonal.

    The scan doubles its range until the last quarter of every ray is below ``floor``.
    """
    r_hi = 1.0
    while True:
        rs = np.arange(0.0, r_hi + step / 2, step)
        d = rs / math.sqrt(2)
        rays = [
            np.abs(phi_hat_grid(rs, [0.0], sigma).values[:, 0]),
            np.abs(phi_hat_grid([0.0], rs, sigma).values[0]),
            np.abs(np.diag(phi_hat_grid(d, d, sigma).values)),
        ]
        tail = rs >= 0.75 * r_hi
        if all(np.all(r[tail] < floor) for r in rays) or r_hi >= r_max:
            radius = 0.0
            for r in rays:
                above = np.flatnonzero(~(r < floor))
                if len(above):
                    radius = max(radius, rs[min(above[-1] + 1, len(rs) - 1)])
            return float(radius)
        r_hi *= 2


def invert_density(sigma, grid_spec=None):
    """``F_sigma(x, y) = int int Phi(u, v) exp(-2 pi i (ux + vy)) du dv`` on a square mesh.

    The ``(u, v)`` trapezoid rule with step ``h`` computes the periodization of
    ``F`` with period ``1/h``; the step is chosen so that period is
    ``period_factor * x_max``.  The ``(u, v)`` range stops where ``|Phi|`` drops
    below ``phi_floor``.
    """
    spec = grid_spec or GridSpec()
    if not 0.5 < sigma <= 0.75:
        raise DomainError("sigma must lie in (1/2, 3/4]")
    ps = psi_exact(sigma)
    x_max = spec.x_max or 6.0 * math.sqrt(ps) + 1.0
    U = phi_radius(sigma, spec.phi_floor)
    h = 1.0 / (spec.period_factor * x_max)
    n_half = math.ceil(U / h)
    if 2 * n_half + 1 > spec.max_nodes:
        raise ResourceError(
            f"inversion needs {2 * n_half + 1} nodes per axis (limit {spec.max_nodes})",
            required={"nodes_per_axis": 2 * n_half + 1, "radius": U},
        )
    us = h * np.arange(-n_half, n_half + 1)
    phi = phi_hat_grid(us, us, sigma)
    xs = np.linspace(-x_max, x_max, spec.n_x)
    E = np.exp(-2j * np.pi * np.outer(us, xs))  # (Nu, Nx)
    F = (h * h) * np.real(E.T @ phi.values @ E)
    step = float(xs[1] - xs[0])
    mass = float(F.sum() * step * step)
    return DensityGrid(
        float(sigma), xs, xs.copy(), F, step, float(U), abs(1.0 - mass), ps, h,
        {"phi_tail_error": phi.tail_error, "phi_p_cut": phi.p_cut},
    )


# --- expansion polynomials -----------------------------------------------------------------


def gaussian_moment(j):
    """``int u^j exp(-pi^2 u^2) du = Gamma((j+1)/2) / pi^(j+1)`` (zero for odd ``j``)."""
    if j % 2:
        return 0.0
    return math.gamma((j + 1) / 2) / math.pi ** (j + 1)


def _poly_from_a_tilde(at, order):
    # P(u, v) = 1 + sum a~_kl (u+iv)^k (u-iv)^l as coefficients of u^i v^j
    P = np.zeros((order + 1, order + 1), dtype=complex)
    P[0, 0] = 1.0
    zp = [np.array([[1.0 + 0j]])]
    zc = [np.array([[1.0 + 0j]])]
    z1 = np.array([[0, 1j], [1, 0]], dtype=complex)  # u + iv: [i, j] -> u^i v^j
    zb1 = np.array([[0, -1j], [1, 0]], dtype=complex)
    from scipy.signal import convolve2d

    for _ in range(order):
        zp.append(convolve2d(zp[-1], z1))
        zc.append(convolve2d(zc[-1], zb1))
    for (k, l), c in at.items():
        term = convolve2d(zp[k], zc[l]) * c
        P[: term.shape[0], : term.shape[1]] += term
    return P


def _derivative(P, m, n):
    D = P.copy()
    for _ in range(m):
        D = D[1:, :] * np.arange(1, D.shape[0])[:, None]
    for _ in range(n):
        D = D[:, 1:] * np.arange(1, D.shape[1])[None, :]
    return D / (math.factorial(m) * math.factorial(n) * (np.pi * 1j) ** (m + n))


@dataclass(frozen=True)
class ExpansionPolynomials:
    sigma: float
    order: int
    psi: float
    a_tilde: dict
    P: np.ndarray  # P[i, j]: coefficient of u^i v^j
    P_derivs: dict  # (m, n) -> coefficient array of P^{(m,n)}
    c: dict  # (m, n) -> array over l of c_{m,n,l} (coefficient of alpha^l)
    g: dict  # k -> array G[i, j], coefficient of x^i y^j in g_k

    def c_mn(self, m, n, alpha):
        return complex(np.polynomial.polynomial.polyval(alpha, self.c[(m, n)]))

    def g_eval(self, k, x, y):
        return np.real(np.polynomial.polynomial.polyval2d(x, y, self.g[k]))

    def to_json(self, path=None):
        enc = lambda z: [repr(float(np.real(z))), repr(float(np.imag(z)))]
        data = {
            "sigma": self.sigma,
            "order": self.order,
            "psi": repr(self.psi),
            "a_tilde": {f"{k},{l}": enc(v) for (k, l), v in sorted(self.a_tilde.items())},
            "c": {f"{m},{n}": [enc(x) for x in arr] for (m, n), arr in sorted(self.c.items())},
            "g": {
                str(k): {f"{i},{j}": enc(G[i, j]) for i in range(G.shape[0]) for j in range(G.shape[1]) if G[i, j] != 0}
                for k, G in sorted(self.g.items())
            },
        }
        text = json.dumps(data, indent=1, sort_keys=True)
        if path:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def build_expansion(sigma, order=5, a_tilde_sigma=None):
    """Assemble ``P``, ``P^{(m,n)}``, ``c_{m,n}`` and ``g_k`` at ``sigma``.

    ``a_tilde_sigma`` evaluates the ``a~_{k,l}`` at a different abscissa (for
    example 0.5 + 1e-9 to freeze them at the critical line); ``psi`` is always
    taken at ``sigma``.
    """
    ps = psi_exact(sigma)
    at = a_tilde(a_tilde_sigma if a_tilde_sigma is not None else sigma, order)
    P = _poly_from_a_tilde(at, order)
    derivs, cs = {}, {}
    for m in range(order + 1):
        for n in range(order + 1 - m):
            D = _derivative(P, m, n)
            derivs[(m, n)] = D
            coef = np.zeros(order + 1, dtype=complex)
            for i in range(D.shape[0]):
                for j in range(D.shape[1]):
                    if D[i, j] != 0 and i + j <= order:
                        coef[i + j] += D[i, j] * gaussian_moment(i) * gaussian_moment(j)
            cs[(m, n)] = coef
    g = {}
    for k in range(order + 1):
        G = np.zeros((k + 1, k + 1), dtype=complex)
        for m in range(k + 1):
            for n in range(k + 1 - m):
                G[m, n] += cs[(m, n)][k - m - n] * math.sqrt(math.pi) ** (m + n + 2)
        g[k] = G
    return ExpansionPolynomials(float(sigma), order, ps, at, P, derivs, cs, g)


def density_expansion_eval(sigma, x, y, poly):
    """``sum_{m+n <= order} c_{m,n}(1/sqrt(psi)) / psi^(m+n+1) x^m y^n exp(-(x^2+y^2)/psi)``."""
    ps = poly.psi
    alpha = 1.0 / math.sqrt(ps)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    for (m, n), coef in poly.c.items():
        cm = np.polynomial.polynomial.polyval(alpha, coef)
        total = total + cm / ps ** (m + n + 1) * x**m * y**n
    out = np.real(total) * np.exp(-(x * x + y * y) / ps)
    return float(out) if out.ndim == 0 else out


# --- CLT box probabilities ------------------------------------------------------------------


def box_moment(m, a, b):
    """``int_a^b x^m exp(-pi x^2) dx`` (infinite ends allowed) by the integration-by-parts recurrence."""

    def edge(x, k):
        if math.isinf(x):
            return 0.0
        return x**k * math.exp(-math.pi * x * x)

    if m == 0:
        return 0.5 * (math.erf(math.sqrt(math.pi) * b) - math.erf(math.sqrt(math.pi) * a))
    if m == 1:
        return (edge(a, 0) - edge(b, 0)) / (2 * math.pi)
    return (edge(a, m - 1) - edge(b, m - 1)) / (2 * math.pi) + (m - 1) / (2 * math.pi) * box_moment(m - 2, a, b)


@dataclass(frozen=True)
class CLTBox:
    theta: float
    T: float
    sigma: float
    psi: float
    box: tuple
    terms: tuple  # contribution of each k
    probability: float
    error_scale: float  # (log log T)^-3


def clt_box_probability(theta, T, box, order=5, poly=None, a_tilde_sigma=None):
    """``sum_{k <= order} psi_T^(-k/2) int int_box g_k exp(-pi (x^2+y^2))``."""
    if T < 10:
        raise DomainError("T must be at least 10")
    if not 0 < theta < 0.5:
        raise DomainError("theta must lie in (0, 1/2)")
    s = sigma_T(theta, T)
    poly = poly or build_expansion(s, order, a_tilde_sigma)
    a, b, c, d = box
    Mx = [box_moment(i, a, b) for i in range(order + 1)]
    My = [box_moment(j, c, d) for j in range(order + 1)]
    terms = []
    for k in range(order + 1):
        G = poly.g[k]
        val = sum(G[i, j] * Mx[i] * My[j] for i in range(G.shape[0]) for j in range(G.shape[1]))
        terms.append(float(np.real(val)) * poly.psi ** (-k / 2))
    return CLTBox(
        float(theta), float(T), s, poly.psi, tuple(box), tuple(terms), math.fsum(terms),
        math.log(math.log(T)) ** -3,
    )
