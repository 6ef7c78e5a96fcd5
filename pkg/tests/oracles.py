"""Independent cross-checks used by the test suite."""

import numpy as np

from zetalab.zeta import zeta_derivative, zeta_many


def grid_avalues(a, sigma_min, sigma_max, t_min, t_max, h=0.02, newton_tol=1e-12):
    """a-values found by scanning |zeta - a| on a grid and polishing local minima with Newton."""
    sig = np.arange(sigma_min - h, sigma_max + 2 * h, h)
    ts = np.arange(t_min - h, t_max + 2 * h, h)
    S, T = np.meshgrid(sig, ts, indexing="ij")
    V = np.abs(zeta_many((S + 1j * T).ravel(), 1e-9).reshape(S.shape) - a)
    c = V[1:-1, 1:-1]
    is_min = np.ones_like(c, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= c <= V[1 + di : V.shape[0] - 1 + di, 1 + dj : V.shape[1] - 1 + dj]
    found = []
    for i, j in zip(*np.nonzero(is_min)):
        s = complex(S[i + 1, j + 1], T[i + 1, j + 1])
        for _ in range(50):
            f = zeta_many([s], 1e-11)[0] - a
            if abs(f) < newton_tol:
                break
            s = s - f / zeta_derivative([s], radius=1e-3)[0]
            if abs(s) > 1e4:
                break
        if abs(zeta_many([s], 1e-11)[0] - a) < 1e-10 and sigma_min < s.real < sigma_max and t_min < s.imag < t_max:
            if all(abs(s - r) > 1e-7 for r in found):
                found.append(s)
    return sorted(found, key=lambda z: z.imag)
