"""Approaching the critical line.

As sigma -> 1/2 the density flattens like a Gaussian of variance psi/2 per
coordinate, and a short polynomial correction captures the deviation.
"""

# %%
import math

import numpy as np

from zetalab.density import build_expansion, clt_box_probability, density_expansion_eval, invert_density
from zetalab.primes import psi_exact, sigma_T

print(" sigma-1/2      psi    sup|inversion - expansion|    F(0,0)*pi*psi")
for eps in (1e-1, 1e-2, 1e-3):
    sig = 0.5 + eps
    ps = psi_exact(sig)
    g = invert_density(sig)
    poly = build_expansion(sig)
    X, Y = np.meshgrid(g.x_nodes, g.y_nodes, indexing="ij")
    m = (np.abs(X) <= 2 * math.sqrt(ps)) & (np.abs(Y) <= 2 * math.sqrt(ps))
    dev = np.max(np.abs(density_expansion_eval(sig, X[m], Y[m], poly) - g.values[m]))
    i0 = int(np.argmin(np.abs(g.x_nodes)))
    print(f"{eps:10.0e} {ps:8.4f} {dev:22.3e} {g.values[i0, i0] * math.pi * ps:18.5f}")

# %% [markdown]
# Box probabilities of the normalized variable log zeta / sqrt(pi psi) at
# sigma_T = 1/2 + (log T)^(-theta): the k = 0 term is the Gaussian value, the
# later terms shrink like psi^(-k/2).

# %%
theta, T = 0.1, 1e6
print(f"sigma_T = {sigma_T(theta, T):.5f}")
poly = build_expansion(sigma_T(theta, T))
for box in [(0.0, math.inf, -math.inf, math.inf), (-1.0, 1.0, -1.0, 1.0), (0.0, 0.5, 0.0, 0.5)]:
    r = clt_box_probability(theta, T, box, poly=poly)
    terms = " ".join(f"{t:+.5f}" for t in r.terms)
    print(f"{str(box):42s} P = {r.probability:.5f}   terms: {terms}")
