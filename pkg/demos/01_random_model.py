"""Random Euler products and their density.

Draw samples of log zeta(sigma, X), compare their spread with psi(sigma), and
check a few box probabilities against the density obtained by Fourier
inversion of the characteristic function.
"""

# %%
import math

import numpy as np

from zetalab.density import invert_density
from zetalab.primes import psi_exact
from zetalab.random_model import sample_set

sigma = 0.7
ps = psi_exact(sigma)
print(f"psi({sigma}) = {ps:.6f}")

# %% [markdown]
# Each realization fixes a uniform phase per prime.  Primes past the cutoff
# are replaced by a complex Gaussian of the right variance, so the variance
# of each coordinate should be close to psi/2.

# %%
s = sample_set(sigma, cutoff=2000, n=200_000, base_seed=2024)
print(f"var Re = {s.values.real.var():.4f}, var Im = {s.values.imag.var():.4f}, psi/2 = {ps / 2:.4f}")
print(f"omitted-tail RMS at cutoff 2000: {s.tail_rms:.3e}")

# %% [markdown]
# The density comes from inverting the product of single-prime factors.

# %%
grid = invert_density(sigma)
print(f"mass = {grid.mass():.12f}, min value = {grid.values.min():.2e}")
for box in [(-0.5, 0.5, -0.5, 0.5), (0.5, 3.0, -3.0, 3.0), (-1.0, 0.0, 0.0, 1.0)]:
    x0, x1, y0, y1 = box
    v = s.values
    mc = np.mean((v.real > x0) & (v.real < x1) & (v.imag > y0) & (v.imag < y1))
    se = math.sqrt(mc * (1 - mc) / len(v))
    print(f"box {box}: density {grid.box_probability(*box):.4f}   Monte Carlo {mc:.4f} +- {se:.4f}")

# %% [markdown]
# Unlike a Gaussian, the density is skewed: the real part has the heavier tail
# on the positive side, since a single factor 1/(1 - X p^-sigma) can be large
# but never smaller than 1/(1 + p^-sigma).

# %%
i0 = int(np.argmin(np.abs(grid.y_nodes)))
row = grid.values[:, i0]
xs = grid.x_nodes
for x in (-2.0, -1.0, 1.0, 2.0):
    print(f"F({x:+.1f}, 0) = {np.interp(x, xs, row):.5f}")
