"""Solutions of zeta(s) = a.

Count them in rectangles, list them, and check Littlewood's lemma on a window
where both sides can be computed to high accuracy.
"""

# %%
from zetalab.avalues import ComplexRect, count_avalues, littlewood_balance, predict_count

for a in (2.0, 1 + 1j, 0.5j):
    rep = count_avalues(a, ComplexRect(0.5, 2.0, 0.0, 60.0))
    print(f"a = {a}: {rep.count} solutions with 1/2 < beta < 2, 0 < gamma < 60")
    for b, g, r in rep.roots[:4]:
        print(f"    {b:.10f} + {g:.10f} i    |zeta - a| = {r:.1e}")

# %% [markdown]
# Littlewood's lemma turns the boundary integrals of log|zeta - a| (plus the
# argument along the horizontal sides) into the integral of the counting
# function over sigma.

# %%
b = littlewood_balance(2.0, 0.55, 2.0, 100.0, 130.0)
print(f"boundary side / 2pi = {b.lhs:.10f}")
print(f"sum over a-values   = {b.rhs:.10f}   ({len(b.roots)} a-values)")
print(f"gap {b.gap:.1e}, quadrature error estimate {b.quadrature_error:.1e}")

# %% [markdown]
# The asymptotic count just right of the critical line is a statement about
# T -> infinity with error terms decaying in log log T, so there is nothing to
# compare it with at heights where counting is feasible.  The arithmetic
# itself:

# %%
for T in (1e6, 1e12, 1e24):
    main, err = predict_count(2.0, 0.05, T)
    print(f"T = {T:.0e}: main term {main:.4e}, error scale {err:.4e}, ratio {main / err:.3f}")
