import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from zetalab.charfn import (
    J_quadrature,
    J_quadrature_grid,
    J_series,
    a_tilde,
    coeff_a,
    coeff_b,
    composition_sums,
    log_series_recurrence,
    coefficient_series,
    phi_hat_expansion,
    phi_hat_grid,
    phi_hat_rand,
)
from zetalab.errors import DomainError, RadiusError
from zetalab.primes import psi_exact
from zetalab.random_model import sample_set


def _compositions(t, k):
    if k == 0:
        return [[]] if t == 0 else []
    return [[n] + rest for n in range(1, t - k + 2) for rest in _compositions(t - n, k - 1)]


def test_composition_sums_brute_force():
    C = composition_sums(4, 9)
    for k in range(5):
        for t in range(10):
            ref = sum(1.0 / math.prod(c) for c in _compositions(t, k))
            assert C[k, t] == pytest.approx(ref, rel=1e-14, abs=1e-300)


def test_b11_is_dilog_and_b22_relation():
    for w in (0.1, 0.3, 0.5):
        tab = coeff_b(coeff_a(w))
        assert tab.b[1, 1] == pytest.approx(sum(w ** (2 * m) / m**2 for m in range(1, 200)), abs=1e-15)
        assert tab.b[1, 1] == pytest.approx(float(special.spence(1 - w * w)), abs=1e-14)
        assert tab.b[2, 2] == pytest.approx(tab.a[2, 2] - 2 * tab.a[1, 1] ** 2, abs=1e-14)


def test_b_by_two_routes():
    ser = coefficient_series(6, 30)
    rec = log_series_recurrence(6, 30)
    m = np.abs(ser.beta).max()
    assert np.max(np.abs(ser.beta - rec)) < 1e-12 * m


def test_a_symmetry_and_positivity():
    tab = coeff_a(0.4, K=6)
    assert np.array_equal(tab.a, tab.a.T)
    assert np.all(tab.a >= 0)


def test_J_quadrature_known_values():
    # J(u, 0, w) for tiny w: J ~ 1 - u^2 w^2 (first order)
    w = 1e-3
    assert J_quadrature(0.7, 0, w) == pytest.approx(1 - 0.49 * w * w, abs=1e-10)
    # at larger |z| the real part of the single-prime factor is close to J0(2 w |z|)
    assert abs(J_quadrature(30.0, 0, 0.05).real - special.j0(2 * 0.05 * 30)) < 0.005


@given(st.floats(0.05, 0.5), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
@settings(max_examples=40, deadline=None)
def test_series_matches_quadrature(w, u, v):
    tab = coeff_a(w, K=12)
    try:
        s = J_series(u, v, tab, tol=1e-10)
    except RadiusError:
        return
    assert abs(s - J_quadrature(u, v, w)) < 1e-9


def test_series_refuses_large_z():
    with pytest.raises(RadiusError):
        J_series(5.0, 5.0, coeff_a(0.5, K=4))


def test_grid_equals_pointwise():
    us, vs = np.array([0.0, 0.3, 2.0]), np.array([-1.0, 0.5])
    G = J_quadrature_grid(us, vs, 0.3)
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            assert abs(G[i, j] - J_quadrature(u, v, 0.3)) < 1e-12


def test_phi_symmetries_and_origin():
    g = phi_hat_grid([-0.4, 0.0, 0.4], [-0.3, 0.0, 0.3], 0.75)
    V = g.values
    assert V[1, 1] == 1.0
    assert np.array_equal(V[0], np.conj(V[2]))
    assert np.array_equal(V[:, 0], V[:, 2])


def test_phi_against_monte_carlo():
    s = sample_set(0.75, 2000, 200_000, 21).values
    for u, v in ((0.2, 0.1), (0.0, 0.3)):
        mc = np.mean(np.exp(2j * np.pi * (u * s.real + v * s.imag)))
        se = math.sqrt(1 / len(s))
        assert abs(phi_hat_rand(u, v, 0.75) - mc) < 4 * se


def test_phi_stable_under_prime_cut():
    a = phi_hat_rand(0.5, 0.2, 0.7)
    b = phi_hat_rand(0.5, 0.2, 0.7, p_cut=5000)
    assert abs(a - b) < 1e-10


def test_expansion_error_scales_like_sixth_power():
    sig = 0.6
    d = []
    for r in (0.1, 0.05):
        u, v = r * 0.8, r * 0.6
        d.append(abs(phi_hat_expansion(u, v, sig) - phi_hat_rand(u, v, sig)))
    assert 30 < d[0] / d[1] < 130
    with pytest.raises(RadiusError):
        phi_hat_expansion(0.3, 0.0, sig)


def test_a_tilde_third_order():
    # a~_{2,1} = (pi i)^3/2 * sum_p b_{2,1}(p^-sigma); b_{2,1} starts at w^4 / 2
    at = a_tilde(0.8, 5)
    assert set(at) == {(1, 2), (2, 1), (1, 3), (2, 2), (3, 1), (1, 4), (2, 3), (3, 2), (4, 1)}
    assert at[(2, 1)] == pytest.approx(at[(1, 2)])
    with pytest.raises(DomainError):
        a_tilde(0.5)
