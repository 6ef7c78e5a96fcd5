import math

import numpy as np
import pytest

from zetalab.density import invert_density
from zetalab.discrepancy import (
    EmpiricalDistribution2D,
    _max_rect,
    compare_char_functions,
    empirical_char_function,
    empirical_log_zeta,
    estimate_discrepancy,
)
from zetalab.errors import CoverageError, DomainError
from zetalab.random_model import sample_set


def _brute_max_rect(D):
    best = 0.0
    nx, ny = D.shape
    for i0 in range(nx):
        for i1 in range(i0, nx):
            for j0 in range(ny):
                for j1 in range(j0, ny):
                    best = max(best, abs(D[i0 : i1 + 1, j0 : j1 + 1].sum()))
    return best


def test_rectangle_scan_against_brute_force():
    rs = np.random.default_rng(0)
    for _ in range(5):
        D = rs.normal(size=(7, 6))
        val, i0, i1, j0, j1 = _max_rect(D)
        assert val == pytest.approx(_brute_max_rect(D), rel=1e-12)
        assert abs(D[i0 : i1 + 1, j0 : j1 + 1].sum()) == pytest.approx(val, rel=1e-12)


@pytest.fixture(scope="module")
def grid75():
    return invert_density(0.75)


def test_self_consistency(grid75):
    s = sample_set(0.75, 2000, 10_000, 17).values
    res = estimate_discrepancy(EmpiricalDistribution2D.from_points(s, 0.75), grid75)
    assert res.value <= 5 / math.sqrt(len(s))
    x0, x1, y0, y1 = res.certificate
    emp = np.mean((s.real > x0) & (s.real <= x1) & (s.imag > y0) & (s.imag <= y1))
    assert abs(emp - res.empirical_mass) < 1e-12
    assert abs(res.empirical_mass - res.model_mass) == pytest.approx(res.value, rel=1e-9)


def test_permutation_invariance(grid75):
    s = sample_set(0.75, 500, 3000, 3).values
    a = estimate_discrepancy(EmpiricalDistribution2D.from_points(s, 0.75), grid75).value
    b = estimate_discrepancy(EmpiricalDistribution2D.from_points(s[::-1], 0.75), grid75).value
    assert a == b


def test_coverage_error(grid75):
    s = sample_set(0.75, 500, 1000, 3).values * 5
    with pytest.raises(CoverageError):
        estimate_discrepancy(EmpiricalDistribution2D.from_points(s, 0.75), grid75)


def test_empirical_grid_reproducible():
    a = empirical_log_zeta(0.75, 1000, 50, seed=4)
    b = empirical_log_zeta(0.75, 1000, 50, seed=4)
    assert np.array_equal(a.samples, b.samples)
    assert a.ts[0] >= 1000 and a.ts[-1] < 2000
    assert np.allclose(np.diff(a.ts), 1000 / 50)
    assert a.valid


def test_char_function_properties():
    emp = empirical_log_zeta(0.75, 1e4, 2000, seed=1)
    us = np.array([-0.3, 0.0, 0.3])
    vs = np.array([-0.2, 0.0, 0.2])
    phi, se = empirical_char_function(emp.points(), us, vs)
    assert phi[1, 1] == 1.0
    assert np.max(np.abs(phi[0, 0] - np.conj(phi[2, 2]))) < 1e-12
    c = compare_char_functions(0.75, 1e4, None, [0.0, 0.3], [0.0], None, emp=emp)
    assert c.model[0, 0] == 1.0 and c.empirical[0, 0] == 1.0
    with pytest.raises(DomainError):
        compare_char_functions(0.75, 1e4, 10, [5.0], [0.0], 1)
