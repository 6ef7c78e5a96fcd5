import math

import pytest

from oracles import grid_avalues
from zetalab.avalues import (
    ComplexRect,
    count_avalues,
    littlewood_asymptotic,
    littlewood_balance,
    littlewood_integral,
    predict_count,
    region_decomposition_integrals,
    winding_number,
)
from zetalab.errors import BoundaryError, DomainError, PartialResultError
from zetalab.zeta import zeta_many


def test_far_right_has_none():
    for a in (2.0, 0.5, 1 + 0.5j):
        assert count_avalues(a, ComplexRect(5, 6, 0, 40)).count == 0


def test_count_matches_grid_oracle():
    rep = count_avalues(2, ComplexRect(0.5, 2, 0, 50))
    found = grid_avalues(2, 0.5, 2, rep.rect.t_min, 50)
    assert rep.count == len(found) == len(rep.roots)
    for (b, g, r), z in zip(rep.roots, found):
        assert abs(complex(b, g) - z) < 1e-8
        assert r <= 1e-8
        assert abs(zeta_many([complex(b, g)])[0] - 2) <= 1e-8
    assert rep.winding_residual < 1e-3


def test_additivity_and_perturbation():
    r = ComplexRect(0.5, 2.0, 20.0, 60.0)
    total = count_avalues(1 + 1j, r, refine=False).count
    parts = sum(count_avalues(1 + 1j, q, refine=False).count for q in r.quadrants())
    assert total == parts
    nudged = count_avalues(1 + 1j, ComplexRect(0.5 + 1e-5, 2.0, 20.0 - 1e-5, 60.0), refine=False).count
    assert nudged == total


def test_conjugate_symmetry():
    a = 0.5j
    r = ComplexRect(0.5, 2.0, 5.0, 70.0)
    assert count_avalues(a, r, refine=False).count == count_avalues(a.conjugate(), r.reflect(), refine=False).count


def test_pole_counted_by_convention():
    # around s = 1 with a huge a: zeta - a has one pole and one a-value near the pole
    w, _ = winding_number(50.0, ComplexRect(0.8, 1.2, -0.3, 0.3))
    assert w == 0
    assert count_avalues(50.0, ComplexRect(0.8, 1.2, -0.3, 0.3), auto_perturb=False).count == 1


def test_boundary_on_root_detected():
    rep = count_avalues(2, ComplexRect(0.5, 2, 0, 50))
    b, g, _ = rep.roots[0]
    with pytest.raises(BoundaryError):
        winding_number(2, ComplexRect(0.5, 2, g, 50), clearance=1e-6)
    moved = count_avalues(2, ComplexRect(0.5, 2, g, 50), refine=False)
    assert moved.count in (rep.count - 1, rep.count - 2) or moved.rect.t_min != g


def test_a_zero_rejected():
    with pytest.raises(DomainError):
        count_avalues(0, ComplexRect(0.5, 1, 1, 2))


def test_littlewood_large_a():
    r = littlewood_integral(1e3, 0.75, 100, 200)
    assert r.mean == pytest.approx(math.log(1e3), rel=0.01)


def test_littlewood_singular_subtraction_accuracy():
    # a segment passing close to an a-value: doubling the panels must not move the result
    rep = count_avalues(2, ComplexRect(0.5, 2, 10, 30))
    b, g, _ = rep.roots[0]
    r = littlewood_integral(2, b + 1e-4, g - 2, g + 2)
    assert r.error < 1e-7
    with pytest.raises(PartialResultError):
        littlewood_integral(2, b, 10, 30, max_singular=0)


def test_littlewood_balance_small_window():
    bal = littlewood_balance(2, 0.55, 2.0, 15.0, 40.0)
    assert bal.gap < 1e-6 + bal.quadrature_error


def test_predict_count_arithmetic():
    T, th = 1e6, 0.05
    lT = math.log(T)
    main = T * lT**th / (8 * math.pi**1.5 * math.sqrt(th) * math.sqrt(math.log(lT)))
    m, e = predict_count(2, th, T)
    assert m == pytest.approx(main, rel=1e-12)
    assert e == pytest.approx(T * lT**th / math.log(lT) ** 0.75, rel=1e-12)
    assert predict_count(2, th, T, 1.0, 2.0)[0] == pytest.approx(main / 2, rel=1e-12)
    ratios = [predict_count(2, th, x)[0] / predict_count(2, th, x)[1] for x in (1e4, 1e8, 1e16)]
    assert ratios[0] < ratios[1] < ratios[2]
    with pytest.raises(DomainError):
        predict_count(2, 0.1, T)
    assert predict_count(2, 0.1, T, allow_any_theta=True)[0] > 0


def test_littlewood_asymptotic_formula():
    v = littlewood_asymptotic(math.e, 0.05, 1e6)
    from zetalab.primes import psi_T

    ps = psi_T(0.05, 1e6)
    assert v == pytest.approx(math.sqrt(ps) / (2 * math.sqrt(math.pi)) + 0.5 + 1 / (2 * math.sqrt(math.pi * ps)))


def test_region_integrals_two_ways():
    rep = region_decomposition_integrals(2.0, psi=4.0)
    assert max(rep.gap.values()) < 1e-9
    assert max(rep.series_bound.values()) < 1e-12
    for (j, m, n), v in rep.direct.items():
        if n % 2:
            assert abs(v) < 1e-9 and abs(rep.reduction[(j, m, n)]) < 1e-9
