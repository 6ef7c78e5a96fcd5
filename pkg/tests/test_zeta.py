import cmath
import math

import mpmath
import numpy as np
import pytest

from zetalab.errors import DomainError, PoleError
from zetalab.primes import default_table
from zetalab.zeta import (
    ComplexPoint,
    dirichlet_R_Y,
    log_zeta_batch,
    log_zeta_track,
    zeta,
    zeta_derivative,
    zeta_lines,
    zeta_many,
)


@pytest.mark.parametrize("s", [2.0, 0.5 + 14.134725j, 0.75 + 100j, 1.3 - 7j, 0.6 + 3000j, 5 + 1j, 0.4 + 1e4j])
def test_zeta_against_mpmath(s):
    ref = complex(mpmath.zeta(s))
    got = zeta(ComplexPoint(s.real if isinstance(s, complex) else s, s.imag if isinstance(s, complex) else 0.0))
    assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref))


def test_zeta_two_exact():
    assert abs(zeta(ComplexPoint(2.0, 0.0)) - math.pi**2 / 6) < 1e-10
    assert abs(zeta(ComplexPoint(2.0, 0.0), precision_target=1e-12) - math.pi**2 / 6) < 1e-12


def test_first_zero_and_conjugate_symmetry():
    assert abs(zeta(ComplexPoint(0.5, 14.134725141734693))) < 1e-9
    pts = np.array([0.6 + 50j, 0.9 + 3.3j, 1.7 + 400j])
    assert np.array_equal(zeta_many(np.conj(pts)), np.conj(zeta_many(pts)))


def test_pole_and_domain():
    with pytest.raises(PoleError):
        zeta(ComplexPoint(1.0, 0.0))
    with pytest.raises(DomainError):
        ComplexPoint(0.2, 1.0)
    with pytest.raises(DomainError):
        ComplexPoint(0.5, 2e7)


def test_lines_match_points():
    sig = [0.55, 0.8, 1.2]
    ts = [10.0, 250.0, 999.5]
    Z = zeta_lines(sig, ts)
    for i, t in enumerate(ts):
        for k, s in enumerate(sig):
            assert abs(Z[i, k] - zeta_many([complex(s, t)])[0]) < 1e-10


def test_derivative_against_mpmath():
    s = 0.7 + 20j
    assert abs(zeta_derivative([s])[0] - complex(mpmath.zeta(s, derivative=1))) < 1e-8


def test_log_zeta_branch_against_mpmath_continuation():
    # continuous log zeta along the horizontal path from Re s = 10
    for s in (0.6 + 30j, 0.75 + 1234.5j):
        r = log_zeta_track(s.real, s.imag)
        assert r.branch_ok
        ref = complex(mpmath.log(mpmath.zeta(s)))
        d = (r.log_zeta - ref) / (2j * math.pi)
        assert abs(r.log_zeta.real - ref.real) < 1e-8
        assert abs(d.imag) < 1e-8 and abs(d.real - round(d.real)) < 1e-8
        # the branch is tracked, so compare arg with a fine mpmath path
        path = [complex(x, s.imag) for x in np.linspace(10, s.real, 4000)]
        arg = cmath.phase(complex(mpmath.zeta(path[0])))
        prev = complex(mpmath.zeta(path[0]))
        for p in path[1:]:
            cur = complex(mpmath.zeta(p))
            arg += cmath.phase(cur / prev)
            prev = cur
        assert abs(r.log_zeta.imag - arg) < 1e-7


def test_batch_matches_scalar_tracker():
    ts = np.array([100.0, 1000.3, 54321.0])
    logz, z, ok = log_zeta_batch(0.7, ts)
    assert ok.all()
    for t, lz in zip(ts, logz):
        assert abs(log_zeta_track(0.7, t).log_zeta - lz) < 1e-7


def test_principal_branch_region():
    logz, z, ok = log_zeta_batch(2.0, [3.0, 500.0])
    assert np.allclose(logz, np.log(z))


def test_dirichlet_polynomial():
    tab = default_table(10**6)
    s = 2.0 + 3j
    ref = sum(1 / (k * p ** (k * s)) for p in (2, 3, 5, 7) for k in range(1, 5) if p**k <= 10)
    assert abs(dirichlet_R_Y(s, 10, tab) - ref) < 1e-15
    # at large sigma and Y, R_Y approaches log zeta
    assert abs(dirichlet_R_Y(3.0 + 1j, 10**5, tab) - complex(mpmath.log(mpmath.zeta(3 + 1j)))) < 1e-9
