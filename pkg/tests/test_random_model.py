import math

import mpmath
import numpy as np
import pytest

from zetalab.errors import DivergenceError
from zetalab.primes import default_table, psi_exact
from zetalab.random_model import (
    PhaseAssignment,
    R_Y_rand_batch,
    SampleSet,
    check_moment_bound,
    check_tail_bound,
    exact_prime_moment,
    log_zeta_rand_batch,
    sample_log_zeta_rand,
    sample_R_Y_rand,
    sample_set,
    tail_profile,
    tail_variance,
)


def test_constant_phases_give_log_zeta():
    # X(p) = 1 makes the random product the Euler product itself
    val, bound = sample_log_zeta_rand(2.0, 10**5, PhaseAssignment.constant(10**5))
    assert abs(val - math.log(math.pi**2 / 6)) <= bound
    assert abs(val - math.log(math.pi**2 / 6)) < 1e-5


def test_diverges_at_half():
    with pytest.raises(DivergenceError):
        log_zeta_rand_batch(0.5, 100, [1])


def test_seeded_sample_is_explicit_sum():
    a = PhaseAssignment(77, 200)
    th = a.phase_map()
    ref = sum(-np.log(1 - np.exp(1j * t) * p**-0.8) for p, t in th.items())
    val, _ = sample_log_zeta_rand(0.8, 200, a)
    assert abs(val - ref) < 1e-12


def test_conjugate_assignment():
    v1 = log_zeta_rand_batch(0.7, 500, [3, 4], gaussian_tail=True)[0]
    v2 = log_zeta_rand_batch(0.7, 500, [3, 4], gaussian_tail=True, conjugate=True)[0]
    assert np.allclose(v2, np.conj(v1), atol=1e-14)


def test_phase_depends_only_on_prime():
    small = PhaseAssignment(5, 100).phase_map()
    big = PhaseAssignment(5, 10**4).phase_map()
    assert all(big[p] == t for p, t in small.items())


def test_R_Y_explicit():
    a = PhaseAssignment(11, 50)
    th = a.phase_map()
    ref = sum(np.exp(1j * k * th[p]) / (k * p ** (k * 0.6)) for p in th for k in range(1, 7) if p**k <= 50)
    assert abs(sample_R_Y_rand(0.6, 50, a) - ref) < 1e-12


def test_tail_variance_formula():
    tab = default_table(10**6)
    ps = tab.primes_upto(10**6)
    X = 1000
    direct = sum(float(np.sum(ps[ps > X].astype(float) ** (-2 * k * 0.75))) / k**2 for k in range(1, 6))
    # primes beyond the table contribute about int_{1e6}^inf x^-1.5 / log x
    extra = float(mpmath.quad(lambda x: x**-1.5 / mpmath.log(x), [1e6, mpmath.inf]))
    assert tail_variance(0.75, X) == pytest.approx(direct + extra, rel=2e-3)


def test_variance_is_psi_over_two():
    s = sample_set(0.75, 2000, 200_000, 1)
    v = s.values
    assert np.var(v.real) == pytest.approx(psi_exact(0.75) / 2, rel=0.02)
    assert np.var(v.imag) == pytest.approx(psi_exact(0.75) / 2, rel=0.02)


def test_sample_set_regenerates_and_roundtrips(tmp_path):
    s = sample_set(0.7, 300, 50, 9)
    assert np.array_equal(s.regenerate(), s.values)
    path = tmp_path / "s.csv"
    s.to_csv(path)
    back = SampleSet.from_csv(path, 0.7, 300)
    assert np.array_equal(back.values, s.values)
    assert np.array_equal(back.regenerate(), s.values)


def test_truncation_consistency():
    seeds = np.arange(1, 200, dtype=np.uint64)
    lo, rms = log_zeta_rand_batch(0.8, 1000, seeds, gaussian_tail=False)
    hi, _ = log_zeta_rand_batch(0.8, 10**5, seeds, gaussian_tail=False)
    assert np.sqrt(np.mean(np.abs(hi - lo) ** 2)) < 2 * rms


def test_exact_moment_brute_force():
    # E|X2/2^s + X3/3^s|^4 by averaging over a fine phase grid
    sig = 0.7
    a, b = 2**-sig, 3**-sig
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    A, B = np.meshgrid(th, th)
    brute = np.mean(np.abs(a * np.exp(1j * A) + b * np.exp(1j * B)) ** 4)
    assert exact_prime_moment(sig, 3, 2) == pytest.approx(brute, rel=1e-12)


def test_moment_bound_and_tails():
    r = check_moment_bound(0.75, 100, 3, 50_000, seed=2)
    assert r.passed
    assert abs(r.prime_moment - r.prime_moment_exact) < 4 * r.prime_moment_se
    t = check_tail_bound(0.75, 100, 3.0, 50_000, seed=3)
    assert t.ci_low <= t.frequency <= t.ci_high
    assert 0.0 <= t.frequency < 0.05
    _, slope, _ = tail_profile(0.75, 100, [0.5, 1.0, 1.5, 2.0, 2.5], 50_000, seed=4)
    assert slope < 0


def test_batch_matches_single():
    seeds = [10, 20]
    v = R_Y_rand_batch(0.65, 1000, seeds)
    assert v[1] == sample_R_Y_rand(0.65, 1000, PhaseAssignment(20, 1000))
