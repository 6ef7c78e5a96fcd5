import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetalab.errors import DivergenceError, EmptyTableError
from zetalab.primes import (
    build_prime_table,
    default_table,
    load_prime_table,
    prime_sum,
    prime_zeta,
    prime_zeta_tail,
    psi,
    psi_exact,
    save_prime_table,
    sigma_T,
)


def _naive_primes(n):
    return [k for k in range(2, n + 1) if all(k % d for d in range(2, int(k**0.5) + 1))]


@given(st.integers(2, 3000))
@settings(max_examples=30, deadline=None)
def test_sieve_matches_trial_division(n):
    assert build_prime_table(n).primes.tolist() == _naive_primes(n)


def test_empty_table():
    with pytest.raises(EmptyTableError):
        build_prime_table(1)


def test_prime_powers_sorted_and_complete():
    tab = build_prime_table(1000)
    pp = tab.prime_powers
    assert np.all(np.diff(pp[:, 2]) >= 0)
    assert np.all(pp[:, 0] ** pp[:, 1] == pp[:, 2])
    expected = sorted(p**k for p in _naive_primes(1000) for k in range(1, 11) if p**k <= 1000)
    assert pp[:, 2].tolist() == expected


def test_prime_zeta_against_mpmath():
    for s in (1.5, 2.0, 3.0, 7.5):
        assert prime_zeta(s) == pytest.approx(float(mpmath.primezeta(s)), rel=1e-13)
    with pytest.raises(DivergenceError):
        prime_zeta(1.0)


def test_prime_zeta_tail_both_routes():
    tab = default_table(10**6)
    for s, X in ((1.6, 1000), (2.0, 10**4), (12.0, 500), (30.0, 2000)):
        direct = math.fsum(p ** -s for p in _naive_primes(20000) if p > X)
        # remaining primes above 20000 contribute < 20000^(1-s)/(s-1)
        assert abs(prime_zeta_tail(s, X, tab) - direct) <= 20000 ** (1 - s) / (s - 1) + 1e-15 * direct + 1e-300


def test_psi_exact_and_bracketed():
    # psi(sigma) = sum_k P(2 k sigma)/k^2, cross-checked with mpmath's prime zeta
    s = 0.75
    ref = mpmath.nsum(lambda k: mpmath.primezeta(2 * k * s) / k**2, [1, mpmath.inf])
    assert psi_exact(s) == pytest.approx(float(ref), rel=1e-12)
    pv = psi(s)
    assert abs(pv.value - psi_exact(s)) <= pv.tail_error + 1e-12


def test_psi_grows_like_log():
    # psi(1/2 + e) = log(1/e) + c + O(e)
    vals = [psi_exact(0.5 + 10.0**-j) for j in (1, 2, 3, 4)]
    gaps = np.abs(np.diff(vals) - math.log(10))
    assert np.all(np.diff(gaps) < 0) and gaps[-1] < 0.005


def test_prime_sum_and_sigma_T():
    tab = build_prime_table(100)
    assert prime_sum(tab, 1.0, 10) == pytest.approx(1 / 4 + 1 / 9 + 1 / 25 + 1 / 49, rel=1e-15)
    assert sigma_T(0.1, 1e6) == pytest.approx(0.5 + math.log(1e6) ** -0.1)


def test_cache_roundtrip(tmp_path):
    tab = build_prime_table(5000)
    path = tmp_path / "t.bin"
    save_prime_table(tab, path)
    back = load_prime_table(path)
    assert back.limit == tab.limit
    assert np.array_equal(back.primes, tab.primes)
    assert np.array_equal(back.prime_powers, tab.prime_powers)
