import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fbmarea.wick import (PairingSet, connected_pairing_check, domination_check, domination_constant,
                          double_factorial, holder_pair, mc_moment, moment_covariance, pairings,
                          wick_bound_check, wick_moment, wick_symmetric_bound_check)


def _psd(seed, n):
    A = np.random.default_rng(seed).standard_normal((n, n))
    return A @ A.T / n + 0.1 * np.eye(n)


@pytest.mark.parametrize("n", range(1, 7))
def test_pairing_counts(n):
    ps = PairingSet.of(2 * n)
    assert len(ps) == double_factorial(2 * n - 1)
    assert len({tuple(sorted(m)) for m in ps.matchings}) == len(ps)


def test_pairing_set_guards():
    with pytest.raises(ValueError):
        PairingSet.of(3)
    with pytest.raises(ValueError):
        PairingSet.of(14)
    assert list(pairings([1, 2, 3])) == []


def test_isserlis_fourth_moment():
    C = _psd(1, 4)
    direct = C[0, 1] * C[2, 3] + C[0, 2] * C[1, 3] + C[0, 3] * C[1, 2]
    assert wick_moment(C, [0, 1, 2, 3]) == pytest.approx(direct, rel=1e-14)
    assert wick_moment(C, [2, 2, 2, 2]) == pytest.approx(3 * C[2, 2] ** 2)


@given(st.integers(0, 1000), st.integers(1, 4))
def test_gaussian_power_moments(seed, n):
    s2 = float(np.random.default_rng(seed).uniform(0.1, 3.0))
    assert wick_moment([[s2]], [0] * (2 * n)) == pytest.approx(double_factorial(2 * n - 1) * s2 ** n)


@given(st.integers(0, 1000), st.permutations(range(6)))
def test_moment_is_symmetric(seed, perm):
    C = _psd(seed, 3)
    idx = [0, 1, 1, 2, 2, 0]
    assert wick_moment(C, [idx[p] for p in perm]) == pytest.approx(wick_moment(C, idx), rel=1e-12)


def test_odd_moment_warns():
    with pytest.warns(UserWarning):
        assert wick_moment(np.eye(2), [0, 1, 1]) == 0.0


def test_asymmetric_rejected():
    with pytest.raises(ValueError):
        wick_moment(np.array([[1.0, 0.3], [0.1, 1.0]]), [0, 1])


@pytest.mark.parametrize("seed", range(4))
def test_monte_carlo_agrees(seed):
    C = _psd(seed, 3)
    idx = [0, 1, 2, 2]
    est, se = mc_moment(C, idx, 200_000, seed)
    assert abs(est - wick_moment(C, idx)) < 3 * se


@given(st.integers(0, 10 ** 6), st.integers(1, 4), st.sampled_from([0.1, 1.0, 10.0]))
def test_ordered_bound(seed, half, K):
    C = _psd(seed, 2 * half)
    order = np.random.default_rng(seed).permutation(2 * half)
    assert wick_bound_check(C, K, order).holds
    assert wick_symmetric_bound_check(C).holds


def test_bound_with_repeated_variables():
    C = moment_covariance(_psd(3, 2), [0, 0, 1, 1])
    assert wick_bound_check(C, 1.0).holds
    with pytest.raises(ValueError):
        wick_bound_check(C, 0.0)


def test_connected_pairings():
    C = _psd(5, 4)
    res = connected_pairing_check(C, [0, 0, 1, 2], n_pairs=2)
    assert res.count > 0 and res.holds
    with pytest.raises(ValueError):
        connected_pairing_check(C, [0, 0, 0, 1], n_pairs=1)


def test_domination_constant_is_sharp():
    m = 2
    K = domination_constant(m)
    y = 1.0 / m
    assert y ** (1 / m) * math.exp(-y) == pytest.approx(K, rel=1e-14)


@given(st.floats(-2.0, 2.0), st.floats(0.0, 2.0), st.integers(1, 6), st.floats(0.01, 1.0), st.integers(0, 5))
def test_domination_bound(u, extra, n, lam, k):
    v = u ** 2 + extra
    res = domination_check(u, v, n, 2, lam, 1, -0.4, k)
    assert res.holds
    assert res.K_needed <= res.K * (1 + 1e-12)


def test_domination_requires_holder():
    with pytest.raises(ValueError):
        domination_check(2.0, 1.0, 2, 2, 0.5, 1, -0.4, 1)


def test_holder_pair():
    x = np.array([1.0, -2.0, 3.0])
    u, v = holder_pair(x, np.ones(3), 2)
    assert u == pytest.approx(2 / 3) and v == pytest.approx(14 / 3)
    assert abs(u) <= math.sqrt(v)
    with pytest.raises(ValueError):
        holder_pair(x, np.ones(3), 3)
