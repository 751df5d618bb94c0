import numpy as np
import pytest
from hypothesis import given, strategies as st

from fbmarea.partition import (MadicInterval, band_support, chi, chi0, chi_low, chi_range, dj_distance,
                               interval_of, partition_sum)


def test_chi0_profile():
    assert chi0(0.3) == 1.0
    assert chi0(1.0) == 1.0
    assert chi0(2.0) == 0.0
    assert chi0(7.5) == 0.0
    x = np.linspace(1.0, 2.0, 101)
    assert np.all(np.diff(chi0(x)) <= 0)


def test_chi0_midpoint_symmetry():
    # the bump ratio is 1/2 exactly halfway through the transition band
    assert chi0(1.5) == pytest.approx(0.5, abs=1e-15)
    assert chi0(2.0, 3.0) == pytest.approx(0.5, abs=1e-15)


def test_band_support_and_locality():
    for j in range(1, 6):
        lo, hi = band_support(j)
        assert chi(j, 0.999 * lo) == 0.0
        assert chi(j, 1.001 * hi) == 0.0
        assert chi(j, 2.0 ** j) == pytest.approx(1.0)


def test_negative_scale_rejected():
    with pytest.raises(ValueError):
        chi(-1, 1.0)
    with pytest.raises(ValueError):
        partition_sum(1.0, -2)


@given(st.floats(-4096.0, 4096.0), st.sampled_from([2, 3]))
def test_partition_of_unity(xi, M):
    J = 12 if M == 2 else 8
    assert abs(partition_sum(xi, J, M) - 1.0) < 1e-12


@given(st.floats(0.0, 500.0), st.integers(0, 4), st.integers(0, 8))
def test_chi_range_telescopes(xi, lo, width):
    hi = lo + width
    explicit = sum(chi(j, xi) for j in range(lo, hi + 1))
    assert chi_range(lo, hi, xi) == pytest.approx(explicit, abs=1e-13)


def test_chi_low_matches_sum():
    xi = np.linspace(0, 70, 333)
    assert np.allclose(chi_low(5, xi), sum(chi(j, xi) for j in range(6)), atol=1e-14)


@given(st.floats(0.0, 0.999999), st.integers(0, 10))
def test_interval_nesting(x, j):
    iv = interval_of(x, j)
    assert iv.lo <= x < iv.hi
    if j > 0:
        par = iv.parent()
        assert iv.is_inside(par)
        assert iv in par.children()
    assert len(iv.descendants(j + 3)) == 8


def test_half_open_convention():
    # a dyadic boundary point belongs to the interval on its right
    assert interval_of(0.5, 1).k == 1
    assert interval_of(0.25, 2).k == 1


def test_interval_validation():
    with pytest.raises(ValueError):
        MadicInterval(-1, 0)
    with pytest.raises(ValueError):
        MadicInterval(2, 0, M=1)
    with pytest.raises(ValueError):
        MadicInterval(0, 0).parent()


def test_dj_distance():
    a, b = MadicInterval(4, 3), MadicInterval(4, 7)
    assert dj_distance(a, b, 2) == 1.0
    assert dj_distance(a, b, 4) == 4.0
    with pytest.raises(ValueError):
        dj_distance(a, MadicInterval(3, 1), 2)
