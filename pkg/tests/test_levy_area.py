import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from fbmarea.fields import SpectralGrid
from fbmarea.levy_area import (AreaSampler, aitken_limit, boundary_variance, boundary_variance_limit,
                               chen_residual, grid_second_moment, piece_kernels, sector_inner, sum_kernel,
                               variance_vs_cutoff)


@pytest.fixture(scope="module")
def sampler():
    return AreaSampler(SpectralGrid(rho=4, nodes_per_band=24), 0.2)


@pytest.fixture(scope="module")
def coeffs(sampler):
    return sampler.coefficients(17, range(3))


def test_sum_kernel_limit():
    assert sum_kernel(np.array([0.0]), 0.2, 0.9)[0] == pytest.approx(0.7)
    xi = 3.3
    exact = (np.exp(1j * xi * 0.9) - np.exp(1j * xi * 0.2)) / (1j * xi)
    assert sum_kernel(np.array([xi]), 0.2, 0.9)[0] == pytest.approx(exact)


def test_area_matches_time_quadrature(sampler, coeffs):
    c1, c2 = coeffs
    fast = sampler.area(c1, c2, 0.1, 0.8)[0]
    slow = sampler.quadrature_area(c1, c2, 0.1, 0.8, tol=1e-11)
    assert fast == pytest.approx(slow, rel=1e-8, abs=1e-10)


@pytest.mark.parametrize("form", ["projection", "sector"])
def test_decomposition_is_exact(form, coeffs):
    s = AreaSampler(SpectralGrid(rho=4, nodes_per_band=24), 0.2, form=form)
    c1, c2 = coeffs
    assert np.allclose(s.area(c1, c2, 0.3, 0.55), s.direct_area(c1, c2, 0.3, 0.55), atol=1e-12)


def test_split_forms_differ_in_pieces_only(coeffs):
    grid = SpectralGrid(rho=4, nodes_per_band=24)
    p = AreaSampler(grid, 0.2, "projection").pieces(*coeffs, 0.0, 1.0)
    q = AreaSampler(grid, 0.2, "sector").pieces(*coeffs, 0.0, 1.0)
    assert np.allclose(p["area"], q["area"], atol=1e-12)
    assert not np.allclose(p["dA_plus"], q["dA_plus"])


@given(st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3, unique=True))
def test_chen_identity(times):
    s, u, t = sorted(times)
    if t - s < 1e-6:
        return
    sampler = AreaSampler(SpectralGrid(rho=3, nodes_per_band=16), 0.15)
    c1, c2 = sampler.coefficients(4, range(2))
    res, scale = chen_residual(sampler, c1, c2, s, u, t)
    assert np.all(np.abs(res) <= 1e-9 * scale + 1e-14)


def test_second_moment_matches_mc(sampler):
    K = piece_kernels(sampler, 0.2, 0.7)
    tot = K["dA_plus"] - K["dA_minus"] + K["bnd_plus"] - K["bnd_minus"]
    exact = grid_second_moment(sampler, tot) / sampler.norm ** 2
    c1, c2 = sampler.coefficients(8, range(4000))
    a2 = sampler.area(c1, c2, 0.2, 0.7) ** 2
    assert abs(a2.mean() - exact) < 3 * a2.std(ddof=1) / math.sqrt(a2.size)


def test_invalid_arguments(sampler, coeffs):
    with pytest.raises(ValueError):
        sampler.pieces(*coeffs, 0.5, 0.5)
    with pytest.raises(ValueError):
        AreaSampler(SpectralGrid(rho=1, nodes_per_band=8), 0.2, form="diagonal")


def test_sector_inner_against_mpmath():
    a = 0.2
    f = lambda u: abs(u - 1) ** (1 - 2 * a) * u ** (-1 - 2 * a)
    for X in (0.8, 3.0, 40.0):
        oracle = float(mp.quad(f, [0.5, 1.0, X] if X > 1 else [0.5, X]))
        assert sector_inner(X, a) == pytest.approx(oracle, rel=1e-10)
    assert sector_inner(0.4, a) == 0.0


def test_boundary_limit_closed_form():
    # (4 / alpha) int_R (1 - cos u)|u|^(-1-4a) du, scaled by lag^(4a)
    for a in (0.15, 0.2):
        K1 = math.pi / (math.gamma(1 + 4 * a) * math.sin(2 * math.pi * a))
        assert boundary_variance_limit(a, 0.5) == pytest.approx(4 * K1 / a * 0.5 ** (4 * a), rel=1e-10)


def test_boundary_variance_increases_to_limit():
    vals = [boundary_variance(2.0 ** k, 0.2) for k in (4, 6, 8)]
    assert vals[0] < vals[1] < vals[2] < boundary_variance_limit(0.2)


def test_plus_variance_grows_with_cutoff():
    res = variance_vs_cutoff(0.2, [16.0, 64.0, 256.0])
    assert np.all(np.diff(res.variances) > 0)
    assert 0 < res.slope < 1


def test_aitken_on_geometric_sequence():
    seq = [3.0 + 2.0 * 0.5 ** k for k in range(5)]
    assert aitken_limit(seq) == pytest.approx(3.0, abs=1e-14)
