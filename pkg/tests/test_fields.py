import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from fbmarea.fields import (SpectralGrid, c_alpha, cov_phi_scale, cov_sigma_scale, cutoff_increment_variance,
                            cutoff_loss_fraction, grid_increment_variance, project_scale, sample_field,
                            secondary_covariance)


@pytest.mark.parametrize("alpha", [0.1, 0.15, 0.2, 0.35])
def test_c_alpha_closed_form(alpha):
    # 1 / (Gamma(1 + 2 alpha) sin(pi alpha))
    exact = 1.0 / (math.gamma(1 + 2 * alpha) * math.sin(math.pi * alpha))
    assert c_alpha(alpha) == pytest.approx(exact, rel=1e-12)


def test_c_alpha_range():
    with pytest.raises(ValueError):
        c_alpha(0.5)
    with pytest.raises(ValueError):
        c_alpha(0.0)


@pytest.mark.parametrize("lag", [2.0 ** -6, 0.3, 1.0])
def test_cutoff_variance_plus_loss_is_fbm(lag):
    a = 0.2
    v = cutoff_increment_variance(lag, a, 10) / lag ** (2 * a)
    assert v + cutoff_loss_fraction(lag, a, 10) == pytest.approx(1.0, abs=1e-8)


def test_grid_variance_matches_quadrature():
    grid = SpectralGrid(rho=6, nodes_per_band=128, xi_min=1e-4)
    for lag in (0.05, 0.5, 1.0):
        g = float(grid_increment_variance(grid, 0.15, lag)[0])
        q = cutoff_increment_variance(lag, 0.15, 6, xi_min=1e-4)
        assert g == pytest.approx(q, rel=1e-6)


def test_sample_variance_within_three_sigma():
    grid = SpectralGrid(rho=6, nodes_per_band=64)
    f = sample_field(grid, 0.2, seed=99, replicas=range(4000))
    inc = f.fbm([0.5])[:, 0]
    exact = float(grid_increment_variance(grid, 0.2, 0.5)[0])
    se = np.std(inc ** 2, ddof=1) / math.sqrt(inc.size)
    assert abs(np.mean(inc ** 2) - exact) < 3 * se


def test_replicas_are_addressable():
    grid = SpectralGrid(rho=4, nodes_per_band=32)
    full = sample_field(grid, 0.2, 5, replicas=range(6))
    part = sample_field(grid, 0.2, 5, replicas=[3, 4])
    t = np.linspace(0, 1, 7)
    assert np.allclose(full.value(t)[3:5], part.value(t))


def test_scale_projections_reassemble():
    grid = SpectralGrid(rho=5, nodes_per_band=32)
    f = sample_field(grid, 0.2, 1, replicas=range(3))
    t = np.linspace(0, 1, 11)
    singles = sum(project_scale(f, "single", j)(t) for j in range(6))
    assert np.allclose(singles, f.value(t), atol=1e-12)
    split = project_scale(f, "low", 2)(t) + project_scale(f, "high", 3)(t)
    assert np.allclose(split, f.value(t), atol=1e-12)
    nodes = project_scale(f, "single", 3).spectral_nodes()
    assert nodes.min() >= 4.0 and nodes.max() <= 16.0
    with pytest.raises(ValueError):
        project_scale(f, "single", 6)
    with pytest.raises(ValueError):
        project_scale(f, "middle", 1)


@given(st.integers(1, 4), st.floats(0.0, 3.0))
def test_scale_covariance_symmetric_and_bounded(j, r):
    c0 = cov_phi_scale(j, 0.0, 0.2)
    c = cov_phi_scale(j, r, 0.2)
    assert abs(c) <= c0 * (1 + 1e-9)
    assert cov_phi_scale(j, -r, 0.2) == pytest.approx(c, abs=1e-12)


def test_scale_covariance_against_mpmath():
    from fbmarea.partition import chi

    j, r, a = 2, 0.37, 0.2
    f = lambda x: 2 * mp.cos(r * x) * float(chi(j, float(x))) * x ** (-1 - 2 * a)
    oracle = float(mp.quad(f, [2, 3, 4, 6, 8]))
    assert cov_phi_scale(j, r, a) == pytest.approx(oracle, rel=1e-9)


def test_sigma_mass_matrix_diagonalises():
    b = np.diag([0.0, 0.7])
    m = cov_sigma_scale(1, 0.2, 0.2, b=b)
    assert m[0, 0] == pytest.approx(cov_sigma_scale(1, 0.2, 0.2, b=0.0))
    assert m[1, 1] == pytest.approx(cov_sigma_scale(1, 0.2, 0.2, b=0.7))
    assert m[0, 1] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        cov_sigma_scale(1, 0.2, 0.2, b=np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_secondary_covariance_symmetric():
    a = secondary_covariance(3, 1, 2, 0.1, 0.6, 0.2)
    b = secondary_covariance(3, 2, 1, 0.6, 0.1, 0.2)
    assert a == pytest.approx(b, rel=1e-10)
    # the fluctuation about the box average is smaller than the field itself
    assert secondary_covariance(3, 1, 1, 0.3, 0.3, 0.2) < cov_phi_scale(3, 0.0, 0.2)
