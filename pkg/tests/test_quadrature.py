import math

import numpy as np
import pytest

from fbmarea.quadrature import adaptive_simpson, composite_gauss_legendre, gauss_legendre


def test_gauss_legendre_polynomials():
    x, w = gauss_legendre(5, -1.0, 3.0)
    for p in range(10):
        exact = (3.0 ** (p + 1) - (-1.0) ** (p + 1)) / (p + 1)
        assert np.dot(w, x ** p) == pytest.approx(exact, rel=1e-13)


def test_composite_rule_oscillatory():
    x, w = composite_gauss_legendre(np.linspace(0, 50, 51), 20)
    assert np.dot(w, np.cos(7 * x)) == pytest.approx(math.sin(350) / 7, abs=1e-12)


def test_adaptive_simpson_peak():
    f = lambda t: 1.0 / (1e-4 + (np.asarray(t) - 0.3) ** 2)
    exact = 100.0 * (math.atan(70.0) + math.atan(30.0))
    assert adaptive_simpson(f, 0.0, 1.0, tol=1e-8) == pytest.approx(exact, rel=1e-8)
