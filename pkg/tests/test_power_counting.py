from collections import Counter

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from fbmarea.power_counting import (ALPHA, FeynmanDiagram, ModelSpec, amputated_local_fourier, bubble_renormalization,
                                    classify, covariance_position, local_part_position, omega, omega_from_internal,
                                    omega_ms, phi_dphi_sigma_model, renormalized_integrand, sigma_bubble,
                                    sigma_leg_omega, signature_omega, spring_factors)


@pytest.fixture(scope="module")
def model():
    return phi_dphi_sigma_model()


def test_model_is_just_renormalizable(model):
    assert sum(model.beta[f] for f in ("phi", "dphi", "sigma")) + model.D == 0
    with pytest.raises(ValueError):
        ModelSpec(D=1, beta={"x": ALPHA}, interactions=[(("x", "x"), 1)])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sigma_legs(n):
    assert sp.simplify(sigma_leg_omega(n, None) - (1 - 4 * n * ALPHA)) == 0
    assert sigma_leg_omega(n, sp.Rational(1, 5)) == 1 - sp.Rational(4 * n, 5)


def test_classification_at_one_fifth(model):
    c = classify(model, sp.Rational(1, 5))
    assert c.divergent == [("sigma", "sigma")]
    assert c.n_ext_max == 4
    assert c.n_ext_max_pointwise == 3
    assert ("dphi",) in c.divergent_unfiltered and ("sigma",) in c.divergent_unfiltered
    assert c.notes


def test_sigma_cube_diverges_near_lower_edge(model):
    w = signature_omega(model, Counter({"sigma": 3}))
    assert w.subs(ALPHA, sp.Rational(3, 20)) > 0
    assert w.subs(ALPHA, sp.Rational(1, 5)) < 0


def test_classify_range_check(model):
    with pytest.raises(ValueError):
        classify(model, 0.3)


@given(st.fractions(min_value=sp.Rational(1, 8) + sp.Rational(1, 1000), max_value=sp.Rational(1, 4) - sp.Rational(1, 1000)))
def test_omega_decreases_with_sigma_legs(model, a):
    a = sp.Rational(a.numerator, a.denominator)
    vals = [signature_omega(model, Counter({"sigma": k}), a) for k in range(1, 6)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_bubble_degrees(model):
    d = sigma_bubble()
    d.validate(model)
    assert omega(d, model) == omega_from_internal(d, model)
    assert omega(d, model, sp.Rational(1, 5)) == sp.Rational(1, 5)
    ds = sigma_bubble(5, 2)
    assert ds.height() == 3
    assert omega_ms(ds, model, sp.Rational(1, 5)) == sp.Rational(3, 5)


def test_diagram_json_roundtrip(model):
    data = {"vertices": [{"type": 0}, {"type": 0}],
            "lines": [{"a": 0, "ia": "phi", "b": 1, "ib": "dphi"}, {"a": 0, "ia": "dphi", "b": 1, "ib": "phi"}],
            "external": [{"vertex": 0, "i": "sigma"}, {"vertex": 1, "i": "sigma"}]}
    d = FeynmanDiagram.from_json(data)
    d.validate(model)
    assert d.n_ext() == 2
    data["lines"].pop()
    with pytest.raises(ValueError):
        FeynmanDiagram.from_json(data).validate(model)


def test_local_part_two_routes():
    a, k = 0.2, 3
    assert local_part_position(k, 0.37, a) == pytest.approx(amputated_local_fourier(k, a), rel=1e-8)


def test_renormalized_integrand_vanishes_on_diagonal():
    assert renormalized_integrand(0.2, 0.2, 0.5, 0.9, 1, 3, 0.2) == 0.0


def test_covariance_position_even():
    r = np.array([0.1, 0.4])
    assert np.allclose(covariance_position("phi", 2, r, 0.2), covariance_position("phi", 2, -r, 0.2))


def test_spring_ratio_decreases():
    rs = spring_factors(1, [3, 4, 5], 0.2)
    ratios = [r.ratio for r in rs]
    assert ratios[0] > ratios[1] > ratios[2]
    for r in rs:
        assert r.ratio <= r.taylor_bound_ratio
        assert r.full == pytest.approx(r.local + r.renormalized, rel=1e-10)
    with pytest.raises(ValueError):
        bubble_renormalization(3, 3, 0.2)
