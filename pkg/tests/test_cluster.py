import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from fbmarea.cluster import (Forest, Polymer, PolyInterval, WeakenedFunctional, bk2_restricted_sum, bk_forest_sum,
                             cayley_counts, degree_sequences, dressed_interaction, enumerate_forests,
                             full_inclusion_polymer, interpolated_covariance, is_ultrametric_similarity,
                             mayer_weakened_overlap, random_forest, restricted_forests, s_from_forest,
                             tree_degree_histogram, undressed_interaction, validate_polymer, vert_expand,
                             vert_order)


def test_forest_counts():
    # labelled forests on n vertices
    assert [len(enumerate_forests(n)) for n in range(1, 6)] == [1, 2, 7, 38, 291]


def test_forest_rejects_cycles():
    with pytest.raises(ValueError):
        Forest(3, ((0, 1), (1, 2), (0, 2)))
    with pytest.raises(ValueError):
        Forest(3, ((0, 0),))
    f = Forest(4, ((0, 1), (1, 3)))
    assert f.path(0, 3) == [(0, 1), (1, 3)]
    assert f.path(0, 2) is None
    assert sorted(map(sorted, f.components())) == [[0, 1, 3], [2]]


def test_functional_algebra():
    Z = WeakenedFunctional.product_of_linear(3, [2, Fraction(1, 2), -1])
    assert Z.at_ones() == 3 * Fraction(3, 2) * 0
    assert Z([0, 0, 0]) == 1
    dZ = Z.derivative(0)
    assert dZ([1, 1, 1]) == 2 * Fraction(3, 2) * 0


@given(st.integers(2, 4), st.integers(0, 10 ** 6))
def test_bk_identity_exact(n, seed):
    Z = WeakenedFunctional.random(n, np.random.default_rng(seed), n_terms=4)
    assert bk_forest_sum(Z) == Z.at_ones()


@given(st.integers(2, 4), st.integers(0, 10 ** 6), st.data())
def test_bk2_identity_exact(n, seed, data):
    types = data.draw(st.lists(st.sampled_from([1, 2]), min_size=n, max_size=n))
    Z = WeakenedFunctional.random(n, np.random.default_rng(seed), n_terms=4)
    # links between two type-2 objects are never interpolated
    fixed = {i for i, (a, b) in enumerate(Z.links) if types[a] == 2 and types[b] == 2}
    Z = WeakenedFunctional(n, {e: c for e, c in Z.terms.items() if all(e[i] == 0 for i in fixed)})
    assert bk2_restricted_sum(Z, types) == Z.at_ones()


def test_restricted_forests_separate_type_two():
    types = [2, 1, 2]
    for F in restricted_forests(types):
        assert all(sum(types[v] == 2 for v in c) <= 1 for c in F.components())
    assert len(restricted_forests([1, 1, 1])) == 7


@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_path_min_weakening_is_psd(n, seed):
    rng = np.random.default_rng(seed)
    links = random_forest(n, rng)
    s = s_from_forest(n, links, rng.uniform(0, 1, len(links)))
    assert is_ultrametric_similarity(s)
    owner = np.repeat(np.arange(n), 2)
    X = rng.standard_normal((2 * n, 3 * n))
    res = interpolated_covariance(X @ X.T, owner, s)
    assert res.psd and res.tree_structured


def test_non_ultrametric_weakening_flagged():
    s = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0]])
    assert not is_ultrametric_similarity(s)
    res = interpolated_covariance(np.ones((3, 3)), [0, 1, 2], s)
    assert not res.tree_structured
    assert res.min_eigenvalue < 0


def test_dressing_endpoints():
    rho = 2
    psi = sp.symbols("a0:3"), sp.symbols("b0:3")
    assert sp.expand(dressed_interaction(psi, [1] * (rho + 1)) - undressed_interaction(psi)) == 0
    diag = sum(psi[0][j] * psi[1][j] for j in range(rho + 1))
    assert sp.expand(dressed_interaction(psi, [0] * (rho + 1)) - diag) == 0
    with pytest.raises(ValueError):
        dressed_interaction(psi, [1.5, 0, 0])


def test_vert_expansion_reassembles():
    t = sp.Symbol("t")
    f = (1 + 2 * t) ** 3 * sp.exp(t)
    head, rem = vert_expand(f, t, vert_order(2, 1))
    assert sp.simplify(head + rem - f.subs(t, 1)) == 0
    assert vert_order(4, 2) == 6


def _chain():
    data = {"intervals": [{"j": 1, "k": 0}, {"j": 1, "k": 1}, {"j": 2, "k": 1}],
            "hlinks": [[0, 1]], "vlinks": [{"child": 2, "parent": 0, "tau": 1}], "ext": [0, {"index": 1, "tau": 2}]}
    return Polymer.from_json(data)


def test_polymer_lint_valid():
    rep = validate_polymer(_chain())
    assert rep.valid, rep.errors
    assert rep.n_ext == 3 and not rep.vacuum
    assert rep.n_delta == [1, 1, 0]


@pytest.mark.parametrize("mutate, message", [
    (lambda p: p.hlinks.append((0, 2)), "different scales"),
    (lambda p: p.vlinks.__setitem__(0, (2, 1, 1)), "parent"),
    (lambda p: p.ext.append((2, 1)), "lowest scale"),
    (lambda p: p.hlinks.clear(), "not connected"),
    (lambda p: p.intervals.append(PolyInterval(1, 0)), "duplicate"),
])
def test_polymer_lint_errors(mutate, message):
    p = _chain()
    mutate(p)
    rep = validate_polymer(p)
    assert not rep.valid
    assert any(message in e for e in rep.errors)


def test_full_inclusion_polymer_is_valid():
    p = full_inclusion_polymer({0: [], 1: [(0, 1)]}, {0: [0], 1: [0, 1]}, ext=[0])
    assert validate_polymer(p).valid


def test_mayer_overlap():
    p1 = Polymer([PolyInterval(1, 0)], [], [], [], 2)
    p2 = Polymer([PolyInterval(1, 0)], [], [], [], 2)
    p3 = Polymer([PolyInterval(1, 3)], [], [], [], 2)
    assert mayer_weakened_overlap(p1, p2, 1.0) == 0.0
    assert mayer_weakened_overlap(p1, p2, 0.0) == 1.0
    assert mayer_weakened_overlap(p1, p3, 0.6) == 1.0
    with pytest.raises(ValueError):
        mayer_weakened_overlap(p1, p2, 1.5)


@pytest.mark.parametrize("n", range(2, 7))
def test_cayley_standard_formula(n):
    hist = tree_degree_histogram(n)
    assert sum(hist.values()) == n ** (n - 2)
    for d in degree_sequences(n):
        c = cayley_counts(n, d, hist)
        assert c.standard_matches
        assert not c.stated_matches


def test_cayley_rejects_infeasible():
    with pytest.raises(ValueError):
        cayley_counts(4, (2, 2, 2, 2))
    with pytest.raises(ValueError):
        tree_degree_histogram(8)
