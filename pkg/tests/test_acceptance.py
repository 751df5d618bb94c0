"""One test per acceptance criterion; each prints its one-line PASS/FAIL result."""

from fbmarea.acceptance import CRITERIA

RESULT_LINES: list[str] = []


def _check(number):
    res = CRITERIA[number]()
    print(res.line())
    RESULT_LINES.append(res.line())
    assert res.passed, res.line()


def test_criterion_01_partition_exactness():
    _check(1)


def test_criterion_02_fbm_normalization():
    _check(2)


def test_criterion_03_divergence_law():
    _check(3)


def test_criterion_04_chen_identity():
    _check(4)


def test_criterion_05_bubble_asymptotics():
    _check(5)


def test_criterion_06_mass_constant():
    _check(6)


def test_criterion_07_interacting_variance_shape():
    _check(7)


def test_criterion_08_bk_forest_formula():
    _check(8)


def test_criterion_09_power_counting():
    _check(9)


def test_criterion_10_wick_suite():
    _check(10)


def test_criterion_11_cayley_counts():
    _check(11)


def test_criterion_12_interacting_mc():
    _check(12)
