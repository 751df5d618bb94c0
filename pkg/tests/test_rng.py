import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from fbmarea.rng import normals, stream_id


@given(st.integers(0, 2 ** 32), st.integers(0, 50), st.integers(0, 40), st.integers(1, 30))
def test_positional_access(seed, start, offset, count):
    s = stream_id(3, 1)
    full = normals(seed, s, start, offset + count)
    assert np.array_equal(normals(seed, s, start + offset, count), full[offset:])


def test_streams_are_distinct():
    a = normals(7, stream_id(0, 0), 0, 100)
    b = normals(7, stream_id(0, 1), 0, 100)
    c = normals(8, stream_id(0, 0), 0, 100)
    assert not np.allclose(a, b)
    assert not np.allclose(a, c)


def test_gaussian_marginal():
    x = normals(2024, stream_id(5), 0, 200_000)
    assert abs(x.mean()) < 5 * 1 / np.sqrt(x.size)
    assert abs(x.var() - 1) < 0.01
    assert stats.kstest(x, "norm").pvalue > 1e-3


def test_stream_id_range():
    assert stream_id(1, 2) == (1 << 16) | 2
    with pytest.raises(ValueError):
        stream_id(1 << 16)
    with pytest.raises(ValueError):
        normals(0, 0, -1, 3)
