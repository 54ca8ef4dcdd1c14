import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparsewf.metrics import classify_success, dist, nmse

vec = arrays(np.float64, 5, elements=st.floats(-100, 100))


def test_dist_examples():
    x = np.array([1.0, -2.0, 0.5])
    assert dist(x, x) == 0
    assert dist(-x, x) == 0
    assert dist(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(math.sqrt(2), rel=1e-15)


def test_dist_length_mismatch():
    with pytest.raises(ValueError):
        dist(np.ones(2), np.ones(3))


@given(vec, vec, vec)
@settings(max_examples=100, deadline=None)
def test_dist_sign_quotient_pseudometric(a, b, c):
    d = dist(a, b)
    assert d >= 0
    assert dist(-a, b) == d and dist(a, -b) == d
    assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9 * (1 + np.abs([a, b, c]).max())


def test_nmse_examples():
    x = np.array([3.0, 0.0, -4.0])
    assert nmse(x, x) == 0
    assert nmse(-x, x) == 0
    assert nmse(2 * x, x) == pytest.approx(1.0, rel=1e-15)


def test_nmse_zero_truth():
    with pytest.raises(ValueError):
        nmse(np.ones(2), np.zeros(2))


@given(vec, st.floats(1e-3, 1e3), st.booleans())
@settings(max_examples=60, deadline=None)
def test_nmse_scale_invariant(xhat, c, flip):
    x = np.array([1.0, -2.0, 0.0, 0.5, 3.0])
    c = -c if flip else c
    assert nmse(c * xhat, c * x) == pytest.approx(nmse(xhat, x), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("value,expected", [(9.9e-6, True), (1e-5, False), (0.0, True), (0.3, False)])
def test_classify_success(value, expected):
    assert classify_success(value) is expected
