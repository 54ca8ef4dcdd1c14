import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsewf.metrics import dist
from sparsewf.model import measure, sample_measurement_vectors, sample_sparse_signal
from sparsewf.spectral import (
    assemble_initial,
    build_truncated_matrix,
    phi_squared,
    power_method,
    truncated_spectral_init,
)


@pytest.mark.parametrize("y,expected", [([2, 4, 6], 4.0), ([0, 0, 0], 0.0), ([-3, 1], 0.0)])
def test_phi_squared(y, expected):
    assert phi_squared(np.array(y, dtype=float)) == expected


def test_phi_squared_empty():
    with pytest.raises(ValueError):
        phi_squared(np.array([]))


def test_truncated_matrix_hand_example():
    Y = build_truncated_matrix(np.array([[1.0, 0.0]]), np.array([4.0]), [0, 1], 3.0)
    np.testing.assert_array_equal(Y, [[4.0, 0.0], [0.0, 0.0]])


@given(st.floats(1.0, 10.0), st.floats(1e-3, 1e6))
@settings(max_examples=30, deadline=None)
def test_single_measurement_never_truncated(alpha, y1):
    Y = build_truncated_matrix(np.array([[1.0, 2.0]]), np.array([y1]), [0, 1], alpha)
    np.testing.assert_allclose(Y, y1 * np.array([[1.0, 2.0], [2.0, 4.0]]), rtol=1e-14)


def test_truncated_matrix_zero_intensities():
    A = sample_measurement_vectors(5, 8, 0)
    assert np.all(build_truncated_matrix(A, np.zeros(8), [1, 3], 3.0) == 0)


def test_truncated_matrix_drops_large_rows():
    # phi^2 = 5.5, alpha=1 keeps |y| <= 5.5 -> only the first row survives
    A = np.array([[1.0, 1.0], [2.0, -1.0]])
    y = np.array([1.0, 10.0])
    Y = build_truncated_matrix(A, y, [0, 1], 1.0)
    np.testing.assert_allclose(Y, 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_truncated_matrix_matches_loop_and_is_symmetric(rng):
    A = rng.standard_normal((25, 7))
    y = rng.standard_normal(25) ** 2 * 2
    y[3] = 100.0
    S0 = np.array([1, 4, 6])
    phi2 = y.mean()
    expected = np.zeros((3, 3))
    for i in range(25):
        if abs(y[i]) <= 9 * phi2:
            a = A[i, S0]
            expected += y[i] * np.outer(a, a)
    expected /= 25
    Y = build_truncated_matrix(A, y, S0, 3.0)
    np.testing.assert_allclose(Y, expected, rtol=1e-12, atol=1e-14)
    np.testing.assert_array_equal(Y, Y.T)


def test_truncated_matrix_errors():
    with pytest.raises(ValueError):
        build_truncated_matrix(np.ones((2, 2)), np.ones(2), [], 3.0)
    with pytest.raises(ValueError):
        build_truncated_matrix(np.ones((2, 2)), np.ones(2), [0], 0.0)


def test_restriction_to_true_support_commutes(rng):
    # (a_i . x)^2 computed on all columns equals it computed on S* alone
    for trial in range(10):
        n, k, m = 12, 3, 40
        x = sample_sparse_signal(n, k, trial)
        A = rng.standard_normal((m, n))
        y_full = (A @ x.values) ** 2
        y_restricted = (A[:, x.support] @ x.values[x.support]) ** 2
        np.testing.assert_allclose(
            build_truncated_matrix(A, y_full, x.support, 3.0),
            build_truncated_matrix(A[:, x.support], y_restricted, np.arange(k), 3.0),
            rtol=1e-12, atol=1e-13,
        )


def test_kept_fraction_monotone_in_alpha():
    x = sample_sparse_signal(50, 5, 1)
    A = sample_measurement_vectors(50, 300, 2)
    y = measure(x, A, 0.5, 3).intensities
    kept = [truncated_spectral_init(A, y, x.support, a, 5, 0).kept_fraction
            for a in (0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0)]
    assert all(b >= a for a, b in zip(kept, kept[1:]))
    assert kept[0] < 1.0 and kept[-1] == 1.0


def test_power_method_diagonal():
    v = power_method(np.diag([3.0, 1.0]), 100, 0)
    np.testing.assert_allclose(v, [1.0, 0.0], atol=1e-10)


def test_power_method_two_by_two():
    v = power_method(np.array([[2.0, 1.0], [1.0, 2.0]]), 100, 5)
    np.testing.assert_allclose(v, [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-8)


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_power_method_degenerate_unit_norm(seed):
    v = power_method(np.eye(4), 10, seed)
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    assert v[np.argmax(np.abs(v))] > 0


def test_power_method_matches_eigh(rng):
    M = rng.standard_normal((6, 6))
    Y = M @ M.T
    w, V = np.linalg.eigh(Y)
    v = power_method(Y, 2000, 1)
    assert abs(abs(v @ V[:, -1]) - 1) < 1e-10


def test_power_method_errors():
    with pytest.raises(ValueError):
        power_method(np.zeros((0, 0)), 10, 0)
    with pytest.raises(ValueError):
        power_method(np.eye(2), 0, 0)


def test_assemble_initial_examples():
    z = assemble_initial(np.array([1.0, 0.0]), np.array([2, 4]), 5.0, 6)
    assert z.tolist() == [0, 0, 5, 0, 0, 0]
    assert np.all(assemble_initial(np.array([0.3, 0.4]), np.array([0, 1]), 0.0, 3) == 0)
    z = assemble_initial(np.array([0.3, -0.4]), np.array([0, 2]), 2.5, 3)
    assert abs(np.linalg.norm(z) - 2.5) < 1e-12 * 2.5
    assert z[1] == 0


def test_assemble_initial_errors():
    with pytest.raises(ValueError):
        assemble_initial(np.ones(2), np.array([0, 1, 2]), 1.0, 4)
    with pytest.raises(ValueError):
        assemble_initial(np.ones(2), np.array([0, 7]), 1.0, 4)


def test_init_result_invariants():
    x = sample_sparse_signal(200, 5, 4)
    A = sample_measurement_vectors(200, 600, 5)
    y = measure(x, A).intensities
    res = truncated_spectral_init(A, y, x.support, 3.0, 100, 9)
    off = np.setdiff1d(np.arange(200), res.support_used)
    assert np.all(res.z0[off] == 0)
    assert abs(np.linalg.norm(res.z0) - res.phi) <= 1e-12 * res.phi
    assert res.power_iters_run == 100
    assert 0 < res.kept_fraction <= 1
    assert dist(res.z0, x.values) < 0.5 * np.linalg.norm(x.values)
