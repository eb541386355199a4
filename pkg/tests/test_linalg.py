import numpy as np
import pytest

from bernoulli_ide import linalg
from bernoulli_ide.errors import DimensionError, SingularMatrixError
from bernoulli_ide.opmat import theta

REFERENCE_R = [7.83814, 2.6674, 0.386136, 0.0327736, 0.00188342, 0.000138055, 5.83649e-6, 1.49271e-7]


def test_identity_and_trivial_products():
    t = theta(7).theta
    np.testing.assert_array_equal(linalg.mat_pow(t, 0), np.eye(8))
    np.testing.assert_array_equal(linalg.mat_mul(linalg.identity(8), t), t)
    np.testing.assert_array_equal(linalg.transpose(t), t.T)
    np.testing.assert_array_equal(linalg.mat_add(t, t), 2 * t)


def test_mat_pow_matches_naive_loop():
    t = theta(7).theta
    naive = np.eye(8)
    for _ in range(5):
        naive = np.array([[sum(naive[i, l] * t[l, j] for l in range(8)) for j in range(8)] for i in range(8)])
    np.testing.assert_allclose(linalg.mat_pow(t, 5), naive, rtol=1e-13, atol=1e-17)


@pytest.mark.parametrize("a,b", [(2, 3), (0, 4), (1, 1), (3, 0)])
def test_power_additivity(a, b):
    t = theta(9).theta
    np.testing.assert_allclose(
        linalg.mat_pow(t, a + b), linalg.mat_pow(t, a) @ linalg.mat_pow(t, b), atol=1e-15
    )


def test_shape_errors():
    with pytest.raises(DimensionError):
        linalg.mat_mul(np.ones((2, 3)), np.ones((2, 3)))
    with pytest.raises(DimensionError):
        linalg.mat_add(np.ones((2, 2)), np.ones((3, 3)))
    with pytest.raises(DimensionError):
        linalg.mat_pow(np.ones((2, 3)), 2)
    with pytest.raises(DimensionError):
        linalg.solve(np.eye(3), np.ones(2))


def test_solve_transposed_identity(rng):
    r = rng.normal(size=6)
    np.testing.assert_array_equal(linalg.solve_transposed(np.eye(6), r), r)


def test_solve_transposed_diag():
    np.testing.assert_allclose(linalg.solve_transposed(np.diag([2.0, 4.0]), [2.0, 8.0]), [1.0, 2.0])


def test_lu_factor_reconstructs(rng):
    a = rng.normal(size=(8, 8))
    lu, perm = linalg.lu_factor(a)
    lower = np.tril(lu, -1) + np.eye(8)
    upper = np.triu(lu)
    np.testing.assert_allclose(lower @ upper, a[perm], atol=1e-13)


@pytest.mark.parametrize("seed", range(10))
def test_random_residuals(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(8, 8)) + 4 * np.eye(8)
    r = rng.normal(size=8)
    c = linalg.solve_transposed(m, r)
    scale = np.linalg.norm(m, 1) * np.linalg.norm(c, 1)
    assert np.max(np.abs(m.T @ c - r)) <= 1e-12 * scale


def test_singular_matrix_rejected():
    m = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrixError):
        linalg.solve(m, [1.0, 2.0])
    with pytest.raises(SingularMatrixError):
        linalg.solve(np.zeros((3, 3)), np.ones(3))


def test_near_singular_rejected():
    m = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]])
    with pytest.raises(SingularMatrixError):
        linalg.solve(m, [1.0, 1.0])


def test_condition_estimate():
    assert linalg.condition_estimate(np.eye(4)) == pytest.approx(1.0)
    assert linalg.condition_estimate(np.diag([1.0, 10.0])) == pytest.approx(10.0)


def test_first_example_system_from_reference_rhs():
    t = theta(7).theta
    m = np.eye(8) - linalg.mat_pow(t, 4) + linalg.mat_pow(t, 5)
    c = linalg.solve_transposed(m, REFERENCE_R)
    assert c[0] == pytest.approx(7.87309, rel=5e-4)
