"""SPD solve kernels against independent elimination oracles."""

import numpy as np
import pytest
import scipy.sparse

from ddmech.linalg import (NonSpdError, SingularSystemError, SparseSystem,
                           SpdFactor, cholesky_small, inv_spd_small,
                           solve_sparse_spd, solve_spd_small)


def gauss_solve(a, b):
    """Dense Gaussian elimination with partial pivoting (test oracle)."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    n = a.shape[0]
    for k in range(n):
        p = k + np.argmax(np.abs(a[k:, k]))
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, n):
            f = a[i, k] / a[k, k]
            a[i, k:] -= f * a[k, k:]
            b[i] -= f * b[k]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - a[i, i + 1:] @ x[i + 1:]) / a[i, i]
    return x


def random_spd(n, rng):
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


class TestSolveSpdSmall:
    def test_identity(self):
        x = solve_spd_small(np.eye(2), np.array([3.0, 4.0]))
        np.testing.assert_allclose(x, [3.0, 4.0], rtol=0, atol=0)

    def test_diagonal(self):
        x = solve_spd_small(np.diag([2.0, 4.0]), np.array([2.0, 4.0]))
        np.testing.assert_allclose(x, [1.0, 1.0], rtol=0, atol=1e-15)

    def test_matches_gaussian_elimination(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            a = random_spd(6, rng)
            b = rng.standard_normal(6)
            x = solve_spd_small(a, b)
            np.testing.assert_allclose(x, gauss_solve(a, b), rtol=1e-10, atol=1e-12)

    def test_recovers_known_solution(self):
        rng = np.random.default_rng(7)
        for n in (1, 2, 3, 6):
            a = random_spd(n, rng)
            x0 = rng.standard_normal(n)
            x = solve_spd_small(a, a @ x0)
            np.testing.assert_allclose(x, x0, rtol=1e-10, atol=1e-12)

    def test_residual_small(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            a = random_spd(5, rng)
            b = rng.standard_normal(5)
            x = solve_spd_small(a, b)
            assert np.linalg.norm(a @ x - b) / np.linalg.norm(b) <= 1e-10

    def test_non_spd_rejected(self):
        with pytest.raises(NonSpdError):
            cholesky_small(np.array([[1.0, 2.0], [2.0, 1.0]]))  # indefinite

    def test_inv_spd_small(self):
        rng = np.random.default_rng(11)
        a = random_spd(4, rng)
        np.testing.assert_allclose(inv_spd_small(a) @ a, np.eye(4), atol=1e-11)


class TestSolveSparseSpd:
    def test_identity_system(self):
        rhs = np.array([1.0, -2.0, 3.0])
        sys_ = SparseSystem.from_csr(scipy.sparse.identity(3, format="csr"), rhs)
        np.testing.assert_allclose(solve_sparse_spd(sys_), rhs, atol=0)

    def test_laplacian_matches_dense(self):
        a = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
        rhs = np.ones(3)
        sys_ = SparseSystem.from_csr(scipy.sparse.csr_matrix(a), rhs)
        np.testing.assert_allclose(solve_sparse_spd(sys_), gauss_solve(a, rhs),
                                   rtol=1e-12)

    def test_bar_uniform_load_parabolic(self):
        # fixed-free bar, EA=1, uniform load q=1: u(x) = x - x^2/2 exactly
        # at the nodes for consistent loads
        n = 8
        h = 1.0 / n
        k = (np.diag(np.full(n, 2.0)) + np.diag(np.full(n - 1, -1.0), 1)
             + np.diag(np.full(n - 1, -1.0), -1)) / h
        k[-1, -1] = 1.0 / h
        f = np.full(n, h)
        f[-1] = h / 2
        x = np.linspace(h, 1.0, n)
        sys_ = SparseSystem.from_csr(scipy.sparse.csr_matrix(k), f)
        np.testing.assert_allclose(solve_sparse_spd(sys_), x - 0.5 * x**2,
                                   rtol=1e-12)

    def test_residual_property(self):
        rng = np.random.default_rng(5)
        a = random_spd(40, rng)
        rhs = rng.standard_normal(40)
        sys_ = SparseSystem.from_csr(scipy.sparse.csr_matrix(a), rhs)
        x = solve_sparse_spd(sys_)
        assert np.linalg.norm(a @ x - rhs) / np.linalg.norm(rhs) <= 1e-8

    def test_singular_rejected(self):
        a = scipy.sparse.csr_matrix(np.zeros((3, 3)))
        with pytest.raises(SingularSystemError):
            solve_sparse_spd(SparseSystem.from_csr(a, np.ones(3)))

    def test_factor_reuse(self):
        rng = np.random.default_rng(9)
        a = random_spd(12, rng)
        factor = SpdFactor(scipy.sparse.csr_matrix(a))
        for _ in range(3):
            b = rng.standard_normal(12)
            np.testing.assert_allclose(a @ factor.solve(b), b, atol=1e-9)

    def test_matrix_roundtrip(self):
        a = np.array([[2.0, -1.0], [-1.0, 2.0]])
        sys_ = SparseSystem.from_csr(scipy.sparse.csr_matrix(a), np.ones(2))
        np.testing.assert_allclose(sys_.matrix().toarray(), a)
