"""Dense and sparse SPD solves shared by every other module.

Small systems (metric tensors, projection algebra, m <= 6) go through a
hand-rolled Cholesky so non-positive pivots surface as :class:`NonSpdError`.
Global finite element systems are assembled sparse but factorized dense:
every mesh in this package stays below ~1200 dofs, where one LAPACK
Cholesky is cheaper and more deterministic than any iterative scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse


class NonSpdError(Exception):
    """A Cholesky factorization hit a non-positive pivot."""


class SingularSystemError(Exception):
    """A global system could not be factorized (rigid modes, bad BCs)."""


def cholesky_small(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a small SPD matrix.

    Raises
    ------
    NonSpdError
        If a pivot is non-positive or non-finite.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    lower = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - lower[j, :j] @ lower[j, :j]
        if not np.isfinite(d) or d <= 0.0:
            raise NonSpdError(f"non-positive pivot {d!r} at row {j}")
        lower[j, j] = np.sqrt(d)
        for i in range(j + 1, n):
            lower[i, j] = (a[i, j] - lower[i, :j] @ lower[j, :j]) / lower[j, j]
    return lower


def solve_spd_small(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a @ x = b`` for a small SPD matrix via Cholesky."""
    lower = cholesky_small(a)
    y = scipy.linalg.solve_triangular(lower, np.asarray(b, dtype=float), lower=True)
    return scipy.linalg.solve_triangular(lower.T, y, lower=False)


def inv_spd_small(a: np.ndarray) -> np.ndarray:
    """Inverse of a small SPD matrix via Cholesky."""
    lower = cholesky_small(a)
    eye = np.eye(a.shape[0])
    y = scipy.linalg.solve_triangular(lower, eye, lower=True)
    return scipy.linalg.solve_triangular(lower.T, y, lower=False)


def check_spd_small(a: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Validate symmetry (to ``rel_tol``) and positive definiteness.

    Returns the symmetrized matrix so callers can store a clean copy.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(np.abs(a).max(), 1.0)
    if np.abs(a - a.T).max() > rel_tol * scale:
        raise NonSpdError("matrix is not symmetric")
    sym = 0.5 * (a + a.T)
    cholesky_small(sym)  # raises NonSpdError if not positive definite
    return sym


@dataclass
class SparseSystem:
    """Assembled symmetric system ``A x = rhs`` in COO form.

    The pattern is expected to be structurally symmetric; after Dirichlet
    elimination the matrix must be SPD for :func:`solve_sparse_spd`.
    """

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    rhs: np.ndarray

    def matrix(self) -> scipy.sparse.csr_matrix:
        shape = (self.dim, self.dim)
        coo = scipy.sparse.coo_matrix((self.vals, (self.rows, self.cols)), shape=shape)
        return coo.tocsr()

    @classmethod
    def from_csr(cls, a: scipy.sparse.csr_matrix, rhs: np.ndarray) -> "SparseSystem":
        coo = a.tocoo()
        return cls(dim=a.shape[0], rows=coo.row, cols=coo.col, vals=coo.data,
                   rhs=np.asarray(rhs, dtype=float))


class SpdFactor:
    """Reusable Cholesky factor of a sparse SPD matrix.

    Factorizes once (densified, see module docstring) and serves any number
    of right-hand sides; the factor object itself is never mutated.
    """

    def __init__(self, a: scipy.sparse.spmatrix | np.ndarray):
        dense = a.toarray() if scipy.sparse.issparse(a) else np.asarray(a, dtype=float)
        if dense.size and not np.all(np.isfinite(dense)):
            raise SingularSystemError("matrix has non-finite entries")
        try:
            self._factor = scipy.linalg.cho_factor(dense, lower=True)
        except scipy.linalg.LinAlgError as err:
            raise SingularSystemError(str(err)) from err

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return scipy.linalg.cho_solve(self._factor, np.asarray(rhs, dtype=float))


def solve_sparse_spd(system: SparseSystem) -> np.ndarray:
    """Direct solve of an assembled SPD system.

    Raises
    ------
    SingularSystemError
        If factorization fails (e.g. boundary conditions left rigid modes).
    """
    if system.dim == 0:
        return np.zeros(0)
    return SpdFactor(system.matrix()).solve(system.rhs)
