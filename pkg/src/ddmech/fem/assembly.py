"""Global assembly and the two linear solves of the data-driven method.

The displacement equation assembles K = sum(w B^T C B) with rhs
sum(w B^T C eps*); the multiplier equation reuses the same matrix (with
S^{-1} = C) and rhs f_ext - sum(w B^T sig*). Dirichlet conditions are
eliminated by row/column partitioning so both reduced matrices stay SPD.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from ..linalg import SparseSystem, SpdFactor
from .elements import ElementData, element_data, strains
from .mesh import Mesh


@dataclass
class QuadStates:
    """Mechanical and material phase points at every quadrature point."""

    eps_mech: np.ndarray
    sig_mech: np.ndarray
    eps_mat: np.ndarray
    sig_mat: np.ndarray
    weights: np.ndarray

    @classmethod
    def zeros(cls, n_quad: int, m: int, weights: np.ndarray) -> "QuadStates":
        return cls(np.zeros((n_quad, m)), np.zeros((n_quad, m)),
                   np.zeros((n_quad, m)), np.zeros((n_quad, m)),
                   np.asarray(weights, dtype=float))

    @property
    def n_quad(self) -> int:
        return self.eps_mech.shape[0]

    @property
    def m(self) -> int:
        return self.eps_mech.shape[1]

    def copy(self) -> "QuadStates":
        return QuadStates(self.eps_mech.copy(), self.sig_mech.copy(),
                          self.eps_mat.copy(), self.sig_mat.copy(),
                          self.weights.copy())


@dataclass
class Field:
    """Primary nodal fields: displacement/temperature and the multiplier."""

    u: np.ndarray
    beta: np.ndarray


def assemble_stiffness(ed: ElementData, n_dofs: int, M: np.ndarray) -> scipy.sparse.csr_matrix:
    """K = sum_e w_e B_e^T M_e B_e; M is (m, m) or per-element (E, m, m)."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 2:
        M = np.broadcast_to(M, (ed.n_elements,) + M.shape)
    ke = np.einsum("e,emk,emn,enl->ekl", ed.w, ed.b, M, ed.b, optimize=True)
    k = ed.dofs.shape[1]
    rows = np.repeat(ed.dofs, k, axis=1).ravel()
    cols = np.tile(ed.dofs, (1, k)).ravel()
    coo = scipy.sparse.coo_matrix((ke.ravel(), (rows, cols)), shape=(n_dofs, n_dofs))
    return coo.tocsr()


def bt_dot(ed: ElementData, n_dofs: int, vals: np.ndarray) -> np.ndarray:
    """f = sum_e w_e B_e^T vals_e for per-element vectors vals (E, m)."""
    fe = np.einsum("e,emk,em->ek", ed.w, ed.b, vals)
    f = np.zeros(n_dofs)
    np.add.at(f, ed.dofs.ravel(), fe.ravel())
    return f


class ConstrainedSystem:
    """Dirichlet-eliminated SPD operator with a reusable factorization."""

    def __init__(self, k_csr: scipy.sparse.csr_matrix, dirichlet_dofs: np.ndarray,
                 n_dofs: int):
        self.n_dofs = n_dofs
        self.fixed = np.asarray(dirichlet_dofs, dtype=int)
        mask = np.ones(n_dofs, dtype=bool)
        mask[self.fixed] = False
        self.free = np.where(mask)[0]
        k_csc = k_csr.tocsc()
        self.k_ff = k_csc[self.free][:, self.free]
        self.k_fc = k_csc[self.free][:, self.fixed]
        self.factor = SpdFactor(self.k_ff)

    def solve(self, f_full: np.ndarray, fixed_values: np.ndarray) -> np.ndarray:
        """Solve with prescribed values on the fixed dofs."""
        fixed_values = np.asarray(fixed_values, dtype=float)
        rhs = f_full[self.free]
        if self.fixed.size:
            rhs = rhs - self.k_fc @ fixed_values
        x = np.zeros(self.n_dofs)
        x[self.free] = self.factor.solve(rhs)
        x[self.fixed] = fixed_values
        return x


def _reduced_sparse_system(k_csr, f_full, dirichlet) -> tuple[SparseSystem, ConstrainedSystem, np.ndarray]:
    dofs = np.asarray([d for d, _ in dirichlet], dtype=int)
    vals = np.asarray([v for _, v in dirichlet], dtype=float)
    cs = ConstrainedSystem(k_csr, dofs, k_csr.shape[0])
    rhs = f_full[cs.free]
    if dofs.size:
        rhs = rhs - cs.k_fc @ vals
    return SparseSystem.from_csr(cs.k_ff.tocsr(), rhs), cs, vals


def assemble_global_u(mesh: Mesh, states: QuadStates, C: np.ndarray,
                      ed: ElementData | None = None):
    """Displacement system K u = sum(w B^T C eps*), Dirichlet eliminated.

    Returns (SparseSystem on the free dofs, expand) where ``expand`` maps
    the reduced solution back to a full dof vector with BC values filled.
    """
    ed = ed if ed is not None else element_data(mesh)
    k = assemble_stiffness(ed, mesh.n_dofs, C)
    f = bt_dot(ed, mesh.n_dofs, states.eps_mat @ np.asarray(C, dtype=float).T)
    system, cs, vals = _reduced_sparse_system(k, f, mesh.dirichlet)

    def expand(x_free: np.ndarray) -> np.ndarray:
        full = np.zeros(mesh.n_dofs)
        full[cs.free] = x_free
        full[cs.fixed] = vals
        return full

    return system, expand


def assemble_global_beta(mesh: Mesh, states: QuadStates, S: np.ndarray,
                         f_ext: np.ndarray, ed: ElementData | None = None):
    """Multiplier system K beta = f_ext - sum(w B^T sig*), beta = 0 on BCs."""
    ed = ed if ed is not None else element_data(mesh)
    s_inv = np.linalg.inv(np.asarray(S, dtype=float))
    k = assemble_stiffness(ed, mesh.n_dofs, s_inv)
    f = f_ext - bt_dot(ed, mesh.n_dofs, states.sig_mat)
    homogeneous = [(d, 0.0) for d, _ in mesh.dirichlet]
    system, cs, vals = _reduced_sparse_system(k, f, homogeneous)

    def expand(x_free: np.ndarray) -> np.ndarray:
        full = np.zeros(mesh.n_dofs)
        full[cs.free] = x_free
        return full

    return system, expand


def stress_update(states: QuadStates, field: Field, S: np.ndarray,
                  ed: ElementData) -> None:
    """Per-point mechanical update: eps = B u, sig = sig* + S^{-1} grad-beta."""
    s_inv = np.linalg.inv(np.asarray(S, dtype=float))
    states.eps_mech = strains(ed, field.u)
    states.sig_mech = states.sig_mat + strains(ed, field.beta) @ s_inv.T
