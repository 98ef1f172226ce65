"""Model-based reference solver: Newton iteration on the standard residual.

Solves sum(w B^T sig(B u)) = f_ext with an analytic constitutive law,
backtracking line search, and optional load stepping (with automatic
bisection on failure). Serves as ground truth for the data-driven runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import ConstrainedSystem, assemble_stiffness, bt_dot
from .elements import ElementData, consistent_loads, element_data, strains
from .mesh import Mesh


class NoConvergenceError(Exception):
    """Newton failed to converge; try more load steps."""


@dataclass
class ReferenceSolution:
    u: np.ndarray
    eps: np.ndarray
    sig: np.ndarray
    residual_history: list[float]
    n_newton: int


def external_loads(mesh: Mesh) -> np.ndarray:
    """Point loads plus consistent distributed-source loads."""
    f = np.zeros(mesh.n_dofs)
    for dof, val in mesh.loads:
        f[dof] += val
    if mesh.body_force is not None:
        f += consistent_loads(mesh, mesh.body_force)
    return f


STALL_TOL = 1e-8  # accept a stalled line search this close to the fp floor


def _newton(mesh: Mesh, law, ed: ElementData, f_ext: np.ndarray,
            u0: np.ndarray, scale: float, tol: float, max_newton: int):
    dofs = np.asarray([d for d, _ in mesh.dirichlet], dtype=int)
    vals = scale * np.asarray([v for _, v in mesh.dirichlet], dtype=float)
    f_scaled = scale * f_ext
    u = u0.copy()
    u[dofs] = vals
    history = []
    for it in range(max_newton):
        eps = strains(ed, u)
        sig = law.stress(eps)
        r_full = bt_dot(ed, mesh.n_dofs, sig) - f_scaled
        mask = np.ones(mesh.n_dofs, dtype=bool)
        mask[dofs] = False
        r = r_full[mask]
        r_norm = np.linalg.norm(r)
        history.append(r_norm)
        ref = max(1.0, np.linalg.norm(f_scaled[mask]),
                  np.linalg.norm(bt_dot(ed, mesh.n_dofs, sig)[mask]))
        if r_norm <= tol * ref:
            return u, eps, sig, history
        k = assemble_stiffness(ed, mesh.n_dofs, law.tangent(eps))
        cs = ConstrainedSystem(k, dofs, mesh.n_dofs)
        du = cs.solve(-r_full, np.zeros(dofs.size))
        # backtracking on the residual norm
        alpha = 1.0
        while alpha > 1e-4:
            u_try = u + alpha * du
            eps_t = strains(ed, u_try)
            r_try = bt_dot(ed, mesh.n_dofs, law.stress(eps_t)) - f_scaled
            if np.linalg.norm(r_try[mask]) < (1.0 - 1e-4 * alpha) * r_norm:
                break
            alpha *= 0.5
        else:
            # strain differencing puts a floor on the reachable residual;
            # a stalled search that close counts as converged
            if r_norm <= STALL_TOL * ref:
                return u, eps, sig, history
            raise NoConvergenceError("line search stalled; bisect the load")
        u = u + alpha * du
    raise NoConvergenceError(f"no convergence in {max_newton} Newton steps")


def reference_solve(mesh: Mesh, law, ed: ElementData | None = None,
                    tol: float = 1e-10, max_newton: int = 50,
                    n_load_steps: int = 1, max_bisect: int = 4) -> ReferenceSolution:
    """Solve the model-based problem; bisects load steps on failure.

    ``law`` provides ``stress(eps)`` and ``tangent(eps)`` for per-element
    strain arrays (E, m).
    """
    ed = ed if ed is not None else element_data(mesh)
    f_ext = external_loads(mesh)
    u = np.zeros(mesh.n_dofs)
    history: list[float] = []
    n_newton = 0

    def advance(u, lo, hi, depth):
        nonlocal n_newton
        try:
            u_new, eps, sig, h = _newton(mesh, law, ed, f_ext, u, hi, tol, max_newton)
        except NoConvergenceError:
            if depth >= max_bisect:
                raise
            mid = 0.5 * (lo + hi)
            u, eps, sig = advance(u, lo, mid, depth + 1)
            return advance(u, mid, hi, depth + 1)
        history.extend(h)
        n_newton += len(h)
        return u_new, eps, sig

    eps = sig = None
    for step in range(1, n_load_steps + 1):
        lo = (step - 1) / n_load_steps
        hi = step / n_load_steps
        u, eps, sig = advance(u, lo, hi, 0)
    return ReferenceSolution(u=u, eps=eps, sig=sig,
                             residual_history=history, n_newton=n_newton)
