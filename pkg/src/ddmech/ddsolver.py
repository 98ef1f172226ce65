"""Alternating fixed-point driver of the model-free method.

Each outer iteration solves the two decoupled global systems (displacement
and multiplier), updates the mechanical states pointwise, and projects
them back onto the material data by the configured local strategy:
discrete nearest neighbor or the embedded-manifold projection. Nearest
neighbor terminates when the index assignment repeats; the manifold
variant when the relative change of the concatenated mechanical states
drops below ``tol_rel``.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .fem.assembly import ConstrainedSystem, Field, QuadStates, assemble_stiffness, bt_dot
from .fem.elements import ElementData, element_data, strains
from .fem.mesh import Mesh
from .fem.reference import external_loads
from .phasespace import MaterialDatabase
from .projection import EnergyMetric, ManifoldProjector, NnIndex


@dataclass(frozen=True)
class SolverConfig:
    local_strategy: str = "manifold"  # "nn" | "manifold"
    max_outer_iters: int = 200
    tol_rel: float = 1e-8
    seed: int = 0
    load_steps: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.local_strategy not in ("nn", "manifold"):
            raise ValueError("local_strategy must be 'nn' or 'manifold'")
        if self.tol_rel <= 0.0:
            raise ValueError("tol_rel must be positive")
        if self.max_outer_iters < 1:
            raise ValueError("need at least one outer iteration")

    def with_overrides(self, **kwargs) -> "SolverConfig":
        return replace(self, **kwargs)


@dataclass
class DDResult:
    field: Field
    states: QuadStates
    outer_iters: int
    converged: bool
    history: list[dict]
    wall_time: float
    assignment: np.ndarray | None = None  # NN only

    @property
    def functional(self) -> float:
        return self.history[-1]["functional"] if self.history else np.nan


class NotConvergedError(Exception):
    """Iteration cap hit; ``result`` carries the best-so-far state."""

    def __init__(self, message: str, result: DDResult):
        super().__init__(message)
        self.result = result


def functional_value(states: QuadStates, metric: EnergyMetric) -> float:
    """Integrated squared distance sum_q w_q d2(z_q, z*_q)."""
    d2 = metric.distance2(states.eps_mech, states.sig_mech,
                          states.eps_mat, states.sig_mat)
    return float(np.sum(states.weights * d2))


class _Workspace:
    """Factorized operators reused across outer iterations and load steps."""

    def __init__(self, mesh: Mesh, db: MaterialDatabase):
        if mesh.m != db.m:
            raise ValueError(f"mesh carries m={mesh.m} components, "
                             f"database m={db.m}")
        self.mesh = mesh
        self.ed = element_data(mesh)
        self.metric = EnergyMetric(db.C, db.S)
        self.C = db.C
        k = assemble_stiffness(self.ed, mesh.n_dofs, db.C)
        dofs = np.asarray([d for d, _ in mesh.dirichlet], dtype=int)
        self.bc_values = np.asarray([v for _, v in mesh.dirichlet], dtype=float)
        self.system = ConstrainedSystem(k, dofs, mesh.n_dofs)
        self.f_ext = external_loads(mesh)


def _local_project(local, eps: np.ndarray, sig: np.ndarray):
    if isinstance(local, NnIndex):
        idx = local.query_batch(eps, sig)
        return local.db.eps[idx], local.db.sig[idx], idx
    if isinstance(local, ManifoldProjector):
        eps_p, sig_p = local.project_batch(eps, sig)
        return eps_p, sig_p, None
    raise TypeError("local projector must be an NnIndex or ManifoldProjector")


def dd_solve(mesh: Mesh, db: MaterialDatabase, local, cfg: SolverConfig,
             workspace: _Workspace | None = None, load_scale: float = 1.0,
             warm_states: QuadStates | None = None) -> DDResult:
    """Run the alternating solver to convergence or the iteration cap.

    Material states start from a seeded uniform draw of database points
    unless ``warm_states`` provides a previous step's converged states.

    Raises
    ------
    NotConvergedError
        Cap reached; the exception carries the best-so-far result.
    """
    ws = workspace if workspace is not None else _Workspace(mesh, db)
    ed, metric = ws.ed, ws.metric
    n_quad = ed.n_elements
    rng = np.random.default_rng(cfg.seed)

    states = QuadStates.zeros(n_quad, db.m, ed.w)
    if warm_states is not None:
        states.eps_mat = warm_states.eps_mat.copy()
        states.sig_mat = warm_states.sig_mat.copy()
        assignment = None
    else:
        assignment = rng.integers(0, db.n_points, size=n_quad)
        states.eps_mat = db.eps[assignment].copy()
        states.sig_mat = db.sig[assignment].copy()

    bc_u = load_scale * ws.bc_values
    bc_zero = np.zeros_like(ws.bc_values)
    f_ext = load_scale * ws.f_ext

    history: list[dict] = []
    fld = Field(u=np.zeros(mesh.n_dofs), beta=np.zeros(mesh.n_dofs))
    prev_mech: np.ndarray | None = None
    converged = False
    t0 = time.perf_counter()
    it = 0
    for it in range(1, cfg.max_outer_iters + 1):
        t_it = time.perf_counter()
        # global projection: two decoupled SPD solves on the same operator
        rhs_u = bt_dot(ed, mesh.n_dofs, states.eps_mat @ ws.C.T)
        fld.u = ws.system.solve(rhs_u, bc_u)
        rhs_b = f_ext - bt_dot(ed, mesh.n_dofs, states.sig_mat)
        fld.beta = ws.system.solve(rhs_b, bc_zero)
        # pointwise mechanical update
        states.eps_mech = strains(ed, fld.u)
        states.sig_mech = states.sig_mat + strains(ed, fld.beta) @ ws.C.T
        # local projection back onto the data
        eps_new, sig_new, idx = _local_project(local, states.eps_mech,
                                               states.sig_mech)
        if idx is not None:
            n_changed = n_quad if assignment is None \
                else int(np.count_nonzero(idx != assignment))
            assignment = idx
        else:
            scale = max(float(np.linalg.norm(eps_new)) + float(np.linalg.norm(sig_new)), 1e-300)
            moved = (np.linalg.norm(eps_new - states.eps_mat, axis=1)
                     + np.linalg.norm(sig_new - states.sig_mat, axis=1))
            n_changed = int(np.count_nonzero(moved > 1e-12 * scale))
        states.eps_mat, states.sig_mat = eps_new, sig_new
        fval = functional_value(states, metric)
        history.append({
            "outer_iter": it,
            "functional": fval,
            "n_changed_assignments": n_changed,
            "wall_ms": 1e3 * (time.perf_counter() - t_it),
        })
        # convergence tests
        if idx is not None:
            if n_changed == 0:
                converged = True
                break
        else:
            mech = np.concatenate([states.eps_mech.ravel(), states.sig_mech.ravel()])
            if prev_mech is not None:
                denom = max(np.linalg.norm(mech), 1e-300)
                if np.linalg.norm(mech - prev_mech) <= cfg.tol_rel * denom:
                    converged = True
                    break
            prev_mech = mech

    result = DDResult(field=fld, states=states, outer_iters=it,
                      converged=converged, history=history,
                      wall_time=time.perf_counter() - t0,
                      assignment=assignment if isinstance(local, NnIndex) else None)
    if not converged:
        raise NotConvergedError(
            f"no convergence in {cfg.max_outer_iters} outer iterations", result)
    return result


@dataclass
class PathResult:
    steps: list[DDResult]
    loads: np.ndarray
    monitored: np.ndarray

    def force_displacement(self) -> np.ndarray:
        return np.column_stack([self.monitored, self.loads])


def dd_solve_path(mesh: Mesh, db: MaterialDatabase, local, cfg: SolverConfig,
                  monitor_dof: int) -> PathResult:
    """Quasi-static load schedule with warm-started material states.

    ``cfg.load_steps`` scales the mesh's point loads step by step; the
    monitored dof's displacement is recorded against the applied scale.
    """
    if not cfg.load_steps:
        raise ValueError("cfg.load_steps must provide a schedule")
    ws = _Workspace(mesh, db)
    results: list[DDResult] = []
    monitored = np.zeros(len(cfg.load_steps))
    warm: QuadStates | None = None
    for k, scale in enumerate(cfg.load_steps):
        try:
            res = dd_solve(mesh, db, local, cfg, workspace=ws,
                           load_scale=scale, warm_states=warm)
        except NotConvergedError as err:
            raise NotConvergedError(f"step {k} (load scale {scale}): {err}",
                                    err.result) from err
        results.append(res)
        monitored[k] = res.field.u[monitor_dof]
        warm = res.states
    return PathResult(steps=results, loads=np.asarray(cfg.load_steps, dtype=float),
                      monitored=monitored)


def write_iteration_log(path, history: list[dict]) -> None:
    """Iteration log CSV: outer_iter,functional,n_changed_assignments,wall_ms."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["outer_iter", "functional", "n_changed_assignments",
                         "wall_ms"])
        for row in history:
            writer.writerow([row["outer_iter"], repr(row["functional"]),
                             row["n_changed_assignments"],
                             repr(row["wall_ms"])])
