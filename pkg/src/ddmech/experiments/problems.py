"""Benchmark problem setups: meshes, loads, analytic solutions, defaults.

Four boundary value problems drive the comparisons:

* 1D bar with tanh law, manufactured solution u = 0.01 x^2
* 3D pyramid truss under cyclic apex loading (same material data)
* nonlinear conduction on the unit square with a manufactured source
* plane-strain square with a central hole, displacement driven
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import laws, phasespace
from ..fem.mesh import (Mesh, TRUSS_APEX_NODE, bar_mesh, boundary_nodes,
                        square_hole_mesh, square_tri_mesh, truss_pyramid_mesh)
from ..training import TrainConfig

BAR_LENGTH = 1.0  # m
BAR_AREA = 1.0  # mm^2
BAR_N_ELEMENTS = 50
TRUSS_PEAK_FORCE = 3000.0  # N
TRUSS_RAMP_STEPS = 20
TRUSS_TOTAL_STEPS = 60
HEAT_GRID = (8, 7)  # crossed cells -> 224 triangles (paper: 226)
HOLE_GRID = (10, 28)  # rings x sectors -> 560 triangles (paper: 545)
TOP_DISPLACEMENT = 0.1  # m, plane-strain driving displacement


# -- 1D bar -----------------------------------------------------------------

def bar_analytic_u(x: np.ndarray) -> np.ndarray:
    return 0.01 * np.asarray(x) ** 2


def bar_analytic_eps(x: np.ndarray) -> np.ndarray:
    return 0.02 * np.asarray(x)


def bar_tip_force() -> float:
    """End traction consistent with the manufactured solution (~833.65 N)."""
    law = laws.TanhBarLaw()
    return float(law.stress(bar_analytic_eps(BAR_LENGTH))) * BAR_AREA


def bar_body_force(x: np.ndarray) -> np.ndarray:
    """b(x) = -A d/dx sigma(0.02 x), the manufactured distributed load."""
    law = laws.TanhBarLaw()
    sech2 = 1.0 / np.cosh(law.alpha_s * bar_analytic_eps(x)) ** 2
    return -BAR_AREA * law.alpha_m * law.alpha_s * 0.02 * sech2


def bar_problem(n_el: int = BAR_N_ELEMENTS) -> Mesh:
    return bar_mesh(n_el=n_el, length=BAR_LENGTH, area=BAR_AREA,
                    tip_force=bar_tip_force(), body_force=bar_body_force)


# -- 3D truss ---------------------------------------------------------------

def truss_problem() -> tuple[Mesh, int]:
    """Pyramid truss with a unit apex load; returns (mesh, monitored dof)."""
    mesh = truss_pyramid_mesh()
    apex_dof = mesh.dof(TRUSS_APEX_NODE, 2)
    mesh.loads = [(apex_dof, 1.0)]
    return mesh, apex_dof


def truss_schedule(peak: float = TRUSS_PEAK_FORCE, ramp: int = TRUSS_RAMP_STEPS,
                   total: int = TRUSS_TOTAL_STEPS) -> tuple[float, ...]:
    """Compression ramp to -peak, then linear unloading through +peak."""
    steps = []
    for t in range(1, total + 1):
        if t <= ramp:
            steps.append(-peak * t / ramp)
        else:
            steps.append(-peak + peak * (t - ramp) / ramp)
    return tuple(steps)


# -- nonlinear conduction ----------------------------------------------------

def heat_analytic_T(xy: np.ndarray) -> np.ndarray:
    xy = np.asarray(xy, dtype=float)
    x, y = xy[..., 0], xy[..., 1]
    return 0.5 * np.sin(2.0 * np.pi * x) * y * (1.0 - y)


def heat_analytic_grad(xy: np.ndarray) -> np.ndarray:
    xy = np.asarray(xy, dtype=float)
    x, y = xy[..., 0], xy[..., 1]
    gx = np.pi * np.cos(2.0 * np.pi * x) * y * (1.0 - y)
    gy = 0.5 * np.sin(2.0 * np.pi * x) * (1.0 - 2.0 * y)
    return np.stack([gx, gy], axis=-1)


def heat_source(xy: np.ndarray) -> np.ndarray:
    """Manufactured source s = -div tanh(grad T) for the analytic T."""
    xy = np.asarray(xy, dtype=float)
    x, y = xy[..., 0], xy[..., 1]
    g = heat_analytic_grad(xy)
    t_xx = -2.0 * np.pi**2 * np.sin(2.0 * np.pi * x) * y * (1.0 - y)
    t_yy = -np.sin(2.0 * np.pi * x)
    sech2 = 1.0 / np.cosh(g) ** 2
    return -(sech2[..., 0] * t_xx + sech2[..., 1] * t_yy)


def heat_problem(nx: int = HEAT_GRID[0], ny: int = HEAT_GRID[1]) -> Mesh:
    mesh = square_tri_mesh(nx, ny, kind="heat2d")
    edge = boundary_nodes(mesh, lambda p: p[0] in (0.0, 1.0) or p[1] in (0.0, 1.0))
    mesh.dirichlet = [(int(n), float(heat_analytic_T(mesh.nodes[n]))) for n in edge]
    mesh.body_force = heat_source
    return mesh


# -- plane strain with hole --------------------------------------------------

def planestrain_problem(n_r: int = HOLE_GRID[0], n_t: int = HOLE_GRID[1]) -> Mesh:
    mesh = square_hole_mesh(n_r=n_r, n_t=n_t, kind="tri2d")
    tol = 1e-12
    bottom = boundary_nodes(mesh, lambda p: abs(p[1]) < tol)
    top = boundary_nodes(mesh, lambda p: abs(p[1] - 1.0) < tol)
    dirichlet = []
    for n in bottom:
        dirichlet += [(mesh.dof(n, 0), 0.0), (mesh.dof(n, 1), 0.0)]
    for n in top:
        dirichlet.append((mesh.dof(n, 1), TOP_DISPLACEMENT))
    mesh.dirichlet = dirichlet
    return mesh


# -- experiment defaults -----------------------------------------------------

@dataclass
class ExperimentDefaults:
    """Database, architecture, and optimizer defaults for one experiment."""

    make_db: Callable[[], phasespace.MaterialDatabase]
    m: int
    hidden_units: int
    hidden_layers: int
    n_couplings: int = 1
    train: TrainConfig = field(default_factory=TrainConfig)
    solver_tol: float = 1e-8
    solver_max_iters: int = 200


DEFAULTS: dict[str, ExperimentDefaults] = {
    "toy_sqrt": ExperimentDefaults(
        make_db=phasespace.gen_sqrt_toy, m=1, hidden_units=5, hidden_layers=3,
        train=TrainConfig(initial_lr=5e-3, warmup_iters=2000, max_epochs=30000)),
    "bar_complete": ExperimentDefaults(
        make_db=phasespace.gen_bar_tanh, m=1, hidden_units=5, hidden_layers=3,
        train=TrainConfig(initial_lr=0.05, warmup_iters=2000, max_epochs=30000)),
    "bar_incomplete": ExperimentDefaults(
        make_db=phasespace.gen_bar_incomplete, m=1, hidden_units=5, hidden_layers=3,
        train=TrainConfig(initial_lr=0.05, warmup_iters=2000, max_epochs=30000)),
    "truss_cyclic": ExperimentDefaults(
        make_db=phasespace.gen_bar_tanh, m=1, hidden_units=5, hidden_layers=3,
        train=TrainConfig(initial_lr=0.05, warmup_iters=2000, max_epochs=30000)),
    "heat2d": ExperimentDefaults(
        make_db=phasespace.gen_heat_tanh, m=2, hidden_units=10, hidden_layers=4,
        train=TrainConfig(initial_lr=2e-3, warmup_iters=500, max_epochs=40000,
                          batch=200)),
    "planestrain_hole": ExperimentDefaults(
        make_db=phasespace.gen_planestrain, m=3, hidden_units=10, hidden_layers=3,
        train=TrainConfig(initial_lr=2e-3, warmup_iters=1000, max_epochs=30000)),
    "scaling_study": ExperimentDefaults(
        make_db=phasespace.gen_planestrain, m=3, hidden_units=10, hidden_layers=3,
        train=TrainConfig(initial_lr=2e-3, warmup_iters=1000, max_epochs=30000),
        solver_tol=1e-13, solver_max_iters=1000),
}

SCALING_GRIDS = {1000: (10, 10, 10), 10000: (25, 25, 16), 100000: (50, 50, 40)}
