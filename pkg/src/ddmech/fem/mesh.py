"""Meshes: bar, 3D truss, and triangulated 2D domains.

Element kinds and their fields:

* ``bar1d``   - 2-node axial elements on a line, 1 dof/node, m = 1
* ``truss3d`` - 2-node axial members in space, 3 dofs/node, m = 1
* ``tri2d``   - constant-strain triangles, 2 dofs/node, m = 3 (Voigt)
* ``heat2d``  - linear triangles for a scalar field, 1 dof/node, m = 2

Dirichlet entries are (dof, value) pairs, loads are point forces per dof;
distributed sources attach as ``body_force`` callables and are not part of
the JSON serialization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

KIND_INFO = {
    "bar1d": {"dofs_per_node": 1, "m": 1, "nodes_per_el": 2},
    "truss3d": {"dofs_per_node": 3, "m": 1, "nodes_per_el": 2},
    "tri2d": {"dofs_per_node": 2, "m": 3, "nodes_per_el": 3},
    "heat2d": {"dofs_per_node": 1, "m": 2, "nodes_per_el": 3},
}


@dataclass
class Mesh:
    kind: str
    nodes: np.ndarray
    elements: np.ndarray
    dirichlet: list[tuple[int, float]] = field(default_factory=list)
    loads: list[tuple[int, float]] = field(default_factory=list)
    area: float = 1.0  # bar/truss cross-section (mm^2)
    body_force: Callable | None = None

    def __post_init__(self):
        if self.kind not in KIND_INFO:
            raise ValueError(f"unknown mesh kind {self.kind!r}")
        self.nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        self.elements = np.asarray(self.elements, dtype=int)
        info = KIND_INFO[self.kind]
        if self.elements.ndim != 2 or self.elements.shape[1] != info["nodes_per_el"]:
            raise ValueError(f"{self.kind} elements need "
                             f"{info['nodes_per_el']} nodes each")
        if self.elements.size and (self.elements.min() < 0
                                   or self.elements.max() >= self.n_nodes):
            raise ValueError("element connectivity references unknown nodes")
        dofs = [d for d, _ in self.dirichlet]
        if len(set(dofs)) != len(dofs):
            raise ValueError("duplicate Dirichlet dofs")

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    @property
    def dofs_per_node(self) -> int:
        return KIND_INFO[self.kind]["dofs_per_node"]

    @property
    def m(self) -> int:
        return KIND_INFO[self.kind]["m"]

    @property
    def n_dofs(self) -> int:
        return self.n_nodes * self.dofs_per_node

    def dof(self, node: int, component: int = 0) -> int:
        return node * self.dofs_per_node + component

    def to_json(self, path) -> None:
        doc = {
            "kind": self.kind,
            "area": self.area,
            "nodes": self.nodes.tolist(),
            "elements": self.elements.tolist(),
            "dirichlet": [[int(d), float(v)] for d, v in self.dirichlet],
            "loads": [[int(d), float(v)] for d, v in self.loads],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh)

    @classmethod
    def from_json(cls, path) -> "Mesh":
        with open(path) as fh:
            doc = json.load(fh)
        return cls(
            kind=doc["kind"],
            nodes=np.asarray(doc["nodes"], dtype=float),
            elements=np.asarray(doc["elements"], dtype=int),
            dirichlet=[(int(d), float(v)) for d, v in doc["dirichlet"]],
            loads=[(int(d), float(v)) for d, v in doc["loads"]],
            area=float(doc.get("area", 1.0)),
        )


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def bar_mesh(n_el: int = 50, length: float = 1.0, area: float = 1.0,
             tip_force: float | None = None,
             body_force: Callable | None = None) -> Mesh:
    """Uniform 1D bar, left end fixed, optional tip point load."""
    x = np.linspace(0.0, length, n_el + 1)[:, None]
    elements = np.column_stack([np.arange(n_el), np.arange(1, n_el + 1)])
    loads = [] if tip_force is None else [(n_el, float(tip_force))]
    return Mesh(kind="bar1d", nodes=x, elements=elements,
                dirichlet=[(0, 0.0)], loads=loads, area=area,
                body_force=body_force)


def truss_pyramid_mesh(apex_leg_cos: float = 0.9) -> Mesh:
    """Two-tier pyramid truss: fixed base square, antiprism mid ring, apex.

    The mid-ring radius is set from the apex-leg inclination so a 3 kN apex
    load produces peak member stresses near 833 MPa (strain ~0.02, inside
    the tanh database range).
    """
    r = np.sqrt(1.0 / apex_leg_cos**2 - 1.0)
    base = np.array([[1.0, 1.0, 0.0], [-1.0, 1.0, 0.0],
                     [-1.0, -1.0, 0.0], [1.0, -1.0, 0.0]])
    mid = np.array([[r, 0.0, 1.0], [0.0, r, 1.0], [-r, 0.0, 1.0], [0.0, -r, 1.0]])
    apex = np.array([[0.0, 0.0, 2.0]])
    nodes = np.vstack([base, mid, apex])
    members = [
        # legs: each mid node to the two base corners of the edge below it
        (0, 4), (3, 4),   # mid +x above right edge (corners 0 and 3)
        (0, 5), (1, 5),   # mid +y above top edge
        (1, 6), (2, 6),   # mid -x above left edge
        (2, 7), (3, 7),   # mid -y above bottom edge
        # mid ring
        (4, 5), (5, 6), (6, 7), (7, 4),
        # apex legs
        (4, 8), (5, 8), (6, 8), (7, 8),
    ]
    dirichlet = [(3 * n + c, 0.0) for n in range(4) for c in range(3)]
    return Mesh(kind="truss3d", nodes=nodes, elements=np.asarray(members),
                dirichlet=dirichlet, loads=[], area=1.0)


TRUSS_APEX_NODE = 8


def square_tri_mesh(nx: int, ny: int, kind: str = "heat2d",
                    lx: float = 1.0, ly: float = 1.0) -> Mesh:
    """Crossed triangulation of a rectangle: 4 triangles per grid cell."""
    xs = np.linspace(0.0, lx, nx + 1)
    ys = np.linspace(0.0, ly, ny + 1)
    grid = np.array([[x, y] for y in ys for x in xs])

    def gid(i, j):
        return j * (nx + 1) + i

    centers, elements = [], []
    n_grid = grid.shape[0]
    for j in range(ny):
        for i in range(nx):
            c = n_grid + len(centers)
            centers.append([0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])])
            a, b = gid(i, j), gid(i + 1, j)
            d, e = gid(i + 1, j + 1), gid(i, j + 1)
            elements += [[a, b, c], [b, d, c], [d, e, c], [e, a, c]]
    nodes = np.vstack([grid, np.array(centers)])
    return Mesh(kind=kind, nodes=nodes, elements=np.asarray(elements))


def boundary_nodes(mesh: Mesh, predicate) -> np.ndarray:
    """Node indices whose coordinates satisfy ``predicate(x)``."""
    hits = [i for i in range(mesh.n_nodes) if predicate(mesh.nodes[i])]
    return np.asarray(hits, dtype=int)


def square_hole_mesh(n_r: int = 10, n_t: int = 28, hole_radius: float = 0.15,
                     kind: str = "tri2d") -> Mesh:
    """O-grid triangulation of the unit square with a central circular hole.

    ``n_t`` must be divisible by 4 so the outer ring hits the square's
    corners exactly; rings blend linearly from the hole circle to the
    square boundary along matching perimeter rays.
    """
    if n_t % 4 != 0:
        raise ValueError("n_t must be divisible by 4 to hit the corners")
    center = np.array([0.5, 0.5])
    # outer boundary nodes by perimeter arclength, corners included
    s = 4.0 * np.arange(n_t) / n_t
    outer = np.empty((n_t, 2))
    for i, si in enumerate(s):
        side, t = int(si), si - int(si)
        if side == 0:
            outer[i] = [t, 0.0]
        elif side == 1:
            outer[i] = [1.0, t]
        elif side == 2:
            outer[i] = [1.0 - t, 1.0]
        else:
            outer[i] = [0.0, 1.0 - t]
    theta = np.arctan2(outer[:, 1] - center[1], outer[:, 0] - center[0])
    inner = center + hole_radius * np.column_stack([np.cos(theta), np.sin(theta)])

    rings = [inner + (j / n_r) * (outer - inner) for j in range(n_r + 1)]
    nodes = np.vstack(rings)

    def nid(ring, sector):
        return ring * n_t + (sector % n_t)

    elements = []
    for j in range(n_r):
        for i in range(n_t):
            a, b = nid(j, i), nid(j, i + 1)
            c, d = nid(j + 1, i), nid(j + 1, i + 1)
            elements += [[a, d, b], [a, c, d]]
    return Mesh(kind=kind, nodes=nodes, elements=np.asarray(elements))
