"""Strain-displacement operators, measures, and load integration.

Every supported element carries its generalized strain constant over the
element, so a single quadrature point per element integrates the internal
terms exactly; distributed sources use higher-order rules (2-pt Gauss on
bars, mid-edge rule on triangles) since they vary over the element.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh


class DegenerateElementError(ValueError):
    """Element with non-positive length/area."""


@dataclass
class ElementData:
    """Precomputed per-element operators: one quadrature point each."""

    b: np.ndarray  # (E, m, k) strain-displacement operators
    w: np.ndarray  # (E,) integration weights (measure)
    dofs: np.ndarray  # (E, k) global dof indices

    @property
    def n_elements(self) -> int:
        return self.b.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]


def _tri_geometry(mesh: Mesh, e: int):
    n = mesh.elements[e]
    xy = mesh.nodes[n]
    x, y = xy[:, 0], xy[:, 1]
    area2 = (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0])
    if area2 <= 0.0:
        raise DegenerateElementError(f"triangle {e} has non-positive area")
    # shape function gradients: N_i = (a_i + b_i x + c_i y) / (2A)
    b = np.array([y[1] - y[2], y[2] - y[0], y[0] - y[1]]) / area2
    c = np.array([x[2] - x[1], x[0] - x[2], x[1] - x[0]]) / area2
    return n, 0.5 * area2, b, c


def element_data(mesh: Mesh) -> ElementData:
    """Build B operators, weights and dof maps for the whole mesh."""
    kind = mesh.kind
    E = mesh.n_elements
    if kind == "bar1d":
        b = np.zeros((E, 1, 2))
        w = np.zeros(E)
        dofs = np.zeros((E, 2), dtype=int)
        for e, (i, j) in enumerate(mesh.elements):
            h = mesh.nodes[j, 0] - mesh.nodes[i, 0]
            if h <= 0.0:
                raise DegenerateElementError(f"bar element {e} has length {h}")
            b[e, 0] = [-1.0 / h, 1.0 / h]
            w[e] = mesh.area * h
            dofs[e] = [i, j]
        return ElementData(b, w, dofs)
    if kind == "truss3d":
        b = np.zeros((E, 1, 6))
        w = np.zeros(E)
        dofs = np.zeros((E, 6), dtype=int)
        for e, (i, j) in enumerate(mesh.elements):
            d = mesh.nodes[j] - mesh.nodes[i]
            length = np.linalg.norm(d)
            if length <= 0.0:
                raise DegenerateElementError(f"truss member {e} has zero length")
            d = d / length
            b[e, 0] = np.concatenate([-d, d]) / length
            w[e] = mesh.area * length
            dofs[e] = [3 * i, 3 * i + 1, 3 * i + 2, 3 * j, 3 * j + 1, 3 * j + 2]
        return ElementData(b, w, dofs)
    if kind == "tri2d":
        b = np.zeros((E, 3, 6))
        w = np.zeros(E)
        dofs = np.zeros((E, 6), dtype=int)
        for e in range(E):
            n, area, bb, cc = _tri_geometry(mesh, e)
            for k in range(3):
                b[e, 0, 2 * k] = bb[k]
                b[e, 1, 2 * k + 1] = cc[k]
                b[e, 2, 2 * k] = cc[k]
                b[e, 2, 2 * k + 1] = bb[k]
            w[e] = area  # unit thickness
            dofs[e] = [2 * n[0], 2 * n[0] + 1, 2 * n[1], 2 * n[1] + 1,
                       2 * n[2], 2 * n[2] + 1]
        return ElementData(b, w, dofs)
    if kind == "heat2d":
        b = np.zeros((E, 2, 3))
        w = np.zeros(E)
        dofs = np.zeros((E, 3), dtype=int)
        for e in range(E):
            n, area, bb, cc = _tri_geometry(mesh, e)
            b[e, 0] = bb
            b[e, 1] = cc
            w[e] = area
            dofs[e] = n
        return ElementData(b, w, dofs)
    raise ValueError(f"unsupported mesh kind {kind!r}")


def strains(ed: ElementData, u: np.ndarray) -> np.ndarray:
    """Generalized strain per element: eps_e = B_e u_e."""
    return np.einsum("emk,ek->em", ed.b, u[ed.dofs])


def element_centroids(mesh: Mesh) -> np.ndarray:
    return mesh.nodes[mesh.elements].mean(axis=1)


_GAUSS2 = (np.array([-1.0, 1.0]) / np.sqrt(3.0), np.array([1.0, 1.0]))


def consistent_loads(mesh: Mesh, source) -> np.ndarray:
    """Consistent nodal loads for a distributed source.

    ``source(x)`` returns the load density per node component (scalar for
    bar1d/heat2d, a length-2 vector for tri2d). Bars use 2-pt Gauss,
    triangles the degree-2 mid-edge rule.
    """
    f = np.zeros(mesh.n_dofs)
    if source is None:
        return f
    if mesh.kind == "bar1d":
        xi, wg = _GAUSS2
        for i, j in mesh.elements:
            xa, xb = mesh.nodes[i, 0], mesh.nodes[j, 0]
            h = xb - xa
            for q in range(2):
                x = 0.5 * (xa + xb) + 0.5 * h * xi[q]
                val = source(x) * 0.5 * h * wg[q]
                f[i] += val * 0.5 * (1.0 - xi[q])
                f[j] += val * 0.5 * (1.0 + xi[q])
        return f
    if mesh.kind in ("heat2d", "tri2d"):
        ncomp = mesh.dofs_per_node
        for e in range(mesh.n_elements):
            n = mesh.elements[e]
            xy = mesh.nodes[n]
            _, area, _, _ = _tri_geometry(mesh, e)
            # mid-edge points; shape functions are 1/2 on the edge's nodes
            for a in range(3):
                bnode, cnode = (a + 1) % 3, (a + 2) % 3
                mid = 0.5 * (xy[bnode] + xy[cnode])
                val = np.atleast_1d(source(mid)) * (area / 3.0)
                for node in (bnode, cnode):
                    for comp in range(ncomp):
                        f[n[node] * ncomp + comp] += 0.5 * val[comp]
        return f
    raise ValueError(f"no distributed-load rule for mesh kind {mesh.kind!r}")
