"""CSV serialization of nodal fields and quadrature-point states.

Node rows carry an id column, coordinates, then the primary field and the
multiplier; quad rows carry an id, strains, stresses. Ids make the files
order-independent for comparison.
"""

from __future__ import annotations

import csv

import numpy as np

from .assembly import Field, QuadStates
from .mesh import Mesh

_COORD_NAMES = ["x", "y", "z"]


def _field_names(mesh: Mesh) -> tuple[list[str], list[str]]:
    n = mesh.dofs_per_node
    if n == 1:
        return ["u"], ["beta"]
    comps = _COORD_NAMES[:n]
    return [f"u_{c}" for c in comps], [f"beta_{c}" for c in comps]


def write_node_fields(path, mesh: Mesh, field: Field) -> None:
    n = mesh.dofs_per_node
    dim = mesh.nodes.shape[1]
    u_names, b_names = _field_names(mesh)
    header = ["node"] + _COORD_NAMES[:dim] + u_names + b_names
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(mesh.n_nodes):
            u = field.u[n * i:n * (i + 1)]
            b = field.beta[n * i:n * (i + 1)]
            row = [i] + [repr(v) for v in mesh.nodes[i]] \
                + [repr(v) for v in u] + [repr(v) for v in b]
            writer.writerow(row)


def read_node_fields(path):
    """Returns (ids, coords, values, value_names) sorted by id."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = np.array([[float(v) for v in row] for row in reader])
    if header[0] != "node":
        raise ValueError(f"unrecognized field CSV header {header}")
    n_coord = sum(1 for h in header[1:] if h in _COORD_NAMES)
    ids = rows[:, 0].astype(int)
    order = np.argsort(ids)
    coords = rows[order, 1:1 + n_coord]
    values = rows[order, 1 + n_coord:]
    return ids[order], coords, values, header[1 + n_coord:]


def write_quad_states(path, states: QuadStates) -> None:
    m = states.m
    header = ["qp"] + [f"eps_{k + 1}" for k in range(m)] + [f"sig_{k + 1}" for k in range(m)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for q in range(states.n_quad):
            row = [q] + [repr(v) for v in states.eps_mech[q]] \
                + [repr(v) for v in states.sig_mech[q]]
            writer.writerow(row)


def read_quad_states(path):
    """Returns (ids, eps, sig) sorted by id."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = np.array([[float(v) for v in row] for row in reader])
    if header[0] != "qp":
        raise ValueError(f"unrecognized quad CSV header {header}")
    m = sum(1 for h in header if h.startswith("eps_"))
    ids = rows[:, 0].astype(int)
    order = np.argsort(ids)
    return ids[order], rows[order, 1:1 + m], rows[order, 1 + m:1 + 2 * m]
