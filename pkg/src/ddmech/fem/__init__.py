"""Discretization, assembly, and the model-based reference solver."""

from .assembly import (ConstrainedSystem, Field, QuadStates, assemble_global_beta,
                       assemble_global_u, assemble_stiffness, bt_dot, stress_update)
from .elements import (DegenerateElementError, ElementData, consistent_loads,
                       element_centroids, element_data, strains)
from .fieldio import (read_node_fields, read_quad_states, write_node_fields,
                      write_quad_states)
from .mesh import (KIND_INFO, Mesh, TRUSS_APEX_NODE, bar_mesh, boundary_nodes,
                   square_hole_mesh, square_tri_mesh, truss_pyramid_mesh)
from .reference import (NoConvergenceError, ReferenceSolution, external_loads,
                        reference_solve)

__all__ = [
    "ConstrainedSystem", "Field", "QuadStates", "assemble_global_beta",
    "assemble_global_u", "assemble_stiffness", "bt_dot", "stress_update",
    "DegenerateElementError", "ElementData", "consistent_loads",
    "element_centroids", "element_data", "strains",
    "read_node_fields", "read_quad_states", "write_node_fields",
    "write_quad_states",
    "KIND_INFO", "Mesh", "TRUSS_APEX_NODE", "bar_mesh", "boundary_nodes",
    "square_hole_mesh", "square_tri_mesh", "truss_pyramid_mesh",
    "NoConvergenceError", "ReferenceSolution", "external_loads", "reference_solve",
]
