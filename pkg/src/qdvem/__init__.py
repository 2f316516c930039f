"""Lowest-order virtual elements for the three-dimensional quad-div problem.

The package covers polyhedral meshes, exact polynomial calculus on
polytopes, the scalar, edge and grad-div virtual element spaces, the DOF
maps of the discrete de Rham complex, the mixed saddle-point solver and a
convergence harness driven by a polynomial manufactured solution.
"""

from .assembly import (assemble_system, error_div_diagnostics, error_norm_h, solve_system)
from .complex import build_complex_maps, verify_complex
from .errors import (DegenerateSystemError, GeometryError, MalformedFileError, MeshError,
                     PlanarityError, SolverFailure, StarShapeError, TopologyError, VEMError)
from .manufactured import build_benchmark
from .mesh import (PolyMesh, compute_geometry, distorted_cube_mesh, generate_cube_mesh, load_mesh,
                   local_cell, save_mesh, validate_mesh)
from .polyfield import PolyField, PolyVector, coordinate

__version__ = "0.1.0"

__all__ = [
    "PolyMesh", "generate_cube_mesh", "distorted_cube_mesh", "load_mesh", "save_mesh",
    "compute_geometry", "validate_mesh", "local_cell",
    "PolyField", "PolyVector", "coordinate",
    "build_complex_maps", "verify_complex",
    "assemble_system", "solve_system", "error_norm_h", "error_div_diagnostics",
    "build_benchmark",
    "VEMError", "MeshError", "MalformedFileError", "TopologyError", "PlanarityError",
    "GeometryError", "StarShapeError", "DegenerateSystemError", "SolverFailure",
]
