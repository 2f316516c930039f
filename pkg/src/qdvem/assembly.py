"""Assembly and solution of the three-field saddle-point system.

Unknowns are ordered ``(u, phi, p)`` on interior DOFs (see
:class:`~qdvem.complex.GlobalNumbering`). The matrix is::

    [[A,        M_b C,  0    ],
     [C^T M_b,  0,      M_c G],
     [0,        G^T M_c, 0   ]]

with ``A``, ``M_b``, ``M_c`` assembled from the local grad-div, grad-div L2
and edge L2 forms. Boundary conditions are imposed by dropping constrained
DOFs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complex import ComplexMaps, GlobalNumbering, build_complex_maps
from .edge_vem import product_e
from .errors import DegenerateSystemError, SolverFailure
from .graddiv_vem import div_dof_transfer, interpolate_v, local_a, local_b
from .mesh import compute_geometry, local_cell
from .polytope import ANALYTIC_DEGREE, ASSEMBLY_DEGREE, cell_quadrature_batches, integrate_cells
from .scalar_vem import cell_pi_nabla_matrix

__all__ = [
    "SaddleSystem",
    "Solution",
    "assemble_local_forms",
    "assemble_system",
    "solve_system",
    "error_norm_h",
    "error_div_diagnostics",
    "discrete_norms",
    "write_coo",
    "DEFAULT_TOL",
    "DIAGNOSTIC_DEGREE",
]

DEFAULT_TOL = 1e-10
DIAGNOSTIC_DEGREE = 10


@dataclass
class LocalForms:
    """Global (full-layout) sparse matrices of the three local products."""

    A: sp.csr_matrix
    Mb: sp.csr_matrix
    Mc: sp.csr_matrix
    pi_div: list          # per cell: (V local-to-global ids, 4 x n coefficient map of Pi div)


def _v_ids(mesh, lc):
    return np.concatenate([lc.vertices, mesh.n_vertices + lc.faces])


def assemble_local_forms(mesh, geom=None, quad_degree=ASSEMBLY_DEGREE):
    """Loop once over the cells and assemble ``A``, ``M_b`` and ``M_c``."""
    geom = compute_geometry(mesh) if geom is None else geom
    nV = mesh.n_vertices + mesh.n_faces
    nS = mesh.n_edges
    rV, cV, a_vals, b_vals = [], [], [], []
    rS, cS, c_vals = [], [], []
    pi_div = []
    for K in range(mesh.n_cells):
        lc = local_cell(mesh, geom, K, quad_degree)
        ids = _v_ids(mesh, lc)
        r, c = np.meshgrid(ids, ids, indexing="ij")
        rV.append(r.ravel())
        cV.append(c.ravel())
        a_vals.append(local_a(lc).ravel())
        b_vals.append(local_b(lc).ravel())
        r, c = np.meshgrid(lc.edges, lc.edges, indexing="ij")
        rS.append(r.ravel())
        cS.append(c.ravel())
        c_vals.append(product_e(lc).ravel())
        pi_div.append((ids, cell_pi_nabla_matrix(lc) @ div_dof_transfer(lc)))
    rV, cV, rS, cS = (np.concatenate(x) for x in (rV, cV, rS, cS))
    A = sp.csr_matrix((np.concatenate(a_vals), (rV, cV)), shape=(nV, nV))
    Mb = sp.csr_matrix((np.concatenate(b_vals), (rV, cV)), shape=(nV, nV))
    Mc = sp.csr_matrix((np.concatenate(c_vals), (rS, cS)), shape=(nS, nS))
    return LocalForms(A, Mb, Mc, pi_div)


@dataclass
class SaddleSystem:
    """Assembled interior system with its building blocks."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    numbering: GlobalNumbering
    maps: ComplexMaps
    forms: LocalForms
    A: sp.csr_matrix
    Mb: sp.csr_matrix
    Mc: sp.csr_matrix
    j_mean: np.ndarray

    @property
    def sizes(self):
        n = self.numbering
        return n.n_u, n.n_phi, n.n_p

    def symmetry_error(self):
        diff = self.matrix - self.matrix.T
        big = abs(self.matrix).max()
        return float(abs(diff).max() / big) if diff.nnz and big > 0 else 0.0


def _rhs_u(mesh, geom, j_mean):
    out = np.zeros(mesh.n_vertices + mesh.n_faces)
    for K in range(mesh.n_cells):
        fs = mesh.cell_faces[K]
        out[mesh.n_vertices + fs] += j_mean[K] * mesh.cell_signs[K] * geom.face_area[fs]
    return out


def assemble_system(mesh, j, geom=None, degree=None, forms=None, maps=None):
    """Assemble the saddle-point system for source ``j``.

    Parameters
    ----------
    j : callable or float
        Scalar source evaluated at points ``(N, 3)``; a number is taken as a
        constant.
    degree : int, optional
        Cell quadrature degree for the means of ``j``. Defaults to the degree
        of ``j`` when it exposes one, capped at ``ANALYTIC_DEGREE``.

    Raises
    ------
    DegenerateSystemError
        Every DOF is constrained by the boundary conditions.
    """
    geom = compute_geometry(mesh) if geom is None else geom
    maps = build_complex_maps(mesh, geom) if maps is None else maps
    num = maps.numbering
    if num.n_u + num.n_phi + num.n_p == 0:
        raise DegenerateSystemError("the mesh has no interior degrees of freedom")
    forms = assemble_local_forms(mesh, geom) if forms is None else forms

    if np.isscalar(j):
        j_mean = np.full(mesh.n_cells, float(j))
    else:
        if degree is None:
            degree = min(getattr(j, "degree", ANALYTIC_DEGREE), ANALYTIC_DEGREE)
        j_mean = integrate_cells(mesh, geom, j, max(int(degree), 0)) / geom.cell_volume

    A = forms.A[num.u_full][:, num.u_full]
    Mb = forms.Mb[num.u_full][:, num.u_full]
    Mc = forms.Mc[num.phi_full][:, num.phi_full]
    B = Mb @ maps.C
    E = Mc @ maps.G
    matrix = sp.bmat([[A, B, None], [B.T, None, E], [None, E.T, None]], format="csr")
    n_u, n_phi, n_p = num.n_u, num.n_phi, num.n_p
    if matrix.shape != (n_u + n_phi + n_p,) * 2:
        # bmat drops empty blocks; rebuild with explicit shapes
        Z = sp.csr_matrix
        matrix = sp.bmat([[A, B, Z((n_u, n_p))], [B.T, Z((n_phi, n_phi)), E],
                          [Z((n_p, n_u)), E.T, Z((n_p, n_p))]], format="csr")
    rhs = np.zeros(n_u + n_phi + n_p)
    rhs[:n_u] = _rhs_u(mesh, geom, j_mean)[num.u_full]
    return SaddleSystem(matrix, rhs, num, maps, forms, A, Mb, Mc, j_mean)


@dataclass
class Solution:
    """Solved fields in full layouts (constrained DOFs are zero)."""

    u: np.ndarray
    phi: np.ndarray
    p: np.ndarray
    residual: float


def solve_system(system, tol=DEFAULT_TOL):
    """Sparse direct solve with a residual check.

    Raises
    ------
    SolverFailure
        The relative residual (absolute when the rhs vanishes) exceeds ``tol``.
    """
    M, b = system.matrix, system.rhs
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        x = np.zeros_like(b)
        res = 0.0
    else:
        x = spla.spsolve(M.tocsc(), b)
        if not np.all(np.isfinite(x)):
            raise SolverFailure("direct solve produced non-finite values", np.inf)
        res = float(np.linalg.norm(M @ x - b) / bnorm)
    limit = tol if bnorm > 0 else 1e-12
    if res > limit:
        raise SolverFailure(f"relative residual {res:.3e} exceeds {limit:.1e}", res)
    n_u, n_phi, _ = system.sizes
    num = system.numbering
    return Solution(u=num.expand("u", x[:n_u]),
                    phi=num.expand("phi", x[n_u:n_u + n_phi]),
                    p=num.expand("p", x[n_u + n_phi:]),
                    residual=res)


def discrete_norms(system, solution, mesh, geom):
    """``(||u_h||, ||phi_h||, ||p_h||)`` via ``M_b``, ``M_c`` and an h^3-weighted nodal norm."""
    Mb, Mc = system.forms.Mb, system.forms.Mc
    h = float(geom.cell_diameter.max())
    u = float(np.sqrt(max(solution.u @ (Mb @ solution.u), 0.0)))
    phi = float(np.sqrt(max(solution.phi @ (Mc @ solution.phi), 0.0)))
    p = float(np.sqrt(h ** 3 * np.sum(solution.p ** 2)))
    return u, phi, p


def error_norm_h(mesh, u_exact, div_u_exact, u_dofs, geom=None, Mb=None, degree=ANALYTIC_DEGREE):
    """``sqrt(b_h(I_h u - u_h, I_h u - u_h))`` on full-layout V DOFs."""
    geom = compute_geometry(mesh) if geom is None else geom
    Mb = assemble_local_forms(mesh, geom).Mb if Mb is None else Mb
    d = interpolate_v(mesh, geom, u_exact, div_u_exact, degree) - np.asarray(u_dofs, dtype=float)
    return float(np.sqrt(max(d @ (Mb @ d), 0.0)))


def error_div_diagnostics(mesh, div_u_exact, grad_div_u_exact, u_dofs, geom=None, forms=None,
                          degree=DIAGNOSTIC_DEGREE):
    """Projected divergence errors ``(L2, H1-seminorm)``.

    Compares, cell by cell, the gradient projection of ``div u_h`` with the
    exact ``div u`` and its gradient with ``grad div u``.
    """
    geom = compute_geometry(mesh) if geom is None else geom
    forms = assemble_local_forms(mesh, geom) if forms is None else forms
    u_dofs = np.asarray(u_dofs, dtype=float)
    coef = np.array([P @ u_dofs[ids] for ids, P in forms.pi_div])      # (nc, 4)
    centers = geom.cell_centroid
    hK = geom.cell_diameter
    l2 = h1 = 0.0
    for pts, w, own in cell_quadrature_batches(mesh, geom, degree):
        s = (pts - centers[own]) / hK[own, None]
        approx = coef[own, 0] + np.einsum("qi,qi->q", coef[own, 1:], s)
        grad = coef[own, 1:] / hK[own, None]
        l2 += float(w @ (np.asarray(div_u_exact(pts)) - approx) ** 2)
        g = np.asarray(grad_div_u_exact(pts)) - grad
        h1 += float(w @ np.einsum("qi,qi->q", g, g))
    return float(np.sqrt(l2)), float(np.sqrt(h1))


def write_coo(system, path):
    """Write the matrix as ``row col value`` lines (0-based) after a size header."""
    M = system.matrix.tocoo()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]} {M.nnz}\n")
        for r, c, v in zip(M.row, M.col, M.data):
            fh.write(f"{r} {c} {v:.17g}\n")
