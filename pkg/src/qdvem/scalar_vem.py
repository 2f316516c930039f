"""Order-one scalar virtual spaces on faces and cells.

Local degrees of freedom of the cell space are the values at the cell
vertices (local ascending order) followed by the cell mean. Face projections
act on the values at the face vertices in loop order.

All matrices returned here map local DOF vectors to coefficient vectors in
the scaled monomial basis of the entity, ``(1, m_1, m_2[, m_3])``. They are
memoised in ``lc.cache``.
"""

from __future__ import annotations

import numpy as np

from .errors import GeometryError
from .polytope import ScaledMonomialBasis, simplex_rule

__all__ = [
    "face_gram",
    "cell_gram",
    "face_pi_nabla_matrix",
    "face_pi_nabla",
    "cell_pi_nabla_matrix",
    "cell_pi_nabla",
    "cell_pi0_matrix",
    "cell_pi0",
    "monomial_dofs",
    "stabilization_blocks",
    "product_n",
    "GAUSS2",
]

# 2-point Gauss-Legendre on [0, 1]: exact for cubics, so for P1 * P1 traces
GAUSS2 = (np.array([0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)]), np.array([0.5, 0.5]))


def _cached(lc, key, build):
    try:
        return lc.cache[key]
    except KeyError:
        val = lc.cache[key] = build()
        return val


def face_gram(lc, j, degree=None):
    """Gram matrix of the degree-2 face monomials on local face ``j``, (6, 6).

    Row 0 holds the face integrals of the monomials themselves.
    """
    degree = lc.quad_degree if degree is None else degree

    def build():
        basis = ScaledMonomialBasis.for_face(lc, j, 2)
        pts, w = simplex_rule(lc.face_tris[j], degree)
        M = basis(pts.reshape(-1, 3))
        return np.einsum("q,qi,qj->ij", w.ravel(), M, M)
    return _cached(lc, ("face_gram", j, degree), build)


def cell_gram(lc, degree=None):
    """Gram matrix of the degree-1 cell monomials, (4, 4)."""
    degree = lc.quad_degree if degree is None else degree

    def build():
        basis = ScaledMonomialBasis.for_cell(lc, 1)
        pts, w = simplex_rule(lc.tets, degree)
        M = basis(pts.reshape(-1, 3))
        return np.einsum("q,qi,qj->ij", w.ravel(), M, M)
    return _cached(lc, ("cell_gram", degree), build)


def _face_local_coords(lc, j):
    loop = lc.face_loops[j]
    return (lc.coords[loop] - lc.face_centroid[j]) @ lc.face_frame[j].T / lc.face_diameter[j]


def face_pi_nabla_matrix(lc, j):
    """Matrix of the face projection on local face ``j``, shape (3, n_f).

    Boundary traces are piecewise linear in the vertex values; the constant
    is fixed by matching boundary integrals. At order one this is also the
    face L2 projection.
    """
    def build():
        loop = lc.face_loops[j]
        n = len(loop)
        h = lc.face_diameter[j]
        area = lc.face_area[j]
        s = _face_local_coords(lc, j)
        nxt = np.roll(np.arange(n), -1)
        d = s[nxt] - s                      # edge vectors in scaled coordinates
        le = np.linalg.norm(d, axis=1) * h
        if le.sum() <= 0:
            raise GeometryError(f"face {lc.faces[j]} has zero perimeter")
        # outward normal of a counter-clockwise loop: (dy, -dx) / |d|
        nu = np.column_stack([d[:, 1], -d[:, 0]]) / np.linalg.norm(d, axis=1)[:, None]
        P = np.zeros((3, n))
        bnd = np.zeros(n)                   # int_{df} q as a row
        for i in range(n):
            for k in (i, nxt[i]):
                P[1:, k] += nu[i] / h * le[i] / 2
                bnd[k] += le[i] / 2
        P[1:] *= h * h / area
        # int_{df} m_k for the two linear monomials
        S = np.array([(le * (s[:, a] + s[nxt, a]) / 2).sum() for a in (0, 1)])
        P[0] = (bnd - S @ P[1:]) / le.sum()
        return P
    return _cached(lc, ("face_pi", j), build)


def face_pi_nabla(lc, j, dofs):
    """Face projection coefficients over ``(1, s1, s2)`` from vertex values."""
    return face_pi_nabla_matrix(lc, j) @ np.asarray(dofs, dtype=float)


def cell_pi_nabla_matrix(lc):
    """Matrix of the cell projection, shape (4, l_v + 1)."""
    def build():
        nv = lc.nv
        h = lc.diameter
        P = np.zeros((4, nv + 1))
        bnd_row = np.zeros(nv + 1)
        bnd_mono = np.zeros(3)
        for j in range(lc.nf):
            loop = lc.face_loops[j]
            # int_f Pi_f q = |f| * (constant coefficient), since int_f s = 0
            row = np.zeros(nv + 1)
            row[loop] = lc.face_area[j] * face_pi_nabla_matrix(lc, j)[0]
            normal = lc.signs[j] * lc.face_normal[j]
            P[1:] += np.outer(normal / h, row)
            bnd_row += row
            bnd_mono += lc.face_area[j] * (lc.face_centroid[j] - lc.centroid) / h
        P[1:] *= h * h / lc.volume
        area = lc.face_area.sum()
        P[0] = (bnd_row - bnd_mono @ P[1:]) / area
        return P
    return _cached(lc, "cell_pi", build)


def cell_pi_nabla(lc, dofs):
    return cell_pi_nabla_matrix(lc) @ np.asarray(dofs, dtype=float)


def cell_pi0_matrix(lc):
    """Matrix of the cell L2 projection onto P1, shape (4, l_v + 1).

    Degree-one moments are taken from the gradient projection and the
    constant moment from the mean DOF.
    """
    def build():
        H = cell_gram(lc)
        PN = cell_pi_nabla_matrix(lc)
        rhs = np.zeros_like(PN)
        rhs[0, -1] = lc.volume
        rhs[1:] = H[1:] @ PN
        return np.linalg.solve(H, rhs)
    return _cached(lc, "cell_pi0", build)


def cell_pi0(lc, dofs):
    return cell_pi0_matrix(lc) @ np.asarray(dofs, dtype=float)


def monomial_dofs(lc):
    """DOFs of the degree-1 cell monomials, shape (l_v + 1, 4)."""
    def build():
        basis = ScaledMonomialBasis.for_cell(lc, 1)
        D = np.empty((lc.nv + 1, 4))
        D[:-1] = basis(lc.coords)
        D[-1] = cell_gram(lc)[0] / lc.volume
        return D
    return _cached(lc, "monomial_dofs", build)


def _edge_mass(length):
    # P1 mass matrix on a segment by 2-point Gauss (exact)
    t, w = GAUSS2
    phi = np.stack([1.0 - t, t])
    return length * (phi * w) @ phi.T


def stabilization_blocks(lc):
    """Unweighted pieces of the scalar stabilization on cell DOFs.

    Returns
    -------
    cell : ndarray, (l_v + 1, l_v + 1)
        ``(Pi0 q, Pi0 r)_K``.
    faces : list of ndarray
        ``(Pi_f q, Pi_f r)_f`` per local face.
    edges : list of ndarray
        ``(q, r)_{df}`` per local face, from piecewise-linear traces.
    """
    def build():
        n = lc.nv + 1
        P0 = cell_pi0_matrix(lc)
        cell = P0.T @ cell_gram(lc) @ P0
        faces, edges = [], []
        for j in range(lc.nf):
            loop = lc.face_loops[j]
            Pf = face_pi_nabla_matrix(lc, j)
            F = np.zeros((n, n))
            F[np.ix_(loop, loop)] = Pf.T @ face_gram(lc, j)[:3, :3] @ Pf
            faces.append(F)
            E = np.zeros((n, n))
            pts = lc.coords[loop]
            le = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
            for i in range(len(loop)):
                ab = [loop[i], loop[(i + 1) % len(loop)]]
                E[np.ix_(ab, ab)] += _edge_mass(le[i])
            edges.append(E)
        return cell, faces, edges
    return _cached(lc, "stab_blocks", build)


def product_n(lc):
    """Stabilized H1-seminorm product on cell DOFs, shape (l_v + 1, l_v + 1).

    Consistency part on the gradient projection plus the stabilization
    ``h_K^-2 (Pi0 q, Pi0 r)_K + sum_f [h_f^-1 (Pi_f q, Pi_f r)_f + (q, r)_df]``
    applied to ``(I - Pi)`` residuals.
    """
    def build():
        PN = cell_pi_nabla_matrix(lc)
        h = lc.diameter
        M = PN[1:].T @ PN[1:] * (lc.volume / h ** 2)
        # gradients of scaled monomials are e_i / h, orthogonal with norm |K| / h^2
        R = np.eye(lc.nv + 1) - monomial_dofs(lc) @ PN
        cell, faces, edges = stabilization_blocks(lc)
        S = cell / h ** 2
        for j in range(lc.nf):
            S = S + faces[j] / lc.face_diameter[j] + edges[j]
        out = M + R.T @ S @ R
        return 0.5 * (out + out.T)
    return _cached(lc, "product_n", build)
