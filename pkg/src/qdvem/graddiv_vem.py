"""Lowest-order H(grad-div)-conforming space.

Local DOFs are the values of ``div v`` at the cell vertices (local ascending
order) followed by the face means ``(1/|f|) int_f v . n_f`` with the global
face normal (local ascending face order).
"""

from __future__ import annotations

import numpy as np

from .polytope import ANALYTIC_DEGREE, integrate_faces
from .scalar_vem import _cached, cell_gram, cell_pi_nabla_matrix, product_n, stabilization_blocks

__all__ = [
    "div_dof_transfer",
    "v_pi0_matrix",
    "v_pi0",
    "local_b",
    "local_a",
    "local_dofs_of_constant",
    "interpolate_v",
]


def div_dof_transfer(lc):
    """Map from grad-div DOFs to scalar cell DOFs of ``div v``, (l_v + 1, l_v + l_f)."""
    def build():
        nv, nf = lc.nv, lc.nf
        T = np.zeros((nv + 1, nv + nf))
        T[:nv, :nv] = np.eye(nv)
        T[nv, nv:] = lc.signs * lc.face_area / lc.volume
        return T
    return _cached(lc, "div_transfer", build)


def local_dofs_of_constant(lc, c):
    """Local DOFs of the constant field ``c``."""
    return np.concatenate([np.zeros(lc.nv), lc.face_normal @ np.asarray(c, dtype=float)])


def v_pi0_matrix(lc):
    """L2 projection onto constant vectors, shape (3, l_v + l_f).

    Integrates by parts against ``q0 . (x - b_K)``; the volume term uses the
    gradient projection of ``div v`` and the face terms are exact because
    ``v . n_f`` is the constant face DOF.
    """
    def build():
        nv = lc.nv
        h = lc.diameter
        H = cell_gram(lc)
        A = cell_pi_nabla_matrix(lc) @ div_dof_transfer(lc)     # coefficients of Pi div v
        P = -h * H[1:] @ A
        off = lc.face_centroid - lc.centroid                    # (lf, 3)
        P[:, nv:] += (lc.signs * lc.face_area)[None, :] * off.T
        return P / lc.volume
    return _cached(lc, "v_pi0", build)


def v_pi0(lc, dofs):
    return v_pi0_matrix(lc) @ np.asarray(dofs, dtype=float)


def _stabilization(lc):
    # S^K on scalar div DOFs and face DOFs
    nv, nf = lc.nv, lc.nf
    T = div_dof_transfer(lc)
    cell, faces, edges = stabilization_blocks(lc)
    S = cell * lc.diameter ** 2
    for j in range(nf):
        hf = lc.face_diameter[j]
        S = S + hf ** 3 * faces[j] + hf ** 4 * edges[j]
    out = T.T @ S @ T
    out[nv:, nv:] += np.diag(lc.face_diameter * lc.face_area)
    return out


def local_b(lc):
    """Local matrix of the discrete L2 product on grad-div DOFs."""
    def build():
        P = v_pi0_matrix(lc)
        D = np.zeros((lc.nv + lc.nf, 3))
        D[lc.nv:] = lc.face_normal
        R = np.eye(lc.nv + lc.nf) - D @ P
        out = lc.volume * P.T @ P + R.T @ _stabilization(lc) @ R
        return 0.5 * (out + out.T)
    return _cached(lc, "local_b", build)


def local_a(lc):
    """Local matrix of ``[div v, div w]`` in the stabilized H1 product."""
    def build():
        T = div_dof_transfer(lc)
        out = T.T @ product_n(lc) @ T
        return 0.5 * (out + out.T)
    return _cached(lc, "local_a", build)


def interpolate_v(mesh, geom, u, div_u, degree=ANALYTIC_DEGREE):
    """Global DOFs of the interpolant: ``div u`` at vertices, then face means of ``u . n_f``.

    Parameters
    ----------
    u : callable
        Maps points ``(N, 3)`` to values ``(N, 3)``.
    div_u : callable
        Maps points ``(N, 3)`` to values ``(N,)``.
    """
    normals = geom.face_normal

    def flux(pts, owner):
        return np.einsum("ij,ij->i", np.asarray(u(pts)), normals[owner])

    face = integrate_faces(mesh, geom, flux, degree) / geom.face_area
    return np.concatenate([np.asarray(div_u(mesh.vertices), dtype=float), face])

