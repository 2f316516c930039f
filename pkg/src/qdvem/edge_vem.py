"""Lowest-order edge space: tangential moments, L2 projection onto constants
and the discrete L2 product.

DOFs are the edge means ``(1/|e|) int_e phi . t_e`` over the cell edges in
local ascending order, with the global tangent running from the lower to the
higher vertex index.
"""

from __future__ import annotations

import numpy as np

from .polytope import _face_decomposition_matrix
from .scalar_vem import GAUSS2, _cached, _face_local_coords, face_gram

__all__ = [
    "edge_dofs_of_constant",
    "face_moment_matrix",
    "face_tangential_moment_row",
    "face_tangential_moment",
    "sigma_pi0_matrix",
    "sigma_pi0",
    "product_e",
]


def edge_dofs_of_constant(lc, c):
    """DOFs of the constant field ``c``: ``c . t_e``."""
    return lc.edge_tangent @ np.asarray(c, dtype=float)


def face_moment_matrix(lc, j):
    """Linear map ``(r, dofs) -> int_f phi_tau . r`` as an (n_edges, 6) array.

    ``row = M @ r.ravel()`` gives the weights of the face edge DOFs (loop
    order) for the in-plane field with coefficients ``r`` (see
    :func:`face_tangential_moment_row`).
    """
    def build():
        h = lc.face_diameter[j]
        area = lc.face_area[j]
        # g = Ag @ r.ravel() over (s1, s2, s1^2, s1 s2, s2^2); the x_f part integrates to zero
        Ag = np.linalg.inv(_face_decomposition_matrix(float(h)))[:5]
        int_g = face_gram(lc, j)[0, 1:] @ Ag
        s = _face_local_coords(lc, j)
        a, b = s, np.roll(s, -1, axis=0)
        le = np.linalg.norm(b - a, axis=1) * h
        t, w = GAUSS2
        p = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]      # (n, 2, 2)
        mono = np.stack([p[..., 0], p[..., 1], p[..., 0] ** 2, p[..., 0] * p[..., 1], p[..., 1] ** 2], -1)
        int_e = le[:, None] * np.einsum("q,nqk->nk", w, mono) @ Ag
        # phi . t along the loop equals s_e * dof_e
        return lc.face_edge_signs[j][:, None] * (np.outer(le, int_g) / area - int_e)
    return _cached(lc, ("face_moment", j), build)


def face_tangential_moment_row(lc, j, r):
    """Row ``w`` with ``int_f phi_tau . r = w . dofs(face edges, loop order)``.

    Parameters
    ----------
    r : array_like, shape (2, 3)
        In-plane field in the face frame; row ``i`` holds the coefficients of
        component ``i`` over the face monomials ``(1, s1, s2)``.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (2, 3):
        raise ValueError("r must be an in-plane field of degree <= 1, given as (2, 3) coefficients")
    return face_moment_matrix(lc, j) @ r.ravel()


def face_tangential_moment(lc, j, dofs, r):
    """``int_f phi_tau . r`` from the edge DOFs of face ``j`` (loop order)."""
    return face_tangential_moment_row(lc, j, r) @ np.asarray(dofs, dtype=float)


def _cross_table(v):
    # rows: e_k x v for k = 0, 1, 2
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def sigma_pi0_matrix(lc):
    """L2 projection onto constant vectors, shape (3, l_e).

    Uses the potential ``A = q0 x (x - b_K) / 2`` with ``curl A = q0`` so that
    ``(phi, q0)_K`` reduces to face moments of ``phi_tau`` against the linear
    in-plane field ``(n x A)|_f``.
    """
    def build():
        P = np.zeros((3, lc.ne))
        for j in range(lc.nf):
            E = lc.face_frame[j]
            h = lc.face_diameter[j]
            nu = lc.signs[j] * lc.face_normal[j]
            off = lc.face_centroid[j] - lc.centroid
            # A at b_f + h (s1 E1 + s2 E2) for q0 = e_k: (k, coefficient of 1/s1/s2, component)
            A = 0.5 * np.stack([_cross_table(off), h * _cross_table(E[0]), h * _cross_table(E[1])], axis=1)
            wfield = np.cross(nu, A)
            r = np.einsum("ic,kmc->kim", E, wfield)        # (3, 2, 3)
            P[:, lc.face_edges[j]] += r.reshape(3, 6) @ face_moment_matrix(lc, j).T
        return P / lc.volume
    return _cached(lc, "sigma_pi0", build)


def sigma_pi0(lc, dofs):
    return sigma_pi0_matrix(lc) @ np.asarray(dofs, dtype=float)


def product_e(lc):
    """Discrete L2 product on edge DOFs, shape (l_e, l_e).

    ``|K| (P0 phi).(P0 psi) + sum_e h_K^2 |e| res_e(phi) res_e(psi)`` with the
    edge residual ``res_e = dof_e - (P0 phi) . t_e``.
    """
    def build():
        P = sigma_pi0_matrix(lc)
        R = np.eye(lc.ne) - lc.edge_tangent @ P
        W = lc.diameter ** 2 * lc.edge_length
        out = lc.volume * P.T @ P + R.T @ (W[:, None] * R)
        return 0.5 * (out + out.T)
    return _cached(lc, "product_e", build)
