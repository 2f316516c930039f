"""Scaled monomials, simplex decompositions and quadrature on polytopes.

Quadrature on a face or cell is assembled from collapsed-coordinate (Duffy)
Gauss rules on the simplices of a centroid fan. The collapsed directions use
Gauss-Jacobi points so that the Duffy Jacobian is absorbed into the weights;
with ``ceil((degree + 1) / 2)`` points per direction the rule is exact for
polynomials of total degree ``degree``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np
from scipy.special import roots_jacobi

from .errors import StarShapeError

__all__ = [
    "monomial_exponents",
    "ScaledMonomialBasis",
    "QuadratureRule",
    "decompose",
    "simplex_rule",
    "quadrature_rule",
    "integrate",
    "cell_quadrature_batches",
    "integrate_cells",
    "integrate_faces",
    "decompose_vector_poly",
    "simplex_monomial_integral",
]

ASSEMBLY_DEGREE = 6
ANALYTIC_DEGREE = 20
STAR_TOL = 1e-12


def _exact_degree(dim, d):
    if dim == 1:
        return [(d,)]
    return [(a, *rest) for a in range(d, -1, -1) for rest in _exact_degree(dim - 1, d - a)]


def monomial_exponents(dim, degree):
    """Multi-indices with ``|a| <= degree`` in graded lexicographic order.

    >>> monomial_exponents(2, 2).tolist()
    [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]
    """
    out = [e for d in range(degree + 1) for e in _exact_degree(dim, d)]
    return np.array(out, dtype=int).reshape(-1, dim)


class ScaledMonomialBasis:
    """Monomials ``((x - b_G) / h_G)**a`` on an edge, face or cell.

    For faces and edges ``axes`` holds the orthonormal intrinsic frame; local
    coordinates are ``(x - center) @ axes.T / h``.
    """

    def __init__(self, center, diameter, degree, axes=None):
        self.center = np.asarray(center, dtype=float)
        self.h = float(diameter)
        self.axes = np.eye(3) if axes is None else np.atleast_2d(np.asarray(axes, dtype=float))
        self.dim = len(self.axes)
        self.degree = int(degree)
        self.exponents = monomial_exponents(self.dim, self.degree)

    def __len__(self):
        return len(self.exponents)

    @classmethod
    def for_cell(cls, lc, degree):
        return cls(lc.centroid, lc.diameter, degree)

    @classmethod
    def for_face(cls, lc, j, degree):
        return cls(lc.face_centroid[j], lc.face_diameter[j], degree, lc.face_frame[j])

    def local(self, points):
        return (np.asarray(points, dtype=float) - self.center) @ self.axes.T / self.h

    def __call__(self, points):
        s = self.local(points)
        return np.prod(s[..., None, :] ** self.exponents, axis=-1)


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray
    degree: int


@lru_cache(maxsize=None)
def _jacobi01(n, alpha):
    # Gauss-Jacobi on [0, 1] for the weight (1 - t)**alpha
    x, w = roots_jacobi(n, alpha, 0)
    return (x + 1) / 2, w / 2 ** (alpha + 1)


@lru_cache(maxsize=None)
def reference_rule(dim, degree):
    """Rule on the unit simplex of dimension ``dim`` (barycentric-free form).

    Returns points in the reference coordinates and weights summing to
    ``1 / dim!``.
    """
    n = max(1, -(-(degree + 1) // 2))
    if dim == 1:
        t, w = _jacobi01(n, 0)
        return t[:, None], w
    if dim == 2:
        u, wu = _jacobi01(n, 1)
        v, wv = _jacobi01(n, 0)
        U, V = np.meshgrid(u, v, indexing="ij")
        W = np.outer(wu, wv)
        pts = np.column_stack([U.ravel(), (V * (1 - U)).ravel()])
        return pts, W.ravel()
    if dim == 3:
        u, wu = _jacobi01(n, 2)
        v, wv = _jacobi01(n, 1)
        w, ww = _jacobi01(n, 0)
        U, V, Wc = np.meshgrid(u, v, w, indexing="ij")
        wt = np.einsum("i,j,k->ijk", wu, wv, ww)
        pts = np.column_stack([U.ravel(), (V * (1 - U)).ravel(), (Wc * (1 - U) * (1 - V)).ravel()])
        return pts, wt.ravel()
    raise ValueError(f"unsupported simplex dimension {dim}")


def simplex_rule(simplices, degree):
    """Map the reference rule onto a batch of simplices.

    Parameters
    ----------
    simplices : ndarray, shape (T, d + 1, 3)
    degree : int

    Returns
    -------
    points : ndarray, shape (T, Q, 3)
    weights : ndarray, shape (T, Q)
        Non-negative weights; the simplex measure is unsigned.
    """
    S = np.asarray(simplices, dtype=float)
    d = S.shape[1] - 1
    ref, w = reference_rule(d, degree)
    J = S[:, 1:, :] - S[:, :1, :]              # (T, d, 3)
    pts = S[:, None, 0, :] + np.einsum("qd,tdk->tqk", ref, J)
    if d == 1:
        meas = np.linalg.norm(J[:, 0], axis=1)
    elif d == 2:
        meas = np.linalg.norm(np.cross(J[:, 0], J[:, 1]), axis=1)
    else:
        meas = np.abs(np.einsum("ti,ti->t", J[:, 0], np.cross(J[:, 1], J[:, 2])))
    # reference weights sum to 1/d!; meas is |det J| = d! * |simplex|
    return pts, meas[:, None] * w[None, :]


def decompose(mesh, geom, kind, index):
    """Centroid-fan simplices of a face (triangles) or cell (tetrahedra).

    Faces are fanned from their centroid; cells are coned from the cell
    centroid over every face triangle, so a hexahedron gives 24 tetrahedra.

    Raises
    ------
    StarShapeError
        A simplex is inverted, i.e. the entity is not star-shaped with respect
        to its centroid.
    """
    X = mesh.vertices
    if kind == "face":
        loop = mesh.faces[index]
        pts = X[loop]
        c = geom.face_centroid[index]
        tris = np.stack([np.broadcast_to(c, pts.shape), pts, np.roll(pts, -1, axis=0)], axis=1)
        signed = 0.5 * np.cross(tris[:, 1] - c, tris[:, 2] - c) @ geom.face_normal[index]
        if np.any(signed < -STAR_TOL * geom.face_diameter[index] ** 2):
            raise StarShapeError(f"face {index} is not star-shaped with respect to its centroid")
        return tris
    if kind == "cell":
        c = geom.cell_centroid[index]
        out = []
        for f, s in zip(mesh.cell_faces[index], mesh.cell_signs[index]):
            tris = decompose(mesh, geom, "face", f)
            if s < 0:
                tris = tris[:, [0, 2, 1]]
            out.append(np.concatenate([np.broadcast_to(c, (len(tris), 1, 3)), tris], axis=1))
        tets = np.concatenate(out)
        a, b, d = (tets[:, i] - tets[:, 0] for i in (1, 2, 3))
        vol = np.einsum("ti,ti->t", a, np.cross(b, d)) / 6.0
        if np.any(vol < -STAR_TOL * geom.cell_diameter[index] ** 3):
            raise StarShapeError(f"cell {index} is not star-shaped with respect to its centroid")
        return tets
    if kind == "edge":
        return mesh.vertices[mesh.edges[index]][None]
    raise ValueError(f"unknown entity kind {kind!r}")


def quadrature_rule(mesh, geom, kind, index, degree):
    """Quadrature rule on one edge, face or cell, exact to ``degree``."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    pts, w = simplex_rule(decompose(mesh, geom, kind, index), degree)
    return QuadratureRule(pts.reshape(-1, 3), w.ravel(), int(degree))


def integrate(mesh, geom, kind, index, f, degree):
    """Integral of ``f`` (callable on (n, 3) points) over one entity."""
    rule = quadrature_rule(mesh, geom, kind, index, degree)
    vals = np.asarray(f(rule.points))
    return np.tensordot(rule.weights, vals, axes=(0, 0))


def _cell_simplices(mesh, geom):
    cached = geom.extra.get("cell_tets")
    if cached is None:
        tets, owner = [], []
        for K in range(mesh.n_cells):
            t = decompose(mesh, geom, "cell", K)
            tets.append(t)
            owner.append(np.full(len(t), K))
        cached = (np.concatenate(tets), np.concatenate(owner))
        geom.extra["cell_tets"] = cached
    return cached


def _face_simplices(mesh, geom):
    cached = geom.extra.get("face_tris")
    if cached is None:
        tris, owner = [], []
        for f in range(mesh.n_faces):
            t = decompose(mesh, geom, "face", f)
            tris.append(t)
            owner.append(np.full(len(t), f))
        cached = (np.concatenate(tris), np.concatenate(owner))
        geom.extra["face_tris"] = cached
    return cached


def cell_quadrature_batches(mesh, geom, degree, max_points=2_000_000):
    """Yield ``(points, weights, owner)`` chunks covering every cell.

    ``owner`` gives the cell index of each point.
    """
    tets, owner = _cell_simplices(mesh, geom)
    nq = len(reference_rule(3, degree)[1])
    step = max(1, max_points // nq)
    for s in range(0, len(tets), step):
        pts, w = simplex_rule(tets[s:s + step], degree)
        yield pts.reshape(-1, 3), w.ravel(), np.repeat(owner[s:s + step], nq)


def integrate_cells(mesh, geom, f, degree):
    """Per-cell integrals of ``f``; vector-valued ``f`` gives shape (nc, k)."""
    out = None
    for pts, w, own in cell_quadrature_batches(mesh, geom, degree):
        vals = np.asarray(f(pts))
        vals = vals.reshape(len(pts), -1) * w[:, None]
        if out is None:
            out = np.zeros((mesh.n_cells, vals.shape[1]))
        for k in range(vals.shape[1]):
            out[:, k] += np.bincount(own, vals[:, k], minlength=mesh.n_cells)
    return out[:, 0] if out.shape[1] == 1 else out


def integrate_faces(mesh, geom, f, degree, faces=None):
    """Per-face integrals of ``f``; ``f`` may take ``(points, face_ids)``."""
    tris, owner = _face_simplices(mesh, geom)
    if faces is not None:
        keep = np.isin(owner, faces)
        tris, owner = tris[keep], owner[keep]
    pts, w = simplex_rule(tris, degree)
    nq = pts.shape[1]
    own = np.repeat(owner, nq)
    vals = np.asarray(f(pts.reshape(-1, 3), own))
    vals = vals.reshape(len(own), -1) * w.ravel()[:, None]
    out = np.stack([np.bincount(own, vals[:, k], minlength=mesh.n_faces)
                    for k in range(vals.shape[1])], axis=1)
    return out[:, 0] if out.shape[1] == 1 else out


def simplex_monomial_integral(simplex, exps):
    """Exact integral of ``x**a y**b z**c`` over a tetrahedron or triangle.

    Uses the affine expansion in barycentric coordinates and the formula
    ``int lambda^k = d! |S| k! / (d + |k|)!``; independent of any quadrature.
    """
    S = np.asarray(simplex, dtype=float)
    d = len(S) - 1
    J = S[1:] - S[0]
    if d == 3:
        meas = abs(np.dot(J[0], np.cross(J[1], J[2]))) / 6.0
    elif d == 2:
        meas = 0.5 * np.linalg.norm(np.cross(J[0], J[1]))
    else:
        meas = np.linalg.norm(J[0])
    # expand prod_i (sum_v S[v, i] lambda_v)**a_i into barycentric monomials
    poly = {(0,) * (d + 1): 1.0}
    for axis, a in enumerate(exps):
        for _ in range(a):
            nxt = {}
            for k, c in poly.items():
                for v in range(d + 1):
                    kk = list(k)
                    kk[v] += 1
                    kk = tuple(kk)
                    nxt[kk] = nxt.get(kk, 0.0) + c * S[v, axis]
            poly = nxt
    total = 0.0
    for k, c in poly.items():
        num = 1.0
        for ki in k:
            num *= factorial(ki)
        total += c * num / factorial(d + sum(k))
    return factorial(d) * meas * total


def decompose_vector_poly(space, field, h=None):
    """Split a low-degree vector polynomial.

    ``space="3D-P0"``: ``field`` is a constant 3-vector ``q0`` and ``h`` the
    cell diameter; returns the coefficients of ``q0 . (x - b_K)`` over the
    degree-1 scaled monomials, i.e. ``h * q0``.

    ``space="face-P1"``: ``field`` is a (2, 3) array; row ``i`` holds the
    coefficients of the in-plane component ``i`` over the face monomials
    ``(1, s1, s2)``, and ``h`` the face diameter. Returns ``(g, c)`` with ``g``
    the coefficients of ``g`` over ``(s1, s2, s1^2, s1 s2, s2^2)`` such that
    ``field = rot g + c * x_f`` with ``rot g = (dg/dx2, -dg/dx1)``.
    """
    if space == "3D-P0":
        return float(h) * np.asarray(field, dtype=float)
    if space != "face-P1":
        raise ValueError(f"unknown decomposition space {space!r}")
    r = np.asarray(field, dtype=float)
    if r.shape != (2, 3):
        raise ValueError("face field must be given as a (2, 3) coefficient array")
    A = _face_decomposition_matrix(float(h))
    sol = np.linalg.solve(A, r.ravel())
    return sol[:5], sol[5]


@lru_cache(maxsize=4096)
def _face_decomposition_matrix(h):
    # columns: rot s1, rot s2, rot s1^2, rot s1 s2, rot s2^2, x_f
    # rows: component 0 over (1, s1, s2), then component 1 over (1, s1, s2)
    A = np.zeros((6, 6))
    A[3, 0] = -1 / h
    A[0, 1] = 1 / h
    A[4, 2] = -2 / h
    A[1, 3], A[5, 3] = 1 / h, -1 / h
    A[2, 4] = 2 / h
    A[1, 5], A[5, 5] = h, h
    A.flags.writeable = False
    return A


def binomial_count(k, d):
    return comb(k + d, d)
