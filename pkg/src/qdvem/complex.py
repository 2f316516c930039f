"""DOF-level maps of the discrete complex ``grad -> curl -> div`` and checks of
its structural exactness and commutativity with the interpolants.

Global DOF layouts (full, before boundary conditions):

* U (vertex values): one per mesh vertex.
* Sigma (edge tangential means): one per edge.
* V (grad-div): ``div v`` at every vertex, then the normal mean on every face.
* W (scalar): value at every vertex, then the mean on every cell.

Interior maps keep the rows and columns of unconstrained DOFs; W keeps its
interior vertices and all cell means.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graddiv_vem import interpolate_v
from .mesh import compute_geometry
from .polyfield import PolyVector
from .polytope import ANALYTIC_DEGREE, integrate_cells

__all__ = [
    "GlobalNumbering",
    "ComplexMaps",
    "ComplexReport",
    "build_complex_maps",
    "interpolate_w",
    "verify_complex",
    "RANK_CUTOFF",
    "RANK_SIZE_CAP",
]

RANK_CUTOFF = 1e-9
RANK_SIZE_CAP = 5000


@dataclass(frozen=True)
class GlobalNumbering:
    """Interior DOF indices of every field; ``-1`` marks a constrained DOF.

    ``u_full``, ``phi_full``, ``p_full`` and ``w_full`` list, in interior
    order, the full-layout index of each interior DOF.
    """

    u_full: np.ndarray
    phi_full: np.ndarray
    p_full: np.ndarray
    w_full: np.ndarray
    n_u_full: int
    n_phi_full: int
    n_p_full: int
    n_w_full: int

    @classmethod
    def from_mesh(cls, mesh):
        nv, nf, ne = mesh.n_vertices, mesh.n_faces, mesh.n_edges
        iv = np.flatnonzero(~mesh.boundary_vertices)
        ifc = np.flatnonzero(~mesh.boundary_faces)
        ie = np.flatnonzero(~mesh.boundary_edges)
        return cls(
            u_full=np.concatenate([iv, nv + ifc]),
            phi_full=ie,
            p_full=iv,
            w_full=np.concatenate([iv, nv + np.arange(mesh.n_cells)]),
            n_u_full=nv + nf,
            n_phi_full=ne,
            n_p_full=nv,
            n_w_full=nv + mesh.n_cells,
        )

    @property
    def n_u(self):
        return len(self.u_full)

    @property
    def n_phi(self):
        return len(self.phi_full)

    @property
    def n_p(self):
        return len(self.p_full)

    @property
    def n_w(self):
        return len(self.w_full)

    def _index(self, full, n):
        out = np.full(n, -1)
        out[full] = np.arange(len(full))
        return out

    @property
    def u_index(self):
        return self._index(self.u_full, self.n_u_full)

    @property
    def phi_index(self):
        return self._index(self.phi_full, self.n_phi_full)

    @property
    def p_index(self):
        return self._index(self.p_full, self.n_p_full)

    def expand(self, kind, values):
        """Full-layout vector with zeros at constrained DOFs."""
        full = getattr(self, f"{kind}_full")
        out = np.zeros(getattr(self, f"n_{kind}_full"))
        out[full] = values
        return out


@dataclass(frozen=True)
class ComplexMaps:
    """Sparse ``G``, ``C``, ``D`` on interior DOFs plus their full versions."""

    G: sp.csr_matrix
    C: sp.csr_matrix
    D: sp.csr_matrix
    G_full: sp.csr_matrix
    C_full: sp.csr_matrix
    D_full: sp.csr_matrix
    numbering: GlobalNumbering


def build_complex_maps(mesh, geom=None):
    """Assemble the gradient, curl and divergence DOF maps in one pass."""
    geom = compute_geometry(mesh) if geom is None else geom
    nv, ne, nf, nc = mesh.n_vertices, mesh.n_edges, mesh.n_faces, mesh.n_cells
    E = mesh.edges
    inv = 1.0 / geom.edge_length
    G = sp.csr_matrix((np.concatenate([-inv, inv]),
                       (np.tile(np.arange(ne), 2), np.concatenate([E[:, 0], E[:, 1]]))),
                      shape=(ne, nv))

    rows, cols, vals = [], [], []
    for f in range(nf):
        ids = mesh.face_edges[f]
        rows.append(np.full(len(ids), nv + f))
        cols.append(ids)
        vals.append(mesh.face_edge_signs[f] * geom.edge_length[ids] / geom.face_area[f])
    C = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(nv + nf, ne))

    rows, cols, vals = [np.arange(nv)], [np.arange(nv)], [np.ones(nv)]
    for K in range(nc):
        fs = mesh.cell_faces[K]
        rows.append(np.full(len(fs), nv + K))
        cols.append(nv + fs)
        vals.append(mesh.cell_signs[K] * geom.face_area[fs] / geom.cell_volume[K])
    D = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(nv + nc, nv + nf))

    num = GlobalNumbering.from_mesh(mesh)
    return ComplexMaps(
        G=G[num.phi_full][:, num.p_full].tocsr(),
        C=C[num.u_full][:, num.phi_full].tocsr(),
        D=D[num.w_full][:, num.u_full].tocsr(),
        G_full=G, C_full=C, D_full=D, numbering=num,
    )


def interpolate_w(mesh, geom, q, degree=ANALYTIC_DEGREE):
    """Full W DOFs of a scalar field: vertex values then cell means."""
    means = integrate_cells(mesh, geom, q, degree) / geom.cell_volume
    return np.concatenate([np.asarray(q(mesh.vertices), dtype=float), means])


def numerical_rank(A, cutoff=RANK_CUTOFF):
    """Number of singular values above ``cutoff`` times the largest."""
    A = A.toarray() if sp.issparse(A) else np.asarray(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > cutoff * s[0])) if s.size and s[0] > 0 else 0


@dataclass
class ComplexReport:
    """Outcome of :func:`verify_complex` as ordered key/value pairs."""

    values: dict = field(default_factory=dict)
    notices: list = field(default_factory=list)

    def key_values(self):
        lines = []
        for k, v in self.values.items():
            if isinstance(v, float):
                v = f"{v:.6e}"
            elif isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            lines.append(f"{k}={v}")
        return "\n".join(lines)

    def text(self):
        v = self.values
        out = [f"census: n_p={v['n_p']} n_phi={v['n_phi']} n_u={v['n_u']} n_w={v['n_w']}",
               f"max|C.G| = {v['max_CG']:.3e}",
               f"max|D.C| = {v['max_DC']:.3e}"]
        if "rank_G" in v:
            out.append(f"ranks (G, C, D) = ({v['rank_G']}, {v['rank_C']}, {v['rank_D']}); "
                       f"expected ({v['expected_rank_G']}, {v['expected_rank_C']}, "
                       f"{v['expected_rank_D']}); exact={v['exact']}")
            out.append(f"weighted mean of im(D) = {v['image_mean']:.3e}")
        for k, val in v.items():
            if k.startswith("commute["):
                out.append(f"{k} residual = {val:.3e}")
        out.extend(f"notice: {n}" for n in self.notices)
        return "\n".join(out)


def _sample(field):
    if isinstance(field, tuple):
        name, field = field
    else:
        name = None
    if isinstance(field, PolyVector):
        return name or f"deg{field.degree}", field, field.div()
    raise TypeError("sample fields must be PolyVector or (name, PolyVector)")


def verify_complex(mesh, sample_fields=(), geom=None, maps=None, degree=ANALYTIC_DEGREE,
                   size_cap=RANK_SIZE_CAP):
    """Check compositions, exactness ranks, image of ``D`` and commutativity.

    Parameters
    ----------
    sample_fields : sequence
        Polynomial vector fields (optionally ``(name, field)`` pairs) used for
        the commutativity residual ``max |D I_h v - J_h div v|``.
    size_cap : int
        Ranks are computed only when ``n_p + n_phi + n_u + n_w`` does not
        exceed this.
    """
    geom = compute_geometry(mesh) if geom is None else geom
    maps = build_complex_maps(mesh, geom) if maps is None else maps
    num = maps.numbering
    rep = ComplexReport()
    v = rep.values
    v.update(n_p=num.n_p, n_phi=num.n_phi, n_u=num.n_u, n_w=num.n_w)
    CG = maps.C @ maps.G
    DC = maps.D @ maps.C
    v["max_CG"] = float(abs(CG).max()) if CG.nnz else 0.0
    v["max_DC"] = float(abs(DC).max()) if DC.nnz else 0.0
    if num.n_u == 0 and num.n_p == 0:
        rep.notices.append("no interior DOFs: the boundary-value problem is degenerate; maps checked only")

    total = num.n_p + num.n_phi + num.n_u + num.n_w
    if total <= size_cap:
        rG, rC, rD = (numerical_rank(M) for M in (maps.G, maps.C, maps.D))
        v.update(rank_G=rG, rank_C=rC, rank_D=rD)
        v["expected_rank_G"] = num.n_p
        v["expected_rank_C"] = num.n_phi - num.n_p
        v["expected_rank_D"] = num.n_u - (num.n_phi - num.n_p)
        v["expected_rank_D_meanzero"] = max(num.n_w - 1, 0) if num.n_u else 0
        v["exact"] = (rG == v["expected_rank_G"] and rC == v["expected_rank_C"]
                      and rD == v["expected_rank_D"])
        # |K|-weighted mean of every column of D
        weights = np.zeros(num.n_w)
        nvi = num.n_w - mesh.n_cells
        weights[nvi:] = geom.cell_volume
        col = weights @ maps.D.toarray() if num.n_u else np.zeros(0)
        v["image_mean"] = float(np.abs(col).max()) if col.size else 0.0
    else:
        rep.notices.append(f"rank checks skipped: {total} DOFs exceed the cap of {size_cap}")

    for field in sample_fields:
        name, u, div_u = _sample(field)
        lhs = maps.D_full @ interpolate_v(mesh, geom, u, div_u, degree)
        rhs = interpolate_w(mesh, geom, div_u, degree)
        v[f"commute[{name}]"] = float(np.abs(lhs - rhs).max())
    return rep
