"""Polyhedral meshes: topology, geometry, structured generation and file I/O.

A mesh stores each planar face once as a vertex loop. The loop orientation
fixes the face normal by the right-hand rule; a cell lists its faces with a
sign that is ``+1`` when the stored normal points out of the cell. Edges are
derived from the face loops and carry the tangent running from the lower to
the higher global vertex index.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist

from .errors import GeometryError, MalformedFileError, MeshError, PlanarityError, TopologyError
from .polytope import decompose

__all__ = [
    "PolyMesh",
    "GeometryCache",
    "LocalCell",
    "MeshReport",
    "generate_cube_mesh",
    "distorted_cube_mesh",
    "load_mesh",
    "save_mesh",
    "compute_geometry",
    "validate_mesh",
    "local_cell",
    "single_cell_mesh",
]

PLANARITY_TOL = 1e-10
MEASURE_TOL = 1e-14


class PolyMesh:
    """Immutable polyhedral mesh.

    Parameters
    ----------
    vertices : array_like, shape (nv, 3)
    faces : sequence of sequences of int
        Vertex loops (0-based).
    cell_faces : sequence of sequences of int
        Face indices (0-based) of every cell.
    cell_signs : sequence of sequences of {+1, -1}
        Orientation of each referenced face relative to the cell.
    """

    def __init__(self, vertices, faces, cell_faces, cell_signs):
        vertices = np.array(vertices, dtype=float).reshape(-1, 3)
        vertices.flags.writeable = False
        self.vertices = vertices
        self.faces = tuple(np.array(f, dtype=int) for f in faces)
        self.cell_faces = tuple(np.array(c, dtype=int) for c in cell_faces)
        self.cell_signs = tuple(np.array(s, dtype=int) for s in cell_signs)
        if len(self.cell_faces) != len(self.cell_signs):
            raise ValueError("cell_faces and cell_signs differ in length")
        for c, s in zip(self.cell_faces, self.cell_signs):
            if len(c) != len(s):
                raise ValueError("a cell has mismatched face and sign lists")

    @classmethod
    def from_signed_cells(cls, vertices, faces, cells):
        """Build from cells given as signed 1-based face references."""
        cell_faces, cell_signs = [], []
        for c in cells:
            c = [int(i) for i in c]
            if any(i == 0 for i in c):
                raise ValueError("signed face references are 1-based; 0 is invalid")
            cell_faces.append([abs(i) - 1 for i in c])
            cell_signs.append([1 if i > 0 else -1 for i in c])
        return cls(vertices, faces, cell_faces, cell_signs)

    def signed_cells(self):
        return [[int(s) * (int(f) + 1) for f, s in zip(fs, ss)]
                for fs, ss in zip(self.cell_faces, self.cell_signs)]

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def n_cells(self):
        return len(self.cell_faces)

    @property
    def n_edges(self):
        return len(self.edges)

    def __repr__(self):
        return (f"PolyMesh(vertices={self.n_vertices}, edges={self.n_edges}, "
                f"faces={self.n_faces}, cells={self.n_cells})")

    # derived topology ----------------------------------------------------

    @cached_property
    def _edge_data(self):
        index = {}
        face_edges, face_edge_signs = [], []
        for loop in self.faces:
            ids, sg = [], []
            for a, b in zip(loop, np.roll(loop, -1)):
                a, b = int(a), int(b)
                key = (a, b) if a < b else (b, a)
                if key not in index:
                    index[key] = len(index)
                ids.append(index[key])
                sg.append(1 if a < b else -1)
            face_edges.append(np.array(ids, dtype=int))
            face_edge_signs.append(np.array(sg, dtype=int))
        edges = np.array(sorted(index, key=index.get), dtype=int).reshape(-1, 2)
        # renumber edges in lexicographic order of their endpoints
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        edges = edges[order]
        face_edges = tuple(rank[fe] for fe in face_edges)
        return edges, face_edges, tuple(face_edge_signs)

    @property
    def edges(self):
        """Edge endpoints, shape (ne, 2), lower index first."""
        return self._edge_data[0]

    @property
    def face_edges(self):
        """Edges of each face in loop order (edge ``i`` joins loop[i], loop[i+1])."""
        return self._edge_data[1]

    @property
    def face_edge_signs(self):
        """+1 where the face loop runs along the global edge tangent."""
        return self._edge_data[2]

    @cached_property
    def face_cells(self):
        """Cells referencing each face, as a list of (cell, sign) pairs."""
        out = [[] for _ in range(self.n_faces)]
        for K, (fs, ss) in enumerate(zip(self.cell_faces, self.cell_signs)):
            for f, s in zip(fs, ss):
                out[f].append((K, int(s)))
        return tuple(tuple(x) for x in out)

    @cached_property
    def boundary_faces(self):
        return np.array([len(c) == 1 for c in self.face_cells], dtype=bool)

    @cached_property
    def boundary_edges(self):
        mask = np.zeros(self.n_edges, dtype=bool)
        for f in np.flatnonzero(self.boundary_faces):
            mask[self.face_edges[f]] = True
        return mask

    @cached_property
    def boundary_vertices(self):
        mask = np.zeros(self.n_vertices, dtype=bool)
        for f in np.flatnonzero(self.boundary_faces):
            mask[self.faces[f]] = True
        return mask

    @cached_property
    def cell_vertices(self):
        return tuple(np.unique(np.concatenate([self.faces[f] for f in fs]))
                     for fs in self.cell_faces)

    @cached_property
    def cell_edges(self):
        return tuple(np.unique(np.concatenate([self.face_edges[f] for f in fs]))
                     for fs in self.cell_faces)


# ---------------------------------------------------------------------------
# structured cube meshes


def generate_cube_mesh(n, domain=((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))):
    """Structured mesh of ``n**3`` congruent boxes filling ``domain``.

    >>> m = generate_cube_mesh(2)
    >>> m.n_vertices, m.n_edges, m.n_faces, m.n_cells
    (27, 54, 36, 8)
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"subdivision count must be >= 1, got {n}")
    lo, hi = (np.asarray(p, dtype=float) for p in domain)
    if np.any(hi - lo <= 0):
        raise ValueError("box must have positive extents")
    m = n + 1
    t = [np.linspace(lo[d], hi[d], m) for d in range(3)]
    k, j, i = np.meshgrid(np.arange(m), np.arange(m), np.arange(m), indexing="ij")
    vertices = np.column_stack([t[0][i.ravel()], t[1][j.ravel()], t[2][k.ravel()]])

    def vid(i, j, k):
        return i + m * (j + m * k)

    faces, fx, fy, fz = [], {}, {}, {}
    for i in range(m):
        for j in range(n):
            for k in range(n):
                fx[i, j, k] = len(faces)
                faces.append([vid(i, j, k), vid(i, j + 1, k), vid(i, j + 1, k + 1), vid(i, j, k + 1)])
    for j in range(m):
        for k in range(n):
            for i in range(n):
                fy[i, j, k] = len(faces)
                faces.append([vid(i, j, k), vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j, k)])
    for k in range(m):
        for i in range(n):
            for j in range(n):
                fz[i, j, k] = len(faces)
                faces.append([vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k)])

    cell_faces, cell_signs = [], []
    for k in range(n):
        for j in range(n):
            for i in range(n):
                cell_faces.append([fx[i, j, k], fx[i + 1, j, k], fy[i, j, k],
                                   fy[i, j + 1, k], fz[i, j, k], fz[i, j, k + 1]])
                cell_signs.append([-1, 1, -1, 1, -1, 1])
    return PolyMesh(vertices, faces, cell_faces, cell_signs)


def distorted_cube_mesh(n, perturbation=0.2, seed=0, domain=((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))):
    """Cube mesh with every square face split into two triangles and interior
    vertices moved randomly by up to ``perturbation`` times the grid spacing.

    Triangular faces stay planar under any vertex motion, so the result is a
    valid polyhedral mesh of 12-faced cells. Boundary vertices stay put.
    """
    base = generate_cube_mesh(n, domain)
    rng = np.random.default_rng(seed)
    X = base.vertices.copy()
    lo, hi = (np.asarray(p, dtype=float) for p in domain)
    step = (hi - lo) / n
    inner = ~base.boundary_vertices
    X[inner] += perturbation * step * rng.uniform(-1.0, 1.0, size=(int(inner.sum()), 3))
    faces = []
    for a, b, c, d in base.faces:
        faces.append([a, b, c])
        faces.append([a, c, d])
    cell_faces = [np.ravel(np.column_stack([2 * fs, 2 * fs + 1])) for fs in base.cell_faces]
    cell_signs = [np.repeat(ss, 2) for ss in base.cell_signs]
    return PolyMesh(X, faces, cell_faces, cell_signs)


def single_cell_mesh(vertices, faces, signs=None):
    """A one-cell mesh; every face is a boundary face with outward loops."""
    signs = [1] * len(faces) if signs is None else signs
    return PolyMesh(vertices, faces, [list(range(len(faces)))], [signs])


# ---------------------------------------------------------------------------
# file format


def save_mesh(mesh, path):
    """Write ``mesh`` as a JSON document with vertices, faces and signed cells."""
    lines = ["{", '  "vertices": [']
    lines.append(",\n".join(f"    [{x!r}, {y!r}, {z!r}]" for x, y, z in mesh.vertices.tolist()))
    lines.append("  ],")
    lines.append('  "faces": [')
    lines.append(",\n".join("    " + json.dumps(f.tolist()) for f in mesh.faces))
    lines.append("  ],")
    lines.append('  "cells": [')
    lines.append(",\n".join("    " + json.dumps(c) for c in mesh.signed_cells()))
    lines.append("  ]")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_mesh(path):
    """Read a mesh file and validate it.

    Raises
    ------
    MalformedFileError
        The document is not valid JSON or lacks a required array.
    TopologyError
        A cell is not closed or its faces are inconsistently oriented.
    PlanarityError
        A face loop deviates from its plane by more than the tolerance.
    """
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if exc.lineno - 1 < len(text.splitlines()) else ""
        raise MalformedFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}: {line.strip()!r}") from exc
    if not isinstance(doc, dict):
        raise MalformedFileError(f"{path}: top level must be an object")
    for key in ("vertices", "faces", "cells"):
        if key not in doc:
            raise MalformedFileError(f"{path}: missing array {key!r}")
    try:
        vertices = np.array(doc["vertices"], dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise ValueError("vertices must be a list of [x, y, z] triples")
        mesh = PolyMesh.from_signed_cells(vertices, doc["faces"], doc["cells"])
    except (TypeError, ValueError) as exc:
        raise MalformedFileError(f"{path}: {exc}") from exc

    report = validate_mesh(mesh)
    # an open cell also orphans faces; name the cell first
    for wanted in ("index", "closure", "euler", "face-reference"):
        for kind, msg in report.violations:
            if kind == wanted:
                raise TopologyError(msg)
    for kind, msg in report.violations:
        if kind == "planarity":
            raise PlanarityError(msg)
    if report.violations:
        raise MeshError("; ".join(msg for _, msg in report.violations))
    return mesh


# ---------------------------------------------------------------------------
# geometry


@dataclass(frozen=True, eq=False)
class GeometryCache:
    """Measures, diameters, centroids and frames of every mesh entity."""

    edge_length: np.ndarray
    edge_tangent: np.ndarray
    edge_center: np.ndarray
    face_area: np.ndarray
    face_normal: np.ndarray
    face_centroid: np.ndarray
    face_diameter: np.ndarray
    face_frame: np.ndarray  # (nf, 2, 3) orthonormal in-plane axes, e1 x e2 = n
    cell_volume: np.ndarray
    cell_centroid: np.ndarray
    cell_diameter: np.ndarray
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def edge_diameter(self):
        return self.edge_length

    @property
    def h(self):
        """Mesh size: the largest cell diameter."""
        return float(self.cell_diameter.max())


def _face_geometry(pts):
    p = pts.mean(axis=0)
    q = pts - p
    cr = np.cross(q, np.roll(q, -1, axis=0))
    area_vec = 0.5 * cr.sum(axis=0)
    area = np.linalg.norm(area_vec)
    if area <= MEASURE_TOL * max(1.0, np.ptp(pts, axis=0).max() ** 2):
        return area, None, None
    n = area_vec / area
    tri_area = 0.5 * cr @ n
    tri_cent = (p + pts + np.roll(pts, -1, axis=0)) / 3.0
    centroid = tri_area @ tri_cent / tri_area.sum()
    return area, n, centroid


def compute_geometry(mesh):
    """Return the :class:`GeometryCache` of ``mesh``.

    Raises
    ------
    GeometryError
        An edge, face or cell has (numerically) zero or negative measure.
    """
    X = mesh.vertices
    e = mesh.edges
    d = X[e[:, 1]] - X[e[:, 0]]
    length = np.linalg.norm(d, axis=1)
    if np.any(length <= MEASURE_TOL):
        raise GeometryError(f"zero-length edge {int(np.argmin(length))}")
    tangent = d / length[:, None]

    nf = mesh.n_faces
    area = np.empty(nf)
    normal = np.empty((nf, 3))
    fcent = np.empty((nf, 3))
    fdiam = np.empty(nf)
    frame = np.empty((nf, 2, 3))
    for f, loop in enumerate(mesh.faces):
        pts = X[loop]
        a, n, c = _face_geometry(pts)
        if n is None:
            raise GeometryError(f"face {f} has zero area")
        area[f], normal[f], fcent[f] = a, n, c
        fdiam[f] = pdist(pts).max()
        e1 = pts[1] - pts[0]
        e1 -= (e1 @ n) * n
        e1 /= np.linalg.norm(e1)
        frame[f, 0] = e1
        frame[f, 1] = np.cross(n, e1)

    nc = mesh.n_cells
    vol = np.empty(nc)
    ccent = np.empty((nc, 3))
    cdiam = np.empty(nc)
    for K, (fs, ss) in enumerate(zip(mesh.cell_faces, mesh.cell_signs)):
        verts = mesh.cell_vertices[K]
        p = X[verts].mean(axis=0)
        v_tot, m_tot = 0.0, np.zeros(3)
        for f, s in zip(fs, ss):
            pts = X[mesh.faces[f]]
            a = fcent[f] - p
            b = pts - p
            c = np.roll(pts, -1, axis=0) - p
            tv = s * np.einsum("j,ij->i", a, np.cross(b, c)) / 6.0
            v_tot += tv.sum()
            m_tot += tv @ ((p + fcent[f] + pts + np.roll(pts, -1, axis=0)) / 4.0)
        if v_tot <= MEASURE_TOL * max(1.0, np.ptp(X[verts], axis=0).max() ** 3):
            raise GeometryError(f"cell {K} has non-positive volume {v_tot:g}")
        vol[K] = v_tot
        ccent[K] = m_tot / v_tot
        cdiam[K] = pdist(X[verts]).max()

    return GeometryCache(length, tangent, 0.5 * (X[e[:, 0]] + X[e[:, 1]]),
                         area, normal, fcent, fdiam, frame, vol, ccent, cdiam)


# ---------------------------------------------------------------------------
# validation


@dataclass
class MeshReport:
    """Outcome of :func:`validate_mesh`. ``violations`` holds (kind, message)."""

    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    ratios: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        out = [f"violations: {len(self.violations)}"]
        out += [f"  [{k}] {m}" for k, m in self.violations]
        out.append(f"warnings: {len(self.warnings)}")
        out += [f"  {w}" for w in self.warnings]
        out += [f"{k}: {v:.6g}" for k, v in self.ratios.items()]
        return "\n".join(out)


def _solid_angle(a, b, c):
    # van Oosterom & Strackee; a, b, c are (n, 3) arrays relative to the eye point
    la, lb, lc = (np.linalg.norm(v, axis=1) for v in (a, b, c))
    num = np.einsum("ij,ij->i", a, np.cross(b, c))
    den = (la * lb * lc + np.einsum("ij,ij->i", a, b) * lc
           + np.einsum("ij,ij->i", a, c) * lb + np.einsum("ij,ij->i", b, c) * la)
    return 2.0 * np.arctan2(num, den)


def point_in_cell(mesh, K, point):
    """Winding-number test: is ``point`` inside cell ``K``?"""
    X = mesh.vertices
    total = 0.0
    for f, s in zip(mesh.cell_faces[K], mesh.cell_signs[K]):
        loop = mesh.faces[f]
        pts = X[loop] - point
        a = np.repeat(pts[:1], len(loop) - 2, axis=0)
        total += s * _solid_angle(a, pts[1:-1], pts[2:]).sum()
    return abs(total / (4 * np.pi)) > 0.5


def _point_in_polygon(pts2, q):
    # pts2: (n, 2) polygon, q: (2,) point; crossing-number test
    inside = False
    x, y = q
    for (x0, y0), (x1, y1) in zip(pts2, np.roll(pts2, -1, axis=0)):
        if (y0 > y) != (y1 > y):
            xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if xc > x:
                inside = not inside
    return inside


def validate_mesh(mesh):
    """Check the mesh invariants and report regularity indicators.

    Never raises; every problem found is listed in the returned report.
    """
    rep = MeshReport()
    X = mesh.vertices
    nv = mesh.n_vertices

    for f, loop in enumerate(mesh.faces):
        if len(loop) < 3:
            rep.violations.append(("loop", f"face {f} has fewer than 3 vertices"))
        if len(set(loop.tolist())) != len(loop):
            rep.violations.append(("loop", f"face {f} repeats a vertex index"))
        if loop.size and (loop.min() < 0 or loop.max() >= nv):
            rep.violations.append(("index", f"face {f} references a missing vertex"))
    for K, fs in enumerate(mesh.cell_faces):
        if fs.size and (fs.min() < 0 or fs.max() >= mesh.n_faces):
            rep.violations.append(("index", f"cell {K} references a missing face"))
    if rep.violations:
        return rep

    for f, refs in enumerate(mesh.face_cells):
        if len(refs) == 0:
            rep.violations.append(("face-reference", f"face {f} belongs to no cell"))
        elif len(refs) > 2:
            rep.violations.append(("face-reference", f"face {f} is shared by {len(refs)} cells"))
        elif len(refs) == 2 and refs[0][1] == refs[1][1]:
            rep.violations.append(("face-reference",
                                   f"face {f} has the same orientation in cells {refs[0][0]} and {refs[1][0]}"))

    for K, (fs, ss) in enumerate(zip(mesh.cell_faces, mesh.cell_signs)):
        directed = Counter()
        for f, s in zip(fs, ss):
            loop = mesh.faces[f] if s > 0 else mesh.faces[f][::-1]
            for a, b in zip(loop, np.roll(loop, -1)):
                directed[int(a), int(b)] += 1
        bad = [e for e, c in directed.items() if c != 1 or directed.get(e[::-1], 0) != 1]
        if bad:
            rep.violations.append(("closure", f"cell {K} is not a closed oriented surface "
                                              f"(edge {bad[0]} unmatched)"))
            continue
        V = len(mesh.cell_vertices[K])
        E = len(mesh.cell_edges[K])
        F = len(fs)
        if V - E + F != 2:
            rep.violations.append(("euler", f"cell {K}: V - E + F = {V - E + F} != 2"))
    if rep.violations:
        return rep

    for f, loop in enumerate(mesh.faces):
        pts = X[loop]
        a, n, c = _face_geometry(pts)
        if n is None:
            rep.violations.append(("measure", f"face {f} has zero area"))
            continue
        hf = pdist(pts).max()
        dev = np.abs((pts - c) @ n).max()
        if dev > PLANARITY_TOL * hf:
            rep.violations.append(("planarity", f"face {f} deviates {dev:.3e} from its plane"))
    if rep.violations:
        return rep

    try:
        geom = compute_geometry(mesh)
    except GeometryError as exc:
        rep.violations.append(("measure", str(exc)))
        return rep

    # centroid star-shapedness (heuristic stand-in for the ball conditions)
    for f, loop in enumerate(mesh.faces):
        pts = X[loop]
        c = geom.face_centroid[f]
        n = geom.face_normal[f]
        tri = np.cross(pts - c, np.roll(pts, -1, axis=0) - c) @ n
        pts2 = (pts - c) @ geom.face_frame[f].T
        if not _point_in_polygon(pts2, np.zeros(2)):
            rep.warnings.append(f"face {f}: centroid lies outside the face")
        elif np.any(tri <= 0):
            rep.warnings.append(f"face {f}: not star-shaped with respect to its centroid")
    for K in range(mesh.n_cells):
        c = geom.cell_centroid[K]
        if not point_in_cell(mesh, K, c):
            rep.warnings.append(f"cell {K}: centroid lies outside the cell")
            continue
        for f, s in zip(mesh.cell_faces[K], mesh.cell_signs[K]):
            pts = X[mesh.faces[f]]
            tv = s * np.einsum("j,ij->i", geom.face_centroid[f] - c,
                               np.cross(pts - c, np.roll(pts, -1, axis=0) - c))
            if np.any(tv <= 0):
                rep.warnings.append(f"cell {K}: not star-shaped with respect to its centroid")
                break

    ef, fk = [], []
    for f, ids in enumerate(mesh.face_edges):
        ef.extend(geom.edge_length[ids] / geom.face_diameter[f])
    for K, fs in enumerate(mesh.cell_faces):
        fk.extend(geom.face_diameter[fs] / geom.cell_diameter[K])
    rep.ratios = {"min h_e/h_f": min(ef), "max h_e/h_f": max(ef),
                  "min h_f/h_K": min(fk), "max h_f/h_K": max(fk)}
    return rep


# ---------------------------------------------------------------------------
# per-cell view


@dataclass(frozen=True, eq=False)
class LocalCell:
    """Everything the element routines need about one cell, in local numbering.

    Local vertices, edges and faces are the cell's entities in ascending global
    order. Face loops and face edges are stored as local indices in the loop
    order of the global face.
    """

    index: int
    vertices: np.ndarray          # global ids (lv,)
    coords: np.ndarray            # (lv, 3)
    edges: np.ndarray             # global ids (le,)
    edge_vertices: np.ndarray     # local vertex ids (le, 2), global tangent lo -> hi
    edge_length: np.ndarray
    edge_tangent: np.ndarray
    faces: np.ndarray             # global ids (lf,)
    signs: np.ndarray             # orientation of the global face normal, (lf,)
    face_loops: tuple             # local vertex ids per face
    face_edges: tuple             # local edge ids per face, loop order
    face_edge_signs: tuple        # +1 where the loop runs along the edge tangent
    face_area: np.ndarray
    face_normal: np.ndarray       # global normals (lf, 3)
    face_centroid: np.ndarray
    face_diameter: np.ndarray
    face_frame: np.ndarray
    volume: float
    centroid: np.ndarray
    diameter: float
    tets: np.ndarray              # centroid-fan tetrahedra (T, 4, 3)
    face_tris: tuple              # centroid-fan triangles per face
    quad_degree: int = 6          # exactness of the Gram-matrix quadrature
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def nv(self):
        return len(self.vertices)

    @property
    def ne(self):
        return len(self.edges)

    @property
    def nf(self):
        return len(self.faces)


def local_cell(mesh, geom, K, quad_degree=6):
    """Build the :class:`LocalCell` of cell ``K``."""
    order = np.argsort(mesh.cell_faces[K])
    faces = mesh.cell_faces[K][order]
    signs = mesh.cell_signs[K][order]
    verts = mesh.cell_vertices[K]
    edges = mesh.cell_edges[K]
    vloc = {int(g): i for i, g in enumerate(verts)}
    eloc = {int(g): i for i, g in enumerate(edges)}
    ev = np.array([[vloc[int(a)], vloc[int(b)]] for a, b in mesh.edges[edges]], dtype=int)
    return LocalCell(
        index=K,
        vertices=verts,
        coords=mesh.vertices[verts],
        edges=edges,
        edge_vertices=ev,
        edge_length=geom.edge_length[edges],
        edge_tangent=geom.edge_tangent[edges],
        faces=faces,
        signs=signs,
        face_loops=tuple(np.array([vloc[int(v)] for v in mesh.faces[f]]) for f in faces),
        face_edges=tuple(np.array([eloc[int(e)] for e in mesh.face_edges[f]]) for f in faces),
        face_edge_signs=tuple(mesh.face_edge_signs[f] for f in faces),
        face_area=geom.face_area[faces],
        face_normal=geom.face_normal[faces],
        face_centroid=geom.face_centroid[faces],
        face_diameter=geom.face_diameter[faces],
        face_frame=geom.face_frame[faces],
        volume=float(geom.cell_volume[K]),
        centroid=geom.cell_centroid[K],
        diameter=float(geom.cell_diameter[K]),
        tets=decompose(mesh, geom, "cell", K),
        face_tris=tuple(decompose(mesh, geom, "face", f) for f in faces),
        quad_degree=int(quad_degree),
    )
