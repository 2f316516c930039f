"""Shared fixtures: single polyhedral cells of several shapes."""

from pathlib import Path

import numpy as np
import pytest

from qdvem.mesh import compute_geometry, generate_cube_mesh, local_cell, single_cell_mesh

DATA = Path(__file__).parent / "data"
DISTORTED_MESH = DATA / "distorted_hex_n2.json"


def _unit_hex():
    m = generate_cube_mesh(1)
    return m.vertices.copy(), [f.tolist() for f in m.faces], m.cell_signs[0].tolist()


def cell_mesh(kind="cube", rng=None, scale=1.0, shift=(0.0, 0.0, 0.0)):
    """One-cell mesh.

    ``kind``: ``"cube"`` (unit cube), ``"affine"`` (random parallelepiped),
    ``"distorted"`` (randomly moved corners, faces split into triangles so
    they stay planar), ``"prism"`` (triangular prism) or ``"octa"``
    (octahedron).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    X, faces, signs = _unit_hex()
    if kind == "affine":
        A = np.eye(3) + 0.3 * rng.uniform(-1, 1, (3, 3))
        X = X @ A.T
    elif kind == "distorted":
        X = X + 0.15 * rng.uniform(-1, 1, X.shape)
        tri, tsign = [], []
        for loop, s in zip(faces, signs):
            a, b, c, d = loop
            tri += [[a, b, c], [a, c, d]]
            tsign += [s, s]
        faces, signs = tri, tsign
    elif kind == "prism":
        X = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [0, 1, 1]], float)
        faces = [[0, 2, 1], [3, 4, 5], [0, 1, 4, 3], [1, 2, 5, 4], [2, 0, 3, 5]]
        signs = [1] * 5
    elif kind == "octa":
        X = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], float)
        faces = [[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]]
        signs = [1] * 8
    elif kind != "cube":
        raise ValueError(kind)
    X = scale * np.asarray(X, float) + np.asarray(shift, float)
    return single_cell_mesh(X, faces, signs)


def make_cell(kind="cube", rng=None, scale=1.0, shift=(0.0, 0.0, 0.0)):
    mesh = cell_mesh(kind, rng, scale, shift)
    return local_cell(mesh, compute_geometry(mesh), 0)


def random_cell_meshes(count, seed=0):
    """One-cell meshes cycling through unit, dilated, affine and distorted hexahedra."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = ["cube", "cube", "affine", "distorted"][i % 4]
        scale = 1.0 if i % 4 == 0 else float(np.exp(rng.uniform(np.log(0.05), np.log(20.0))))
        shift = rng.uniform(-2, 2, 3)
        out.append((kind, cell_mesh(kind, rng, scale, shift)))
    return out


def random_cells(count, seed=0):
    return [local_cell(m, compute_geometry(m), 0) for _, m in random_cell_meshes(count, seed)]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def unit_cube():
    return make_cell("cube")


@pytest.fixture(params=["cube", "affine", "distorted", "prism", "octa"])
def any_cell(request):
    return make_cell(request.param, np.random.default_rng(7), 1.3, (0.2, -0.1, 0.4))
