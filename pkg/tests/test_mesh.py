import json

import numpy as np
import pytest

from conftest import DISTORTED_MESH, cell_mesh
from qdvem.errors import GeometryError, MalformedFileError, PlanarityError, TopologyError
from qdvem.mesh import (PolyMesh, compute_geometry, distorted_cube_mesh, generate_cube_mesh,
                        load_mesh, save_mesh, single_cell_mesh, validate_mesh)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cube_census(n):
    m = generate_cube_mesh(n)
    assert m.n_vertices == (n + 1) ** 3
    assert m.n_edges == 3 * n * (n + 1) ** 2
    assert m.n_faces == 3 * n * n * (n + 1)
    assert m.n_cells == n ** 3


def test_cube_rejects_zero():
    with pytest.raises(ValueError):
        generate_cube_mesh(0)


def test_cube_euler_per_cell():
    m = generate_cube_mesh(3)
    for K in range(m.n_cells):
        V, E, F = len(m.cell_vertices[K]), len(m.cell_edges[K]), len(m.cell_faces[K])
        assert (V, E, F) == (8, 12, 6)


def test_unit_cube_geometry():
    m = generate_cube_mesh(1)
    g = compute_geometry(m)
    assert g.cell_volume[0] == pytest.approx(1.0, abs=1e-15)
    assert g.cell_diameter[0] == pytest.approx(np.sqrt(3.0))
    np.testing.assert_allclose(g.cell_centroid[0], 0.5, atol=1e-15)
    np.testing.assert_allclose(g.face_area, 1.0, atol=1e-15)
    bottom = [f for f in range(m.n_faces) if np.allclose(m.vertices[m.faces[f], 2], 0)][0]
    assert abs(abs(g.face_normal[bottom, 2]) - 1.0) < 1e-15
    e = [i for i, (a, b) in enumerate(m.edges)
         if np.allclose(m.vertices[[a, b]], [[0, 0, 0], [1, 0, 0]])][0]
    np.testing.assert_allclose(g.edge_tangent[e], [1, 0, 0])
    assert g.edge_length[e] == pytest.approx(1.0)


def test_edge_tangent_runs_low_to_high():
    m = generate_cube_mesh(2)
    g = compute_geometry(m)
    a, b = m.edges[:, 0], m.edges[:, 1]
    assert np.all(a < b)
    d = m.vertices[b] - m.vertices[a]
    np.testing.assert_allclose(g.edge_tangent, d / np.linalg.norm(d, axis=1)[:, None])


@pytest.mark.parametrize("mesh", [generate_cube_mesh(3), distorted_cube_mesh(3, seed=4)],
                         ids=["cube", "distorted"])
def test_closure_and_volume(mesh):
    g = compute_geometry(mesh)
    for K in range(mesh.n_cells):
        fs, ss = mesh.cell_faces[K], mesh.cell_signs[K]
        vec = (ss * g.face_area[fs]) @ g.face_normal[fs]
        assert np.abs(vec).max() <= 1e-12 * g.cell_diameter[K] ** 2
    assert g.cell_volume.sum() == pytest.approx(1.0, rel=1e-12)


def test_interior_edges_shared_by_at_least_three_faces():
    m = generate_cube_mesh(2)
    count = np.zeros(m.n_edges, int)
    for ids in m.face_edges:
        count[ids] += 1
    assert np.all(count[~m.boundary_edges] >= 3)


def test_face_references():
    m = generate_cube_mesh(3)
    for f, refs in enumerate(m.face_cells):
        if m.boundary_faces[f]:
            assert len(refs) == 1
        else:
            assert len(refs) == 2 and refs[0][1] == -refs[1][1]


def test_validate_cube_ratios():
    rep = validate_mesh(generate_cube_mesh(4))
    assert rep.ok and not rep.warnings
    assert rep.ratios["min h_e/h_f"] == pytest.approx(rep.ratios["max h_e/h_f"])
    assert rep.ratios["min h_f/h_K"] == pytest.approx(rep.ratios["max h_f/h_K"])


def test_validate_reports_repeated_vertex():
    m = generate_cube_mesh(1)
    faces = [f.tolist() for f in m.faces]
    faces[0] = [faces[0][0], faces[0][1], faces[0][1], faces[0][3]]
    bad = PolyMesh(m.vertices, faces, m.cell_faces, m.cell_signs)
    rep = validate_mesh(bad)
    assert not rep.ok
    assert any(kind == "loop" for kind, _ in rep.violations)


def _l_shaped_cell():
    # L-shaped prism: the centroid of this L sits in the notch
    P = np.array([[0, 0], [3, 0], [3, 0.4], [0.4, 0.4], [0.4, 3], [0, 3]], float)
    n = len(P)
    X = np.vstack([np.column_stack([P, np.zeros(n)]), np.column_stack([P, np.ones(n)])])
    faces = [list(range(n))[::-1], list(range(n, 2 * n))]
    faces += [[i, (i + 1) % n, n + (i + 1) % n, n + i] for i in range(n)]
    return single_cell_mesh(X, faces)


def test_l_shaped_cell_warns_star_shape():
    m = _l_shaped_cell()
    g = compute_geometry(m)
    assert g.cell_volume[0] == pytest.approx(2 * 3 * 0.4 - 0.16)
    rep = validate_mesh(m)
    assert rep.ok
    assert any("cell 0" in w for w in rep.warnings)
    assert any("centroid lies outside" in w for w in rep.warnings)


def test_round_trip(tmp_path):
    m = generate_cube_mesh(2)
    path = tmp_path / "cube2.json"
    save_mesh(m, path)
    m2 = load_mesh(path)
    np.testing.assert_array_equal(m2.vertices, m.vertices)
    assert [f.tolist() for f in m2.faces] == [f.tolist() for f in m.faces]
    assert m2.signed_cells() == m.signed_cells()


def test_file_cells_are_signed_one_based(tmp_path):
    path = tmp_path / "c.json"
    save_mesh(generate_cube_mesh(1), path)
    doc = json.loads(path.read_text())
    flat = [abs(i) for c in doc["cells"] for i in c]
    assert min(flat) == 1 and max(flat) == 6


def test_missing_face_is_topology_error(tmp_path):
    path = tmp_path / "open.json"
    save_mesh(generate_cube_mesh(1), path)
    doc = json.loads(path.read_text())
    doc["cells"][0] = doc["cells"][0][:-1]
    path.write_text(json.dumps(doc))
    with pytest.raises(TopologyError, match="cell 0"):
        load_mesh(path)


def test_nonplanar_face_is_planarity_error(tmp_path):
    m = generate_cube_mesh(1)
    X = m.vertices.copy()
    X[7, 2] += 1e-3
    path = tmp_path / "bent.json"
    save_mesh(PolyMesh(X, m.faces, m.cell_faces, m.cell_signs), path)
    with pytest.raises(PlanarityError):
        load_mesh(path)


def test_parse_error_has_line_context(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "vertices": [[0, 0, 0],\n  oops\n}\n')
    with pytest.raises(MalformedFileError, match=r":3:"):
        load_mesh(path)


def test_missing_array_is_malformed(tmp_path):
    path = tmp_path / "short.json"
    path.write_text('{"vertices": [], "faces": []}')
    with pytest.raises(MalformedFileError, match="cells"):
        load_mesh(path)


def test_zero_area_face_is_geometry_error():
    X = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 0, 1]], float)
    m = single_cell_mesh(X, [[0, 1, 2], [0, 3, 1], [1, 3, 2], [2, 3, 0]])
    with pytest.raises(GeometryError):
        compute_geometry(m)


def test_distorted_file_mesh_loads():
    m = load_mesh(DISTORTED_MESH)
    rep = validate_mesh(m)
    assert rep.ok
    assert m.n_cells == 8 and m.n_faces == 72
    assert not np.allclose(m.vertices[~m.boundary_vertices], 0.5)


@pytest.mark.parametrize("kind", ["affine", "distorted", "prism", "octa"])
def test_single_cells_validate(kind):
    rep = validate_mesh(cell_mesh(kind))
    assert rep.ok and not rep.warnings
