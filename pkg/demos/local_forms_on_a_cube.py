"""Local matrices of the lowest-order spaces on the unit cube.

Walks through the worked examples: the face projection of a vertex hat, the
L2 projection of the member (x^2, 0, 0) and its grad-div energy.
"""

import numpy as np

from qdvem.graddiv_vem import interpolate_v, local_a, local_b, v_pi0
from qdvem.mesh import compute_geometry, generate_cube_mesh, local_cell
from qdvem.polyfield import PolyVector, coordinate
from qdvem.scalar_vem import _face_local_coords, face_pi_nabla, product_n

np.set_printoptions(precision=4, suppress=True)

mesh = generate_cube_mesh(1)
geom = compute_geometry(mesh)
lc = local_cell(mesh, geom, 0)

# face projection of the hat at the origin on the bottom face
j = [j for j in range(lc.nf) if np.allclose(lc.coords[lc.face_loops[j], 2], 0)][0]
loop = lc.face_loops[j]
hat = np.all(lc.coords[loop] == 0, axis=1).astype(float)
coef = face_pi_nabla(lc, j, hat)
print("face projection at the corners:", coef[0] + _face_local_coords(lc, j) @ coef[1:])
print("expected 3/4 - x/2 - y/2:      ", 0.75 - lc.coords[loop, 0] / 2 - lc.coords[loop, 1] / 2)

ev = np.linalg.eigvalsh(product_n(lc))
print("product_n eigenvalues:", ev)

x = coordinate(0)
v = PolyVector(x * x, 0, 0)
dofs = interpolate_v(mesh, geom, v, v.div())
print("DOFs of (x^2, 0, 0):", dofs)
print("Pi0 of (x^2, 0, 0):", v_pi0(lc, dofs), "(expected [1/3, 0, 0])")
print("a_h(v, v) =", dofs @ local_a(lc) @ dofs, "(expected 4)")
print("min eigenvalue of local_b:", np.linalg.eigvalsh(local_b(lc))[0])
