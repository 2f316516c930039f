"""Exactness and commutativity of the discrete complex on a few meshes."""

from pathlib import Path

from qdvem.complex import verify_complex
from qdvem.manufactured import build_benchmark
from qdvem.mesh import distorted_cube_mesh, generate_cube_mesh, load_mesh
from qdvem.polyfield import PolyVector, coordinate

x, y, z = (coordinate(i) for i in range(3))
bm = build_benchmark()
samples = [("grad_r2", (x * x + y * y + z * z).grad()), ("x2", PolyVector(x * x, 0, 0)), ("u", bm.u)]

meshes = {"cube n=2": generate_cube_mesh(2), "cube n=3": generate_cube_mesh(3),
          "distorted n=3": distorted_cube_mesh(3, seed=1)}
data = Path(__file__).resolve().parents[1] / "tests" / "data" / "distorted_hex_n2.json"
if data.exists():
    meshes["file " + data.name] = load_mesh(data)

for name, mesh in meshes.items():
    print(f"== {name}")
    print(verify_complex(mesh, samples).text())
    print()
