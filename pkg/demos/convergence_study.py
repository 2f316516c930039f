"""Convergence of the discrete error norm on cube and distorted meshes.

Usage: python demos/convergence_study.py [max_n]

The default stops at n = 8 (well under a minute); pass 16 to reproduce the
full study (a few minutes).
"""

import sys

from qdvem import bench
from qdvem.mesh import distorted_cube_mesh, save_mesh

max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 8
ns = [n for n in (2, 4, 8, 16) if n <= max_n]

cfg = bench.RunConfig(meshes=[f"cube:{n}" for n in ns], diagnostics=True, timing=True)
rows, summary = bench.run_convergence(cfg, log=print)
print(summary)

# the same study on triangulated meshes with moved interior vertices
paths = []
for n in ns:
    path = f"/tmp/distorted_{n}.json"
    save_mesh(distorted_cube_mesh(n, seed=n), path)
    paths.append(path)
rows, summary = bench.run_convergence(bench.RunConfig(meshes=paths, diagnostics=True), log=print)
print(summary)
