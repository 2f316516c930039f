"""Convergence studies and verification runs over mesh sequences."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .assembly import (DEFAULT_TOL, DIAGNOSTIC_DEGREE, assemble_local_forms, assemble_system,
                       discrete_norms, error_div_diagnostics, error_norm_h, solve_system)
from .complex import RANK_SIZE_CAP, build_complex_maps, verify_complex
from .edge_vem import edge_dofs_of_constant, product_e, sigma_pi0
from .errors import VEMError
from .graddiv_vem import local_a, local_b, local_dofs_of_constant, v_pi0
from .manufactured import build_benchmark
from .mesh import compute_geometry, generate_cube_mesh, load_mesh, local_cell, validate_mesh
from .polyfield import PolyVector, coordinate
from .polytope import ANALYTIC_DEGREE, ASSEMBLY_DEGREE
from .scalar_vem import cell_pi0, cell_pi_nabla, product_n

__all__ = [
    "RunConfig",
    "ConvergenceRow",
    "load_config",
    "resolve_mesh",
    "run_convergence",
    "run_verify",
    "rows_to_csv",
    "rows_to_gnuplot",
    "observed_rate",
]


@dataclass
class RunConfig:
    """Settings shared by every command.

    ``meshes`` holds ``"cube:N"`` entries or mesh file paths.
    """

    meshes: list = field(default_factory=list)
    quad_assembly: int = ASSEMBLY_DEGREE
    quad_analytic: int = ANALYTIC_DEGREE
    quad_diagnostic: int = DIAGNOSTIC_DEGREE
    tol: float = DEFAULT_TOL
    out: str | None = None
    diagnostics: bool = False
    verify_complex: bool = False
    timing: bool = False

    def validate(self):
        if not self.meshes:
            raise ValueError("at least one mesh is required")
        if not self.tol > 0:
            raise ValueError("the solver tolerance must be positive")
        for name in ("quad_assembly", "quad_analytic", "quad_diagnostic"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        return self


_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def load_config(path, base=None):
    """Read ``key = value`` lines; ``#`` starts a comment.

    ``meshes`` (alias ``mesh``) takes a comma-separated list and accumulates.
    """
    cfg = RunConfig() if base is None else replace(base, meshes=list(base.meshes))
    names = {f.name: f for f in fields(RunConfig)}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key in ("mesh", "meshes", "cube"):
            items = [v.strip() for v in value.split(",") if v.strip()]
            cfg.meshes.extend(f"cube:{v}" if key == "cube" else v for v in items)
        elif key in names:
            cur = getattr(cfg, key)
            if isinstance(cur, bool):
                if value.lower() not in _BOOL:
                    raise ValueError(f"{path}:{lineno}: {key} expects a boolean")
                setattr(cfg, key, _BOOL[value.lower()])
            elif key == "tol":
                setattr(cfg, key, float(value))
            elif key == "out":
                setattr(cfg, key, value or None)
            else:
                setattr(cfg, key, int(value))
        else:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return cfg


def resolve_mesh(spec):
    """``(mesh_id, mesh)`` for ``"cube:N"`` or a file path."""
    spec = str(spec)
    if spec.startswith("cube:"):
        n = int(spec.split(":", 1)[1])
        return spec, generate_cube_mesh(n)
    return Path(spec).stem, load_mesh(spec)


@dataclass
class ConvergenceRow:
    mesh_id: str
    h: float
    n_u: int
    n_phi: int
    n_p: int
    err_h: float | None = None
    rate_h: float | None = None
    div_l2: float | None = None
    rate_div_l2: float | None = None
    div_h1: float | None = None
    rate_div_h1: float | None = None
    phi_norm: float | None = None
    p_norm: float | None = None
    solve_residual: float | None = None
    wall_time: float | None = None
    u_norm: float | None = None
    status: str = "ok"

    @property
    def ok(self):
        return self.status == "ok"


CSV_COLUMNS = ["mesh_id", "h", "n_u", "n_phi", "n_p", "err_h", "rate_h", "div_l2", "rate_div_l2",
               "div_h1", "rate_div_h1", "phi_norm", "p_norm", "solve_residual", "wall_time", "status"]


def observed_rate(e_prev, e_cur, h_prev, h_cur):
    """``log(e_prev / e_cur) / log(h_prev / h_cur)``, or ``None`` if undefined."""
    vals = (e_prev, e_cur, h_prev, h_cur)
    if any(v is None for v in vals) or min(vals) <= 0 or h_prev == h_cur:
        return None
    return math.log(e_prev / e_cur) / math.log(h_prev / h_cur)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def rows_to_gnuplot(rows):
    lines = ["# h err_h"]
    lines += [f"{r.h:.12g} {r.err_h:.12g}" for r in rows if r.ok and r.err_h is not None]
    return "\n".join(lines) + "\n"


def _solve_one(mesh_id, mesh, cfg, bm):
    t0 = time.perf_counter()
    geom = compute_geometry(mesh)
    maps = build_complex_maps(mesh, geom)
    num = maps.numbering
    row = ConvergenceRow(mesh_id, float(geom.cell_diameter.max()), num.n_u, num.n_phi, num.n_p)
    try:
        forms = assemble_local_forms(mesh, geom, cfg.quad_assembly)
        system = assemble_system(mesh, bm.j, geom, min(bm.j.degree, cfg.quad_analytic), forms, maps)
        sol = solve_system(system, cfg.tol)
    except VEMError as exc:
        row.status = f"failed: {exc}"
        return row
    row.solve_residual = sol.residual
    row.u_norm, row.phi_norm, row.p_norm = discrete_norms(system, sol, mesh, geom)
    row.err_h = error_norm_h(mesh, bm.u, bm.div_u, sol.u, geom, forms.Mb,
                             min(bm.u.degree, cfg.quad_analytic))
    if cfg.diagnostics:
        row.div_l2, row.div_h1 = error_div_diagnostics(mesh, bm.div_u, bm.grad_div_u, sol.u, geom,
                                                       forms, cfg.quad_diagnostic)
    if cfg.timing:
        row.wall_time = time.perf_counter() - t0
    return row


def run_convergence(config, log=None):
    """Solve the manufactured problem on every mesh and tabulate the errors.

    Returns
    -------
    rows : list of ConvergenceRow
    summary : str
        CSV text, followed by the complex report when requested.
    """
    cfg = config.validate()
    bm = build_benchmark()
    rows = []
    reports = []
    for spec in cfg.meshes:
        mesh_id, mesh = resolve_mesh(spec)
        row = _solve_one(mesh_id, mesh, cfg, bm)
        prev = rows[-1] if rows else None
        if prev is not None and prev.ok and row.ok:
            row.rate_h = observed_rate(prev.err_h, row.err_h, prev.h, row.h)
            row.rate_div_l2 = observed_rate(prev.div_l2, row.div_l2, prev.h, row.h)
            row.rate_div_h1 = observed_rate(prev.div_h1, row.div_h1, prev.h, row.h)
        rows.append(row)
        if log is not None:
            log(f"{mesh_id}: {row.status}, err_h={_fmt(row.err_h)}")
        if cfg.verify_complex:
            rep = verify_complex(mesh, [("u", bm.u)], degree=cfg.quad_analytic)
            reports.append(f"[{mesh_id}]\n{rep.key_values()}")
    text = rows_to_csv(rows)
    if cfg.out:
        out = Path(cfg.out)
        out.write_text(text)
        out.with_suffix(".dat").write_text(rows_to_gnuplot(rows))
        if reports:
            out.with_suffix(".complex.txt").write_text("\n".join(reports) + "\n")
    summary = text + ("\n" + "\n".join(reports) + "\n" if reports else "")
    return rows, summary


def _cell_checks(mesh, geom, quad_degree):
    """Worst-case per-cell spot checks of the local forms."""
    worst = {"reproduction": 0.0, "min_eig_local_b": np.inf, "min_eig_local_ab": np.inf,
             "min_eig_product_e": np.inf, "product_n_kernel_ok": True}
    rng = np.random.default_rng(0)
    c = rng.normal(size=3)
    for K in range(mesh.n_cells):
        lc = local_cell(mesh, geom, K, quad_degree)
        # linear scalar and constant vector reproduction
        a = rng.normal(size=4)
        lin = lambda x: a[0] + (x - lc.centroid) @ a[1:]
        dofs = np.concatenate([lin(lc.coords), [a[0]]])
        want = np.concatenate([[a[0]], a[1:] * lc.diameter])
        err = max(np.abs(cell_pi_nabla(lc, dofs) - want).max(), np.abs(cell_pi0(lc, dofs) - want).max(),
                  np.abs(sigma_pi0(lc, edge_dofs_of_constant(lc, c)) - c).max(),
                  np.abs(v_pi0(lc, local_dofs_of_constant(lc, c)) - c).max())
        worst["reproduction"] = max(worst["reproduction"], float(err))
        B, A = local_b(lc), local_a(lc)
        worst["min_eig_local_b"] = min(worst["min_eig_local_b"], float(np.linalg.eigvalsh(B)[0]))
        worst["min_eig_local_ab"] = min(worst["min_eig_local_ab"], float(np.linalg.eigvalsh(A + B)[0]))
        worst["min_eig_product_e"] = min(worst["min_eig_product_e"],
                                         float(np.linalg.eigvalsh(product_e(lc))[0]))
        ev = np.linalg.eigvalsh(product_n(lc))
        worst["product_n_kernel_ok"] &= bool(np.sum(ev < 1e-10 * ev[-1]) == 1)
    return worst


def run_verify(config, size_cap=RANK_SIZE_CAP):
    """Complex report plus local spot checks for every configured mesh.

    Returns
    -------
    ok : bool
    text : str
    """
    cfg = config.validate()
    bm = build_benchmark()
    x, y, z = (coordinate(i) for i in range(3))
    samples = [("grad_r2", (x * x + y * y + z * z).grad()), ("x2", PolyVector(x * x, 0, 0)), ("u", bm.u)]
    ok = True
    parts = []
    for spec in cfg.meshes:
        mesh_id, mesh = resolve_mesh(spec)
        geom = compute_geometry(mesh)
        rep = verify_complex(mesh, samples, geom, degree=cfg.quad_analytic, size_cap=size_cap)
        v = rep.values
        checks = _cell_checks(mesh, geom, cfg.quad_assembly)
        mesh_ok = (v["max_CG"] <= 1e-13 and v["max_DC"] <= 1e-13
                   and v.get("exact", True) and v.get("image_mean", 0.0) <= 1e-11
                   and all(val <= 1e-11 for k, val in v.items() if k.startswith("commute["))
                   and checks["reproduction"] <= 1e-12 and checks["min_eig_local_b"] > 0
                   and checks["min_eig_local_ab"] > 0 and checks["min_eig_product_e"] > 0
                   and checks["product_n_kernel_ok"])
        ok &= bool(mesh_ok)
        lines = [f"== {mesh_id}: {'PASS' if mesh_ok else 'FAIL'}", rep.text()]
        lines += [f"{k} = {val:.3e}" if isinstance(val, float) else f"{k} = {val}"
                  for k, val in checks.items()]
        parts.append("\n".join(lines))
    text = "\n\n".join(parts) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    return ok, text


def mesh_info(spec):
    """Census, validation report and regularity ratios of one mesh."""
    mesh_id, mesh = resolve_mesh(spec)
    rep = validate_mesh(mesh)
    lines = [f"mesh {mesh_id}: vertices={mesh.n_vertices} edges={mesh.n_edges} "
             f"faces={mesh.n_faces} cells={mesh.n_cells}"]
    lines += [f"violation[{kind}]: {msg}" for kind, msg in rep.violations]
    lines += [f"warning: {w}" for w in rep.warnings]
    lines += [f"{k} = {v:.6g}" for k, v in rep.ratios.items()]
    if not rep.violations:
        geom = compute_geometry(mesh)
        lines.append(f"h = {geom.cell_diameter.max():.6g}")
        num = build_complex_maps(mesh, geom).numbering
        lines.append(f"interior dofs: n_u={num.n_u} n_phi={num.n_phi} n_p={num.n_p}")
    return not rep.violations, "\n".join(lines) + "\n"
