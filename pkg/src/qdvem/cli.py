"""Command-line driver.

Verbs: ``solve``, ``converge``, ``verify`` and ``mesh-info``. Meshes are given
with ``--cube N`` and ``--mesh PATH`` (both repeatable) or in a ``key = value``
configuration file passed with ``--config``.
"""

from __future__ import annotations

import argparse
import sys

from . import bench
from .errors import VEMError

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


def _parser():
    p = argparse.ArgumentParser(prog="qdvem", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--cube", type=int, action="append", default=[], metavar="N",
                        help="structured cube mesh with N cells per axis (repeatable)")
    common.add_argument("--mesh", action="append", default=[], metavar="PATH",
                        help="mesh file (repeatable)")
    common.add_argument("--quad-assembly", type=int, metavar="D",
                        help="quadrature exactness for local matrices")
    common.add_argument("--quad-analytic", type=int, metavar="D",
                        help="quadrature exactness for the manufactured fields")
    common.add_argument("--quad-diagnostic", type=int, metavar="D",
                        help="quadrature exactness for the projected div diagnostics")
    common.add_argument("--tol", type=float, metavar="T", help="relative residual target")
    common.add_argument("--out", metavar="PATH", help="output file")
    common.add_argument("--diagnostics", action="store_true", default=None,
                        help="compute projected div errors")
    common.add_argument("--verify-complex", action="store_true", default=None,
                        help="append the complex report to convergence runs")
    common.add_argument("--timing", action="store_true", default=None,
                        help="fill the wall_time column (makes output non-deterministic)")
    for verb, text in [("solve", "solve the manufactured problem on each mesh"),
                       ("converge", "convergence study over the mesh sequence"),
                       ("verify", "complex exactness, commutativity and local-form checks"),
                       ("mesh-info", "census and validation report")]:
        sub.add_parser(verb, parents=[common], help=text)
    return p


def _config(args):
    cfg = bench.load_config(args.config) if args.config else bench.RunConfig()
    cfg.meshes = list(cfg.meshes) + [f"cube:{n}" for n in args.cube] + list(args.mesh)
    for name in ("quad_assembly", "quad_analytic", "quad_diagnostic", "tol", "out",
                 "diagnostics", "verify_complex", "timing"):
        val = getattr(args, name)
        if val is not None:
            setattr(cfg, name, val)
    return cfg.validate()


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.verb == "mesh-info":
            ok = True
            for spec in cfg.meshes:
                good, text = bench.mesh_info(spec)
                ok &= good
                sys.stdout.write(text)
            return EXIT_OK if ok else EXIT_FAILED
        if args.verb == "verify":
            ok, text = bench.run_verify(cfg)
            sys.stdout.write(text)
            return EXIT_OK if ok else EXIT_FAILED
        if args.verb == "solve":
            rows, _ = bench.run_convergence(cfg)
            for r in rows:
                sys.stdout.write(
                    f"{r.mesh_id}: status={r.status} n_u={r.n_u} n_phi={r.n_phi} n_p={r.n_p} "
                    f"err_h={bench._fmt(r.err_h)} u_norm={bench._fmt(r.u_norm)} "
                    f"phi_norm={bench._fmt(r.phi_norm)} p_norm={bench._fmt(r.p_norm)} "
                    f"residual={bench._fmt(r.solve_residual)}\n")
            return EXIT_OK if all(r.ok for r in rows) else EXIT_FAILED
        rows, summary = bench.run_convergence(cfg)
        if not cfg.out:
            sys.stdout.write(summary)
        return EXIT_OK if all(r.ok for r in rows) else EXIT_FAILED
    except (VEMError, ValueError, OSError) as exc:
        print(f"qdvem: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
