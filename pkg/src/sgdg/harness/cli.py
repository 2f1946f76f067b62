"""
Command line
------------

::

    sgdg run <config.json> [--threads N] [--out DIR] [--p P] [--flavor cp|ec] [--t-end T] [--cfl C]
    sgdg convergence <case> --p P --meshes 8,16,32,64 --flavor cp|ec [--t-end T]
    sgdg riemann <case> --cells N [--cfl C] [--out DIR]
    sgdg verify

Exit codes: 0 on success, 2 on configuration errors, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from sgdg.errors import ConfigError, SgdgError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _configure_numba(threads: int | None) -> None:
    import numba

    if threads is not None:
        if threads < 1 or threads > numba.config.NUMBA_NUM_THREADS:
            raise ConfigError(
                f"--threads must be in [1, {numba.config.NUMBA_NUM_THREADS}], got {threads}")
        numba.set_num_threads(threads)


def _parse_meshes(text: str) -> list[int]:
    try:
        meshes = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--meshes expects comma-separated integers, got {text!r}") from exc
    if len(meshes) < 1 or min(meshes) < 1:
        raise ConfigError("--meshes needs positive element counts")
    return meshes


# {{{ commands

def cmd_run(args) -> int:
    from sgdg.harness.cases import load_config
    from sgdg.harness.runner import run_case

    cfg = load_config(args.config)
    for key in ("p", "flavor", "cfl", "t_end", "outputs"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    cfg.validate()
    out = Path(args.out) if args.out else Path("out") / cfg.name
    summary = run_case(cfg, out_dir=out)
    print(json.dumps(summary.to_dict(), indent=2))
    return EXIT_OK


def convergence_table(case: str, p: int, meshes, flavor: str, t_end: float | None = None):
    """Run ``case`` on every mesh and return the list of :class:`ErrorReport`."""
    from sgdg.harness.cases import builtin_case
    from sgdg.harness.norms import error_norms
    from sgdg.harness.runner import run_case

    reports = []
    for n in meshes:
        cfg = builtin_case(case, n, p=p, flavor=flavor)
        if t_end is not None:
            cfg.t_end = t_end
            cfg.validate()
        if not cfg.has_reference():
            raise ConfigError(f"case {case!r} has no exact solution for a convergence study")
        summary = run_case(cfg)
        mesh = summary.scheme.mesh
        ref = cfg.reference(mesh.x, summary.t)
        length = np.ptp(mesh.x[..., 0]) if cfg.dim == 2 else np.ptp(mesh.x)
        reports.append(error_norms(summary.u, ref, summary.scheme.mass, h=length / n))
    return reports


def cmd_convergence(args) -> int:
    from sgdg.harness.norms import observed_orders

    meshes = _parse_meshes(args.meshes)
    reports = convergence_table(args.case, args.p, meshes, args.flavor, args.t_end)
    orders = {k: np.concatenate([[np.nan], observed_orders(reports, k)]) for k in ("l1", "l2", "linf")}
    print(f"# {args.case}  p={args.p}  flavor={args.flavor}  density error")
    print(f"{'N':>5s} {'L1':>12s} {'O1':>6s} {'L2':>12s} {'O2':>6s} {'Linf':>12s} {'Oinf':>6s}")
    for k, (n, r) in enumerate(zip(meshes, reports)):
        print(f"{n:5d} {r.l1:12.4e} {orders['l1'][k]:6.2f} {r.l2:12.4e} {orders['l2'][k]:6.2f} "
              f"{r.linf:12.4e} {orders['linf'][k]:6.2f}")
    return EXIT_OK


def cmd_riemann(args) -> int:
    from sgdg.fv1d import make_grid, run_3pt
    from sgdg.harness.cases import builtin_case
    from sgdg.harness.io import write_csv

    cfg = builtin_case(args.case)
    if cfg.dim != 1 or cfg.initial["type"] != "riemann":
        raise ConfigError(f"case {args.case!r} is not a 1D Riemann problem")
    if args.cells < 1:
        raise ConfigError("--cells must be positive")
    a, b = cfg.mesh["a"], cfg.mesh["b"]
    grid = make_grid(a, b, args.cells, lambda x: cfg.to_conserved(cfg.primitive_at(x)))
    grid = run_3pt(grid, cfg.t_end, cfl=args.cfl)
    ref = cfg.reference(grid.x, grid.t)
    err = np.sum(np.abs(grid.u[:, 0] - ref[:, 0])) * grid.h
    print(f"{args.case}: {args.cells} cells, t={grid.t:.6g}, L1 density error {err:.6e}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / f"{args.case}_fv_{args.cells}.csv", grid.x, grid.u,
                  cv=float(cfg.species.cvs[0]))
    return EXIT_OK


def cmd_verify(args) -> int:
    from sgdg.harness.verify import run_checks

    results = run_checks(seed=args.seed)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERICAL

# }}}


def build_parser() -> argparse.ArgumentParser:
    from sgdg.harness.cases import CASE_NAMES

    parser = argparse.ArgumentParser(prog="sgdg", description="DGSEM solver for the SG-gamma model")
    parser.add_argument("--threads", type=int, default=None, help="numba worker threads")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a case from a JSON config")
    r.add_argument("config")
    r.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    r.add_argument("--out", default=None, help="output directory (default out/<case>)")
    r.add_argument("--p", type=int, default=None)
    r.add_argument("--flavor", choices=("cp", "ec"), default=None)
    r.add_argument("--cfl", type=float, default=None)
    r.add_argument("--t-end", dest="t_end", type=float, default=None)
    r.add_argument("--outputs", type=int, default=None)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("convergence", help="error norms and orders under mesh refinement")
    c.add_argument("case", choices=CASE_NAMES)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--meshes", default="8,16,32,64")
    c.add_argument("--flavor", choices=("cp", "ec"), default="cp")
    c.add_argument("--t-end", dest="t_end", type=float, default=None)
    c.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    c.set_defaults(func=cmd_convergence)

    m = sub.add_parser("riemann", help="three-point finite volume run of a 1D case")
    m.add_argument("case", choices=CASE_NAMES)
    m.add_argument("--cells", type=int, default=200)
    m.add_argument("--cfl", type=float, default=0.45)
    m.add_argument("--out", default=None)
    m.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    m.set_defaults(func=cmd_riemann)

    v = sub.add_parser("verify", help="operator, mesh, flux and limiter property checks")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _configure_numba(args.threads)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SgdgError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
