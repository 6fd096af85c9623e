"""Command-line front end: slab-sn fixed|eigen|bench.

Exit status: 0 on success, 2 on input errors (missing/invalid problem file
or flags), 1 on solver failures (including a benchmark with failed cells;
the partial report is still written).
"""

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import outputs
from .analytic import fixed_source_solve
from .bench import BenchCell, run_benchmark
from .eigen import power_iteration
from .exceptions import ParseError, TransportError, ValidationError
from .mesh import SourceField, build_fine_mesh
from .model import gauss_legendre
from .problem_io import load_problem
from .spectral import assemble_A, block_diagonalize
from .sweep import sweep_fixed_source


def _add_common(parser):
    parser.add_argument("input", help="problem file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--sn", type=int, help="override S_N order")
    parser.add_argument("--mesh", type=int, help="override fine mesh size")
    parser.add_argument("--tolerance", type=float, help="override flux tolerance")
    parser.add_argument("--dump-matrices", action="store_true",
                        help="dump A, P, B per material to CSV (analytic only)")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="slab-sn",
        description="Multigroup discrete-ordinates transport in slab geometry")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fixed = sub.add_parser("fixed", help="solve a fixed-source problem")
    _add_common(p_fixed)
    p_fixed.add_argument("--source", choices=("constant", "absx", "file"),
                         default="constant", help="source shape")
    p_fixed.add_argument("--strength", type=float, default=1.0,
                         help="emission density for constant/absx shapes")
    p_fixed.add_argument("--source-file",
                         help="CSV of per-cell, per-group emission densities")
    p_fixed.add_argument("--solver", choices=("analytic", "sweep"),
                         help="override solver kind")

    p_eigen = sub.add_parser("eigen", help="run the power-iteration eigenvalue solve")
    _add_common(p_eigen)
    p_eigen.add_argument("--solver", choices=("analytic", "sweep"),
                         help="override solver kind")
    p_eigen.add_argument("--ke", type=float, help="Wielandt shift (omit for none)")
    p_eigen.add_argument("--no-ke", action="store_true",
                         help="clear a shift set in the problem file")

    p_bench = sub.add_parser("bench", help="run the analytic-vs-sweep benchmark matrix")
    p_bench.add_argument("input", help="problem file")
    p_bench.add_argument("--out", required=True, help="output directory")
    p_bench.add_argument("--solvers", default="analytic,sweep",
                         help="comma list of solver kinds")
    p_bench.add_argument("--orders", default="2,4,8,16",
                         help="comma list of S_N orders")
    p_bench.add_argument("--kes", default="none",
                         help="comma list of shifts; 'none' for unshifted")
    p_bench.add_argument("--baseline", default="analytic_S16",
                         help="cell name time ratios are measured against")
    p_bench.add_argument("--parallel", action="store_true",
                         help="run cells concurrently (per-cell timings overlap)")
    return parser


def _load(args):
    problem = load_problem(args.input)
    config = problem.config
    over = {}
    if getattr(args, "sn", None):
        over["sn_order"] = args.sn
    if getattr(args, "mesh", None):
        over["fine_mesh_size"] = args.mesh
    if getattr(args, "tolerance", None):
        over["flux_tolerance"] = args.tolerance
    if getattr(args, "solver", None):
        over["solver_kind"] = args.solver
    if getattr(args, "ke", None) is not None:
        over["ke"] = args.ke
    if getattr(args, "no_ke", False):
        over["ke"] = None
    if over:
        problem = replace(problem, config=replace(config, **over))
    return problem


def _spectra(problem, quad, fission_scale):
    tms = {name: assemble_A(problem.materials[name], quad, fission_scale)
           for name in set(problem.geometry.materials)}
    return tms, {name: block_diagonalize(tm) for name, tm in tms.items()}


def _fixed_source(args, problem, mesh, n_groups):
    if args.source == "constant":
        emission = np.full((mesh.n_cells, n_groups), args.strength)
    elif args.source == "absx":
        emission = args.strength * np.abs(mesh.centers)[:, None] * np.ones((1, n_groups))
    else:
        if not args.source_file:
            raise ParseError("--source file needs --source-file")
        emission = np.loadtxt(args.source_file, delimiter=",", ndmin=2)
        if emission.shape != (mesh.n_cells, n_groups):
            raise ValidationError(
                f"source table must be {mesh.n_cells} cells x {n_groups} groups, "
                f"got {emission.shape}")
    return emission


def cmd_fixed(args) -> int:
    problem = _load(args)
    geo, cfg = problem.geometry, problem.config
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    quad = gauss_legendre(cfg.sn_order)
    mesh = build_fine_mesh(geo, cfg.fine_mesh_size)
    n_groups = problem.materials[geo.materials[0]].n_groups
    emission = _fixed_source(args, problem, mesh, n_groups)
    source = SourceField.isotropic(mesh, emission, quad.n)

    t0 = time.perf_counter()
    if cfg.solver_kind == "analytic":
        # the fixed-source operator excludes fission
        tms, spectra = _spectra(problem, quad, 0.0)
        flux = fixed_source_solve(geo, spectra, source, quad)
        if args.dump_matrices:
            outputs.dump_matrices(outdir / "matrices", tms, spectra)
    else:
        flux = sweep_fixed_source(geo, problem.materials, mesh, quad, source,
                                  cfg.flux_tolerance, max_inner=cfg.max_inner,
                                  scheme=cfg.sweep_scheme)
    seconds = time.perf_counter() - t0

    flux_csv = outdir / "flux.csv"
    outputs.write_flux_csv(flux_csv, flux, quad)
    summary = outputs.fixed_summary(
        solver_kind=cfg.solver_kind, sn_order=cfg.sn_order,
        mesh_size=mesh.n_cells, source_kind=args.source, seconds=seconds,
        outputs={"flux_csv": flux_csv.name})
    outputs.write_json(outdir / "summary.json", summary)
    return 0


def cmd_eigen(args) -> int:
    problem = _load(args)
    cfg = problem.config
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    result = power_iteration(problem.geometry, problem.materials, cfg)
    if args.dump_matrices and cfg.solver_kind == "analytic":
        quad = gauss_legendre(cfg.sn_order)
        scale = 0.0 if cfg.ke is None else 1.0 / cfg.ke
        tms, spectra = _spectra(problem, quad, scale)
        outputs.dump_matrices(outdir / "matrices", tms, spectra)
    quad = gauss_legendre(cfg.sn_order)
    flux_csv = outdir / "flux.csv"
    history_csv = outdir / "history.csv"
    outputs.write_flux_csv(flux_csv, result.flux, quad)
    outputs.write_history_csv(history_csv, result)
    summary = outputs.eigen_summary(result, {"flux_csv": flux_csv.name,
                                             "history_csv": history_csv.name})
    outputs.write_json(outdir / "summary.json", summary)
    print(f"k_eff = {result.k_eff:.6f} after {result.iterations} outer iterations")
    return 0


def cmd_bench(args) -> int:
    problem = load_problem(args.input)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    orders = [int(tok) for tok in args.orders.split(",") if tok.strip()]
    kes = [None if tok.strip().lower() == "none" else float(tok)
           for tok in args.kes.split(",") if tok.strip()]
    cells = [BenchCell(solver_kind=s, sn_order=n, ke=ke)
             for s in solvers for n in orders for ke in kes]
    report = run_benchmark(problem, cells, baseline=args.baseline,
                           parallel=args.parallel,
                           problem_name=Path(args.input).stem)
    outputs.write_bench_report(outdir / "report.json", report)
    outputs.write_bench_csv(outdir / "convergence.csv", report)
    for cell in report.cells:
        print(f"{cell['name']}: k={cell['k_eff']:.6f} iters={cell['iterations']} "
              f"total={cell['total_seconds']:.3f}s")
    if report.failed:
        for cell in report.failed:
            print(f"slab-sn: cell {cell['name']} failed: {cell['error']}",
                  file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"fixed": cmd_fixed, "eigen": cmd_eigen, "bench": cmd_bench}
    try:
        return handlers[args.command](args)
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"slab-sn: input error: {exc}", file=sys.stderr)
        return 2
    except TransportError as exc:
        print(f"slab-sn: solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
