"""Command-line entry point for convergence studies.

Keeps heavy imports inside :func:`main` so the thread cap from
``HYPERPOISSON_THREADS`` is applied to the numerical backends before numpy
loads them.
"""

from __future__ import annotations

import argparse
import os
import sys

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")


def _apply_thread_cap() -> None:
    cap = os.environ.get("HYPERPOISSON_THREADS")
    if cap:
        for var in _THREAD_VARS:
            os.environ.setdefault(var, cap)


def _parse_args(argv):
    parser = argparse.ArgumentParser(
        prog="hyperpoisson",
        description="Convergence studies for the hyperbolic-diffusion "
                    "DG-SBP Poisson solver.")
    parser.add_argument("--setup", type=int, required=True, choices=(1, 2, 3, 4),
                        help="built-in experiment setup")
    parser.add_argument("--degree", type=int, required=True,
                        help="polynomial degree of the elements")
    parser.add_argument("--levels", type=str, default=None,
                        help="comma-separated element counts, e.g. 10,20,40 "
                             "(default: the per-dimension study levels)")
    parser.add_argument("--solver", choices=("direct", "cg", "relaxation"),
                        default=None,
                        help="default: direct in 1D, cg in 2D")
    parser.add_argument("--tol", type=float, default=None,
                        help="cg tolerance or relaxation steady tolerance")
    parser.add_argument("--format", choices=("console", "csv"),
                        default="console")
    parser.add_argument("--output", type=str, default=None,
                        help="write the report here instead of stdout")
    parser.add_argument("--dump-solution", type=str, default=None,
                        help="dump the finest-level solution field as CSV")
    parser.add_argument("--mesh", type=str, default="uniform",
                        help="'uniform' or 'geometric:RATIO'")
    parser.add_argument("--residual-history", type=str, default=None,
                        help="relaxation solver: write (step, time, residual) "
                             "CSV for the finest level")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    _apply_thread_cap()
    args = _parse_args(argv)

    from .convergence import builtin_setup, emit_report, run_convergence
    from .mesh import dump_field
    from .relaxation import MarchError
    from .solvers import NonConvergenceError

    setup = builtin_setup(args.setup)
    levels = None
    if args.levels is not None:
        levels = tuple(int(tok) for tok in args.levels.split(",") if tok)
    if args.residual_history is not None and args.solver != "relaxation":
        print("warning: --residual-history only applies to the relaxation "
              "solver", file=sys.stderr)
    try:
        report = run_convergence(setup, args.degree, levels=levels,
                                 solver=args.solver, tol=args.tol,
                                 mesh_spec=args.mesh,
                                 keep_solution=args.dump_solution is not None,
                                 history_path=args.residual_history)
    except (NonConvergenceError, MarchError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    text = emit_report(report, fmt=args.format, path=args.output)
    if args.output is None:
        print(text)

    if args.dump_solution is not None and report.final_solution is not None:
        mesh, phi = report.final_solution
        dump_field(mesh, phi, args.dump_solution)
    return 0


if __name__ == "__main__":
    sys.exit(main())
