"""Built-in experiment setups, refinement studies and error tables.

Each setup bundles an exact solution, its gradient, the matching forcing
``f = -laplace(phi)`` in closed form, and the domain the relaxation time is
derived from.  ``run_convergence`` solves a sequence of refinements,
measures mass-weighted L2 errors of the potential and of the locally
reconstructed gradient, and attaches experimental orders of convergence
(EOC) computed from successive levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .elliptic import EllipticOperator, relaxation_time
from .gradient import local_gradient_1d, local_gradient_2d
from .mesh import (
    Mesh1D,
    Mesh2D,
    geometric_boundaries,
    interpolate,
    l2_error,
    uniform_mesh_1d,
)
from .relaxation import MarchConfig, march_to_steady, zero_state
from .solvers import SolveReport, solve_cg, solve_direct_1d

#: Default refinement levels per dimension, and relaxation-solver caps.
DEFAULT_LEVELS = {1: (10, 20, 40, 80, 160), 2: (4, 8, 16, 32, 64)}
RELAXATION_MAX_ELEMENTS = {1: 20, 2: 8}


@dataclass(frozen=True)
class ProblemSetup:
    name: str
    dimension: int
    extents: tuple
    bc: str
    exact_phi: Callable
    exact_gradient: tuple[Callable, ...]
    forcing: Callable

    @property
    def relaxation(self):
        return relaxation_time(self.extents)


def _setup_1() -> ProblemSetup:
    phi = lambda x: np.exp(-10.0 * x * x)
    return ProblemSetup(
        name="setup 1", dimension=1, extents=(-1.0, 1.0), bc="dirichlet",
        exact_phi=phi,
        exact_gradient=(lambda x: -20.0 * x * np.exp(-10.0 * x * x),),
        forcing=lambda x: (20.0 - 400.0 * x * x) * np.exp(-10.0 * x * x),
    )


def _setup_2() -> ProblemSetup:
    # additive constant makes the exact mean over (-2, 2) vanish
    shift = math.sqrt(math.pi / 10.0) * math.erf(2.0 * math.sqrt(10.0)) / 4.0
    return ProblemSetup(
        name="setup 2", dimension=1, extents=(-2.0, 2.0), bc="periodic",
        exact_phi=lambda x: np.exp(-10.0 * x * x) - shift,
        exact_gradient=(lambda x: -20.0 * x * np.exp(-10.0 * x * x),),
        forcing=lambda x: (20.0 - 400.0 * x * x) * np.exp(-10.0 * x * x),
    )


def _setup_3() -> ProblemSetup:
    pi = np.pi
    return ProblemSetup(
        name="setup 3", dimension=2,
        extents=((-0.5, 0.5), (-0.5, 0.5)), bc="dirichlet",
        exact_phi=lambda x, y: np.cos(pi * x) * np.cos(pi * y),
        exact_gradient=(lambda x, y: -pi * np.sin(pi * x) * np.cos(pi * y),
                        lambda x, y: -pi * np.cos(pi * x) * np.sin(pi * y)),
        forcing=lambda x, y: 2.0 * pi * pi * np.cos(pi * x) * np.cos(pi * y),
    )


def _setup_4() -> ProblemSetup:
    pi = np.pi
    return ProblemSetup(
        name="setup 4", dimension=2,
        extents=((-1.0, 1.0), (-1.0, 1.0)), bc="periodic",
        exact_phi=lambda x, y: 2.0 * np.cos(pi * x) * np.sin(2 * pi * y),
        exact_gradient=(lambda x, y: -2 * pi * np.sin(pi * x) * np.sin(2 * pi * y),
                        lambda x, y: 4 * pi * np.cos(pi * x) * np.cos(2 * pi * y)),
        forcing=lambda x, y: 10.0 * pi * pi * np.cos(pi * x) * np.sin(2 * pi * y),
    )


_SETUPS = {1: _setup_1, 2: _setup_2, 3: _setup_3, 4: _setup_4}


def builtin_setup(setup_id: int) -> ProblemSetup:
    """One of the four built-in experiments."""
    try:
        return _SETUPS[setup_id]()
    except KeyError:
        raise ValueError(f"unknown setup id {setup_id}; valid: 1..4") from None


@dataclass
class LevelResult:
    n_elements: int
    err_phi: float
    err_q: tuple[float, ...]
    eoc_phi: float | None = None
    eoc_q: tuple[float | None, ...] = ()
    solve: SolveReport | None = None


@dataclass
class ConvergenceReport:
    setup: ProblemSetup
    degree: int
    solver: str
    levels: list[LevelResult] = field(default_factory=list)
    final_solution: tuple | None = None  # (mesh, phi) of the finest level


def eoc_values(n_elements: Sequence[int], errors: Sequence[float]) -> list:
    """EOC per refinement: log(e_coarse/e_fine) / log(N_fine/N_coarse)."""
    out = [None]
    for i in range(1, len(errors)):
        ratio = math.log(errors[i - 1] / errors[i])
        out.append(ratio / math.log(n_elements[i] / n_elements[i - 1]))
    return out


def _build_mesh(setup: ProblemSetup, n: int, degree: int, mesh_spec: str):
    def boundaries(lo, hi):
        if mesh_spec == "uniform":
            return np.linspace(lo, hi, n + 1)
        if mesh_spec.startswith("geometric:"):
            ratio = float(mesh_spec.split(":", 1)[1])
            return geometric_boundaries(lo, hi, n, ratio)
        raise ValueError(f"unknown mesh spec {mesh_spec!r}")

    if setup.dimension == 1:
        lo, hi = setup.extents
        return Mesh1D(boundaries(lo, hi), degree, setup.bc)
    (x0, x1), (y0, y1) = setup.extents
    return Mesh2D(Mesh1D(boundaries(x0, x1), degree, setup.bc),
                  Mesh1D(boundaries(y0, y1), degree, setup.bc))


def _solve_level(setup, mesh, operator, solver, tol, history_path=None):
    apply_a, rhs = operator.linear_parts()
    deflate = operator.pure_periodic
    if solver == "direct":
        return solve_direct_1d(mesh, apply_a, rhs, deflate_mean=deflate)
    if solver == "cg":
        return solve_cg(mesh, apply_a, rhs,
                        tol=1e-12 if tol is None else tol,
                        deflate_mean=deflate)
    if solver == "relaxation":
        config = MarchConfig(steady_tol=1e-10 if tol is None else tol)
        bd = setup.exact_phi if setup.bc == "dirichlet" else None
        state, steps = march_to_steady(config, operator.T_r, operator.forcing,
                                       bd, zero_state(mesh),
                                       history_path=history_path)
        report = SolveReport(iterations=steps,
                             final_residual=state.residual_norm,
                             wall_time=0.0, method="relaxation")
        return state.phi, report
    raise ValueError(f"unknown solver {solver!r}")


def run_convergence(setup: ProblemSetup, degree: int,
                    levels: Sequence[int] | None = None,
                    solver: str | None = None, tol: float | None = None,
                    mesh_spec: str = "uniform",
                    keep_solution: bool = False,
                    boundary_jump: str = "normal",
                    history_path=None) -> ConvergenceReport:
    """Refinement study for one setup and degree.

    The gradient error is measured on q reconstructed from the solved phi
    via the local update, the quantity the scheme makes cheap.  Direct
    solves are 1D only; the relaxation solver is capped to coarse meshes.
    """
    if levels is None:
        levels = DEFAULT_LEVELS[setup.dimension]
    if sorted(levels) != list(levels):
        raise ValueError("levels must be increasing")
    if solver is None:
        solver = "direct" if setup.dimension == 1 else "cg"
    if solver == "direct" and setup.dimension != 1:
        raise ValueError("direct solver supports 1D setups only")
    if solver == "relaxation":
        cap = RELAXATION_MAX_ELEMENTS[setup.dimension]
        if max(levels) > cap:
            raise ValueError(f"relaxation solver capped at N={cap} "
                             f"in {setup.dimension}D, requested {max(levels)}")

    T_r = setup.relaxation.T_r
    report = ConvergenceReport(setup=setup, degree=degree, solver=solver)
    for n in levels:
        mesh = _build_mesh(setup, n, degree, mesh_spec)
        bd = setup.exact_phi if setup.bc == "dirichlet" else None
        operator = EllipticOperator(mesh, interpolate(mesh, setup.forcing),
                                    bd, T_r, boundary_jump=boundary_jump)
        try:
            phi, solve_report = _solve_level(
                setup, mesh, operator, solver, tol,
                history_path=history_path if n == levels[-1] else None)
        except Exception as exc:
            raise RuntimeError(f"{setup.name}, degree {degree}, N={n}: "
                               f"solver failed: {exc}") from exc
        err_phi = l2_error(mesh, phi, setup.exact_phi)
        if setup.dimension == 1:
            q = local_gradient_1d(mesh, phi, T_r, bd)
            err_q = (l2_error(mesh, q, setup.exact_gradient[0]),)
        else:
            q1, q2 = local_gradient_2d(mesh, phi, T_r, bd)
            err_q = (l2_error(mesh, q1, setup.exact_gradient[0]),
                     l2_error(mesh, q2, setup.exact_gradient[1]))
        report.levels.append(LevelResult(n_elements=n, err_phi=err_phi,
                                         err_q=err_q, solve=solve_report))
        if keep_solution and n == levels[-1]:
            report.final_solution = (mesh, phi)

    ns = [lv.n_elements for lv in report.levels]
    phis = eoc_values(ns, [lv.err_phi for lv in report.levels])
    qs = [eoc_values(ns, [lv.err_q[c] for lv in report.levels])
          for c in range(setup.dimension)]
    for i, lv in enumerate(report.levels):
        lv.eoc_phi = phis[i]
        lv.eoc_q = tuple(qs[c][i] for c in range(setup.dimension))
    return report


def _fmt_eoc(value) -> str:
    return "     " if value is None else f"{value:5.2f}"


def format_console(report: ConvergenceReport) -> str:
    """Fixed-width table in the style of the published convergence tables."""
    dim = report.setup.dimension
    q_labels = ["Error q"] if dim == 1 else ["Error q1", "Error q2"]
    header = f"{'N':>6s}  {'Error phi':>10s}  {'EOC':>5s}"
    for label in q_labels:
        header += f"  {label:>10s}  {'EOC':>5s}"
    lines = [f"{report.setup.name} ({dim}D, {report.setup.bc}), "
             f"degree {report.degree}, solver {report.solver}", header]
    for lv in report.levels:
        row = f"{lv.n_elements:6d}  {lv.err_phi:10.2e}  {_fmt_eoc(lv.eoc_phi)}"
        for c in range(dim):
            row += f"  {lv.err_q[c]:10.2e}  {_fmt_eoc(lv.eoc_q[c])}"
        lines.append(row)
    return "\n".join(lines)


def format_csv(report: ConvergenceReport) -> str:
    dim = report.setup.dimension
    cols = ["setup", "degree", "N", "err_phi", "eoc_phi", "err_q1", "eoc_q1"]
    if dim == 2:
        cols += ["err_q2", "eoc_q2"]
    cols += ["solver", "iterations", "final_residual"]
    lines = [",".join(cols)]

    def eoc_cell(value):
        return "" if value is None else f"{value:.6f}"

    for lv in report.levels:
        row = [report.setup.name.replace(" ", ""), str(report.degree),
               str(lv.n_elements), f"{lv.err_phi:.6e}", eoc_cell(lv.eoc_phi),
               f"{lv.err_q[0]:.6e}", eoc_cell(lv.eoc_q[0])]
        if dim == 2:
            row += [f"{lv.err_q[1]:.6e}", eoc_cell(lv.eoc_q[1])]
        row += [report.solver, str(lv.solve.iterations),
                f"{lv.solve.final_residual:.3e}"]
        lines.append(",".join(row))
    return "\n".join(lines)


def emit_report(report: ConvergenceReport, fmt: str = "console",
                path=None) -> str:
    """Render a report and optionally write it to ``path``."""
    if fmt == "console":
        text = format_console(report)
    elif fmt == "csv":
        text = format_csv(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
