"""Matrix-free conjugate gradients and a dense direct solver for 1D systems.

All inner products are the mass-weighted discrete L2 inner product, so
tolerances are mesh-size independent and match the error norm used in the
convergence studies.  Periodic (singular) systems are handled by mean
deflation: the right hand side is projected onto the mean-zero subspace and
iterates stay there, or, for the direct path, a Lagrange-multiplier row
enforces the zero-mean constraint.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .mesh import inner, mean_value, norm


class NonConvergenceError(RuntimeError):
    """Solver failed to reach the requested tolerance; carries the report."""

    def __init__(self, message: str, report: "SolveReport"):
        super().__init__(message)
        self.report = report


class DivergenceError(NonConvergenceError):
    """NaN or Inf detected in the iteration."""


@dataclass
class SolveReport:
    iterations: int
    final_residual: float
    wall_time: float
    method: str
    residual_history: list[float] = field(default_factory=list)


def solve_cg(mesh, apply_a: Callable[[np.ndarray], np.ndarray], b: np.ndarray,
             tol: float = 1e-12, max_iter: int | None = None,
             deflate_mean: bool = False) -> tuple[np.ndarray, SolveReport]:
    """Conjugate gradients with a zero initial guess.

    Converges when the mass-weighted residual norm drops below ``tol``
    relative to ``|b|``.  With ``deflate_mean`` both the right hand side and
    the iterates are kept mean-free, which restricts a semidefinite periodic
    operator to the subspace where it is definite.
    """
    start = time.perf_counter()
    if max_iter is None:
        max_iter = 10 * b.size
    if deflate_mean:
        b = b - mean_value(mesh, b)
    b_norm = norm(mesh, b)
    if b_norm == 0.0:
        report = SolveReport(0, 0.0, time.perf_counter() - start, "cg", [0.0])
        return np.zeros_like(b), report
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rho = inner(mesh, r, r)
    history = [np.sqrt(rho) / b_norm]
    for iteration in range(1, max_iter + 1):
        w = apply_a(p)
        if deflate_mean:
            w = w - mean_value(mesh, w)
        alpha = rho / inner(mesh, p, w)
        x += alpha * p
        r -= alpha * w
        rho_next = inner(mesh, r, r)
        rel = np.sqrt(rho_next) / b_norm
        history.append(rel)
        if not np.isfinite(rel):
            report = SolveReport(iteration, float(rel),
                                 time.perf_counter() - start, "cg", history)
            raise DivergenceError("NaN/Inf in CG iteration", report)
        if rel <= tol:
            if deflate_mean:
                x -= mean_value(mesh, x)
            report = SolveReport(iteration, float(rel),
                                 time.perf_counter() - start, "cg", history)
            return x, report
        p = r + (rho_next / rho) * p
        rho = rho_next
    report = SolveReport(max_iter, float(history[-1]),
                         time.perf_counter() - start, "cg", history)
    raise NonConvergenceError(
        f"CG did not reach tol={tol} in {max_iter} iterations "
        f"(residual {history[-1]:.3e})", report)


def assemble_dense(apply_a: Callable[[np.ndarray], np.ndarray],
                   shape: tuple[int, ...]) -> np.ndarray:
    """Column-by-column dense matrix of a linear operator on nodal fields."""
    size = int(np.prod(shape))
    matrix = np.empty((size, size))
    unit = np.zeros(shape)
    flat = unit.reshape(-1)
    for j in range(size):
        flat[j] = 1.0
        matrix[:, j] = apply_a(unit).reshape(-1)
        flat[j] = 0.0
    return matrix


def solve_direct_1d(mesh, apply_a: Callable[[np.ndarray], np.ndarray],
                    b: np.ndarray, deflate_mean: bool = False
                    ) -> tuple[np.ndarray, SolveReport]:
    """Dense LU solve of a 1D system assembled from the matrix-free operator.

    For periodic problems the (singular) matrix is augmented with a
    mean-constraint row and column, pinning the solution to zero discrete
    mean via a Lagrange multiplier.
    """
    start = time.perf_counter()
    if mesh.dimension != 1:
        raise ValueError("direct solver supports 1D meshes only")
    size = b.size
    if size > 10_000:
        raise ValueError(f"direct solver limited to 1e4 unknowns, got {size}")
    matrix = assemble_dense(apply_a, mesh.field_shape)
    rhs = b.reshape(-1)
    if deflate_mean:
        weights = mesh.mass.reshape(-1)
        rhs = rhs - mean_value(mesh, b) * np.ones(size)
        augmented = np.zeros((size + 1, size + 1))
        augmented[:size, :size] = matrix
        augmented[:size, size] = weights
        augmented[size, :size] = weights
        solution = np.linalg.solve(augmented, np.concatenate([rhs, [0.0]]))
        x = solution[:size].reshape(mesh.field_shape)
    else:
        try:
            x = np.linalg.solve(matrix, rhs).reshape(mesh.field_shape)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                f"singular elliptic system ({exc}); periodic problems need "
                "deflate_mean") from None
    residual = norm(mesh, apply_a(x) - b.reshape(mesh.field_shape))
    b_norm = norm(mesh, b)
    rel = residual / b_norm if b_norm > 0 else residual
    report = SolveReport(0, float(rel), time.perf_counter() - start, "direct")
    return x, report
