"""Pseudo-time integration of the first-order relaxation system.

The diffusion problem is recast as the damped hyperbolic system

    d phi / dt = div q + f,
    d q   / dt = (grad phi - q) / T_r,

whose steady state solves the elliptic problem.  The spatial discretization
is the same DG-SBP strong form with upwind interface states

    phi_hat = {phi} + (sqrt(T_r)/2) [q_n],
    q_hat   = {q_n} + [phi] / (2 sqrt(T_r)),

per direction; here q is an evolved unknown (no local reconstruction), so
phi_hat genuinely couples to q.  The module exists to cross-validate the
elliptic path: the pair (phi*, local gradient of phi*) must be a fixed
point of :func:`semidiscrete_rhs`, and marching to steady state must
reproduce the elliptic solution.  It is restricted to coarse meshes
(pseudo-time convergence is slow by design).

Dirichlet faces always use the *coercive* boundary-jump orientation (see
the elliptic module docstring): the semidiscrete system then has strictly
negative spectral abscissa and the march converges.  With the
normal-oriented boundary penalty the system has growing boundary modes, so
cross-validation runs must build their elliptic reference with
``boundary_jump="coercive"``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .elliptic import _q_hat_faces
from .gradient import _boundary_traces_1d, _boundary_traces_2d
from .kernels import (
    from_x_lines,
    from_y_lines,
    interface_jumps,
    interface_means,
    scatter_to_faces,
    strong_derivative_with_flux,
    x_lines,
    y_lines,
)
from .mesh import Mesh1D, mean_value


@dataclass(frozen=True)
class MarchConfig:
    """Explicit pseudo-time marching parameters."""

    cfl: float = 0.5
    steady_tol: float = 1e-10
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must be in (0, 1], got {self.cfl}")
        if self.steady_tol <= 0 or self.max_steps <= 0:
            raise ValueError("steady_tol and max_steps must be positive")


@dataclass
class RelaxState:
    """Potential, gradient components and pseudo-time bookkeeping."""

    mesh: object
    phi: np.ndarray
    q: tuple[np.ndarray, ...]
    time: float = 0.0
    residual_norm: float = math.inf


class MarchError(RuntimeError):
    """Steady state not reached within max_steps; carries the last residual."""

    def __init__(self, message: str, residual: float, steps: int):
        super().__init__(message)
        self.residual = residual
        self.steps = steps


def zero_state(mesh) -> RelaxState:
    n_comp = mesh.dimension
    return RelaxState(mesh=mesh, phi=mesh.zero_field(),
                      q=tuple(mesh.zero_field() for _ in range(n_comp)))


def _phi_hat_faces(phi_c: np.ndarray, q_c: np.ndarray, m: Mesh1D,
                   half_sqrt_tr: float, g_left, g_right):
    """Upwind interface states for phi; prescribed at Dirichlet faces."""
    periodic = m.bc == "periodic"
    values = (interface_means(phi_c[:, 0], phi_c[:, -1], periodic)
              + half_sqrt_tr * interface_jumps(q_c[:, 0], q_c[:, -1], periodic))
    if periodic:
        return scatter_to_faces(values, None, None, True)
    return scatter_to_faces(values, g_left, g_right, False)


def semidiscrete_rhs(state: RelaxState, T_r: float, forcing: np.ndarray,
                     boundary_data: Callable | None = None
                     ) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    """Time derivatives of (phi, q) for the current state."""
    mesh = state.mesh
    sqrt_tr = math.sqrt(T_r)
    penalty = 0.5 / sqrt_tr
    if mesh.dimension == 1:
        g = (_boundary_traces_1d(mesh, boundary_data)
             if mesh.bc == "dirichlet" else (None, None))
        q = state.q[0]
        fl, fr = _q_hat_faces(q, state.phi, mesh, penalty, *g, 1.0)
        dphi = strong_derivative_with_flux(q, mesh, fl, fr) + forcing
        fl, fr = _phi_hat_faces(state.phi, q, mesh, 0.5 * sqrt_tr, *g)
        dq = (strong_derivative_with_flux(state.phi, mesh, fl, fr) - q) / T_r
        return dphi, (dq,)

    mx, my = mesh.mesh_x, mesh.mesh_y
    gx = gy = (None, None)
    if mx.bc == "dirichlet":
        x0, x1 = mx.extents
        gx = (_boundary_traces_2d(boundary_data, x0, my, True),
              _boundary_traces_2d(boundary_data, x1, my, True))
    if my.bc == "dirichlet":
        y0, y1 = my.extents
        gy = (_boundary_traces_2d(boundary_data, y0, mx, False),
              _boundary_traces_2d(boundary_data, y1, mx, False))
    q1, q2 = state.q
    phi_x, q1_x = x_lines(state.phi), x_lines(q1)
    phi_y, q2_y = y_lines(state.phi), y_lines(q2)

    fl, fr = _q_hat_faces(q1_x, phi_x, mx, penalty, *gx, 1.0)
    dphi = from_x_lines(strong_derivative_with_flux(q1_x, mx, fl, fr)).copy()
    fl, fr = _q_hat_faces(q2_y, phi_y, my, penalty, *gy, 1.0)
    dphi += from_y_lines(strong_derivative_with_flux(q2_y, my, fl, fr))
    dphi += forcing

    fl, fr = _phi_hat_faces(phi_x, q1_x, mx, 0.5 * sqrt_tr, *gx)
    dq1 = (from_x_lines(strong_derivative_with_flux(phi_x, mx, fl, fr)) - q1) / T_r
    fl, fr = _phi_hat_faces(phi_y, q2_y, my, 0.5 * sqrt_tr, *gy)
    dq2 = (from_y_lines(strong_derivative_with_flux(phi_y, my, fl, fr)) - q2) / T_r
    return dphi, (dq1, dq2)


def _combined_max_norm(dphi: np.ndarray, dq: tuple[np.ndarray, ...]) -> float:
    result = float(np.max(np.abs(dphi)))
    for comp in dq:
        result = max(result, float(np.max(np.abs(comp))))
    return result


def _min_element_length(mesh) -> float:
    if mesh.dimension == 1:
        return float(mesh.lengths.min())
    return float(min(mesh.mesh_x.lengths.min(), mesh.mesh_y.lengths.min()))


def time_step(mesh, T_r: float, cfl: float) -> float:
    """CFL-limited step from the system wave speed 1/sqrt(T_r)."""
    return cfl * _min_element_length(mesh) * math.sqrt(T_r) / (2 * mesh.degree + 1)


def march_to_steady(config: MarchConfig, T_r: float, forcing: np.ndarray,
                    boundary_data, initial: RelaxState,
                    history_path=None) -> tuple[RelaxState, int]:
    """Classic four-stage Runge-Kutta in pseudo-time until steady.

    Stops once the max-norm of the combined time derivative drops below
    ``steady_tol`` scaled by max(1, |f|_inf); the check runs before each
    step, so an already-steady initial state returns after 0 steps.  For
    purely periodic meshes the forcing mean is removed first, otherwise the
    mean of phi would drift linearly and no steady state exists.
    """
    mesh = initial.mesh
    phi = initial.phi.copy()
    q = [comp.copy() for comp in initial.q]
    pure_periodic = (mesh.bc == "periodic" if mesh.dimension == 1 else
                     mesh.mesh_x.bc == "periodic" and mesh.mesh_y.bc == "periodic")
    if pure_periodic:
        forcing = forcing - mean_value(mesh, forcing)
    threshold = config.steady_tol * max(1.0, float(np.max(np.abs(forcing))))
    dt = time_step(mesh, T_r, config.cfl)

    state = RelaxState(mesh=mesh, phi=phi, q=tuple(q), time=initial.time)
    history = []

    def rhs(s: RelaxState):
        return semidiscrete_rhs(s, T_r, forcing, boundary_data)

    for step in range(config.max_steps + 1):
        k1_phi, k1_q = rhs(state)
        residual = _combined_max_norm(k1_phi, k1_q)
        state.residual_norm = residual
        if history_path is not None:
            history.append((step, state.time, residual))
        if residual <= threshold:
            if history_path is not None:
                _write_history(history_path, history)
            return state, step
        if step == config.max_steps:
            break
        # classic RK4 stages
        s2 = RelaxState(mesh, state.phi + 0.5 * dt * k1_phi,
                        tuple(qc + 0.5 * dt * kc for qc, kc in zip(state.q, k1_q)))
        k2_phi, k2_q = rhs(s2)
        s3 = RelaxState(mesh, state.phi + 0.5 * dt * k2_phi,
                        tuple(qc + 0.5 * dt * kc for qc, kc in zip(state.q, k2_q)))
        k3_phi, k3_q = rhs(s3)
        s4 = RelaxState(mesh, state.phi + dt * k3_phi,
                        tuple(qc + dt * kc for qc, kc in zip(state.q, k3_q)))
        k4_phi, k4_q = rhs(s4)
        state.phi = state.phi + (dt / 6.0) * (k1_phi + 2 * k2_phi + 2 * k3_phi + k4_phi)
        state.q = tuple(qc + (dt / 6.0) * (a + 2 * b + 2 * c + d)
                        for qc, a, b, c, d in zip(state.q, k1_q, k2_q, k3_q, k4_q))
        state.time += dt

    if history_path is not None:
        _write_history(history_path, history)
    raise MarchError(
        f"no steady state after {config.max_steps} steps "
        f"(residual {state.residual_norm:.3e}, threshold {threshold:.3e})",
        residual=state.residual_norm, steps=config.max_steps)


def _write_history(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "pseudo_time", "residual"])
        for row in rows:
            writer.writerow([row[0], repr(row[1]), repr(row[2])])
