"""Local evaluation of the discrete gradient from surface data.

The auxiliary DG equation for the gradient couples neighbouring elements
through a q-dependent interface state for phi, so computing q nominally
requires a global linear solve.  With diagonal-norm SBP operators that
include the boundary nodes, the coupling collapses to a scalar equation per
interface for the jump of q.  Solving it gives per-interface coefficients

    c1 = (mu_r - mu_l) / 2 / (1 + (sqrt(T_r)/2) (mu_r + mu_l)),
    c2 = 1 / (1 + (sqrt(T_r)/2) (mu_r + mu_l)),

where ``mu = t^T M^{-1} t`` is the inverse mass-matrix corner of the
adjacent elements, and an explicit, purely local update for q from surface
values of phi and D phi.  ``c1`` vanishes on uniform grids.

Conventions used consistently throughout this module:

* the jump at an interface is (right-element trace) - (left-element trace);
* with ``c1`` as above, the interface jump of q satisfies
  ``[q] = c1 [phi] + c2 [D phi]``, and the local update applies
  ``(1 + sqrt(T_r) c1)/2`` on an element's right interface and
  ``(1 - sqrt(T_r) c1)/2`` on its left (signs fixed by requiring exact
  agreement with the assembled implicit system, see
  :func:`implicit_gradient_oracle`);
* at Dirichlet boundaries the interface state for phi is the boundary value
  itself, so the boundary correction is a plain penalty lift with no
  (c1, c2) pair.

The globally assembled formulation is retained as a dense oracle for
cross-checking on small problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernels import (
    from_x_lines,
    from_y_lines,
    interface_jumps,
    per_element,
    volume_derivative,
    x_lines,
    y_lines,
)
from .mesh import Mesh1D, Mesh2D
from .sbp import mass_corner


@dataclass(frozen=True)
class InterfaceCoeffs:
    """Jump-solve coefficients of one interior interface."""

    c1: float
    c2: float
    mu_left: float
    mu_right: float


def interface_coeffs(mesh: Mesh1D, T_r: float) -> list[InterfaceCoeffs]:
    """Coefficients for every interior interface of a 1D mesh.

    Dirichlet meshes have ``N - 1`` interior interfaces; periodic meshes have
    ``N``, the last being the wrap-around interface between the final and
    first elements.
    """
    if T_r <= 0:
        raise ValueError(f"relaxation time must be positive, got {T_r}")
    sqrt_tr = math.sqrt(T_r)
    n = mesh.n_elements
    pairs = [(e, e + 1) for e in range(n - 1)]
    if mesh.bc == "periodic":
        pairs.append((n - 1, 0))
    coeffs = []
    for left, right in pairs:
        mu_l = mass_corner(mesh.element_ops[left], "right")
        mu_r = mass_corner(mesh.element_ops[right], "left")
        denom = 1.0 + 0.5 * sqrt_tr * (mu_r + mu_l)
        coeffs.append(InterfaceCoeffs(c1=0.5 * (mu_r - mu_l) / denom,
                                      c2=1.0 / denom,
                                      mu_left=mu_l, mu_right=mu_r))
    return coeffs


def _coeff_arrays(mesh: Mesh1D, T_r: float) -> tuple[np.ndarray, np.ndarray]:
    coeffs = interface_coeffs(mesh, T_r)
    return (np.array([c.c1 for c in coeffs]), np.array([c.c2 for c in coeffs]))


def _boundary_traces_1d(mesh: Mesh1D, boundary_data) -> tuple[float, float]:
    if boundary_data is None:
        raise ValueError("Dirichlet mesh needs boundary data")
    x_min, x_max = mesh.extents
    return float(boundary_data(x_min)), float(boundary_data(x_max))


def _boundary_traces_2d(boundary_data, coord: float, other: Mesh1D, first: bool):
    """Evaluate the boundary trace on one face of a 2D domain."""
    if boundary_data is None:
        raise ValueError("Dirichlet mesh needs boundary data")
    args = (coord, other.node_coords) if first else (other.node_coords, coord)
    values = np.asarray(boundary_data(*args), dtype=float)
    if values.shape != other.node_coords.shape:
        values = np.broadcast_to(values, other.node_coords.shape)
    return values


def _local_gradient_lines(phi_c: np.ndarray, m: Mesh1D, c1: np.ndarray,
                          c2: np.ndarray, sqrt_tr: float,
                          g_left=None, g_right=None) -> np.ndarray:
    """Apply the local gradient update along the leading direction."""
    rest = phi_c.ndim - 2
    periodic = m.bc == "periodic"
    dphi = volume_derivative(phi_c, m)
    phi_l, phi_r = phi_c[:, 0], phi_c[:, -1]
    jump_phi = interface_jumps(phi_l, phi_r, periodic)
    jump_dphi = interface_jumps(dphi[:, 0], dphi[:, -1], periodic)
    c1r = per_element(c1, rest)
    c2r = per_element(c2, rest)
    # contribution applied on the left element of each interface ...
    term_right = (0.5 * (1.0 + sqrt_tr * c1r) * jump_phi
                  + 0.5 * sqrt_tr * c2r * jump_dphi)
    # ... and on the right element
    term_left = (0.5 * (1.0 - sqrt_tr * c1r) * jump_phi
                 - 0.5 * sqrt_tr * c2r * jump_dphi)
    inv_mr = per_element(m.inv_mass_right, rest)
    inv_ml = per_element(m.inv_mass_left, rest)
    q = dphi
    if periodic:
        q[:, -1] += inv_mr * term_right
        q[:, 0] += inv_ml * np.roll(term_left, 1, axis=0)
    else:
        q[:-1, -1] += inv_mr[:-1] * term_right
        q[1:, 0] += inv_ml[1:] * term_left
        q[0, 0] += inv_ml[0] * (phi_l[0] - g_left)
        q[-1, -1] += inv_mr[-1] * (g_right - phi_r[-1])
    return q


def local_gradient_1d(mesh: Mesh1D, phi: np.ndarray, T_r: float,
                      boundary_data: Callable | None = None) -> np.ndarray:
    """Discrete gradient of ``phi`` evaluated element-locally."""
    if phi.shape != mesh.field_shape:
        raise ValueError(f"field shape {phi.shape} does not match mesh "
                         f"{mesh.field_shape}")
    c1, c2 = _coeff_arrays(mesh, T_r)
    g_left = g_right = None
    if mesh.bc == "dirichlet":
        g_left, g_right = _boundary_traces_1d(mesh, boundary_data)
    return _local_gradient_lines(phi, mesh, c1, c2, math.sqrt(T_r),
                                 g_left, g_right)


def local_gradient_2d(mesh: Mesh2D, phi: np.ndarray, T_r: float,
                      boundary_data: Callable | None = None
                      ) -> tuple[np.ndarray, np.ndarray]:
    """Both gradient components of a tensor-product field.

    The 1D update runs independently along every x-line of nodes (jumps
    across vertical faces at matched y-node indices) and along every y-line;
    no interface projection is needed since facing elements share the same
    node set.
    """
    if phi.shape != mesh.field_shape:
        raise ValueError(f"field shape {phi.shape} does not match mesh "
                         f"{mesh.field_shape}")
    mx, my = mesh.mesh_x, mesh.mesh_y
    sqrt_tr = math.sqrt(T_r)

    c1x, c2x = _coeff_arrays(mx, T_r)
    gxl = gxr = None
    if mx.bc == "dirichlet":
        x0, x1 = mx.extents
        gxl = _boundary_traces_2d(boundary_data, x0, my, first=True)
        gxr = _boundary_traces_2d(boundary_data, x1, my, first=True)
    q1 = from_x_lines(_local_gradient_lines(x_lines(phi), mx, c1x, c2x,
                                            sqrt_tr, gxl, gxr))

    c1y, c2y = _coeff_arrays(my, T_r)
    gyl = gyr = None
    if my.bc == "dirichlet":
        y0, y1 = my.extents
        gyl = _boundary_traces_2d(boundary_data, y0, mx, first=False)
        gyr = _boundary_traces_2d(boundary_data, y1, mx, first=False)
    q2 = from_y_lines(_local_gradient_lines(y_lines(phi), my, c1y, c2y,
                                            sqrt_tr, gyl, gyr))
    return np.ascontiguousarray(q1), np.ascontiguousarray(q2)


def implicit_gradient_oracle(mesh: Mesh1D, phi: np.ndarray, T_r: float,
                             boundary_data: Callable | None = None) -> np.ndarray:
    """Gradient from the globally coupled auxiliary system, solved densely.

    Assembles the full linear system implied by the strong-form auxiliary
    equation with the q-dependent interface state for phi and solves it
    directly.  Intended for small cross-checking problems only; the local
    update must reproduce this field to round-off-level accuracy.
    """
    if phi.shape != mesh.field_shape:
        raise ValueError("field does not match mesh")
    if T_r <= 0:
        raise ValueError(f"relaxation time must be positive, got {T_r}")
    n_el, n = mesh.field_shape
    sqrt_tr = math.sqrt(T_r)
    size = n_el * n
    a = np.eye(size)
    rhs = np.empty((n_el, n))
    for e in range(n_el):
        rhs[e] = mesh.element_ops[e].deriv @ phi[e]
    rhs = rhs.reshape(size).copy()

    def node(e: int, i: int) -> int:
        return e * n + i

    pairs = [(e, e + 1) for e in range(n_el - 1)]
    if mesh.bc == "periodic":
        pairs.append((n_el - 1, 0))
    for left, right in pairs:
        jump_phi = phi[right, 0] - phi[left, -1]
        # left element, right face: + M^{-1} t_R ( [phi]/2 + (sqrt_tr/2) [q] )
        row = node(left, n - 1)
        inv_m = mesh.inv_mass_right[left]
        rhs[row] += inv_m * 0.5 * jump_phi
        a[row, node(right, 0)] -= inv_m * 0.5 * sqrt_tr
        a[row, node(left, n - 1)] += inv_m * 0.5 * sqrt_tr
        # right element, left face: - M^{-1} t_L ( -[phi]/2 + (sqrt_tr/2) [q] )
        row = node(right, 0)
        inv_m = mesh.inv_mass_left[right]
        rhs[row] += inv_m * 0.5 * jump_phi
        a[row, node(right, 0)] += inv_m * 0.5 * sqrt_tr
        a[row, node(left, n - 1)] -= inv_m * 0.5 * sqrt_tr
    if mesh.bc == "dirichlet":
        g_left, g_right = _boundary_traces_1d(mesh, boundary_data)
        rhs[node(0, 0)] += mesh.inv_mass_left[0] * (phi[0, 0] - g_left)
        rhs[node(n_el - 1, n - 1)] += (mesh.inv_mass_right[-1]
                                       * (g_right - phi[-1, -1]))
    return np.linalg.solve(a, rhs).reshape(n_el, n)
