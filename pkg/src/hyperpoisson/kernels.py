"""Shared per-direction kernels on a canonical "lines" layout.

All strong-form surface machinery is one-dimensional along a single
direction.  Fields are brought to the canonical shape ``(N, n, *rest)``
(element axis, node axis, then any passive line axes) so the same kernels
serve 1D fields directly and each direction of a 2D tensor field through
transposed views (no copies).
"""

from __future__ import annotations

import numpy as np

from .mesh import Mesh1D


def x_lines(field: np.ndarray) -> np.ndarray:
    """View of a 2D field with the x element/node axes leading."""
    return np.transpose(field, (0, 2, 1, 3))


def y_lines(field: np.ndarray) -> np.ndarray:
    """View of a 2D field with the y element/node axes leading."""
    return np.transpose(field, (1, 3, 0, 2))


def from_x_lines(lines: np.ndarray) -> np.ndarray:
    return np.transpose(lines, (0, 2, 1, 3))


def from_y_lines(lines: np.ndarray) -> np.ndarray:
    return np.transpose(lines, (2, 0, 3, 1))


def per_element(arr: np.ndarray, rest_ndim: int) -> np.ndarray:
    """Reshape a per-element (or per-interface) vector for broadcasting."""
    return arr.reshape(arr.shape + (1,) * rest_ndim)


def volume_derivative(u_c: np.ndarray, m: Mesh1D) -> np.ndarray:
    """Element-local collocation derivative ``(2/h_e) D u_e`` per line."""
    du = np.einsum("ij,ej...->ei...", m.op.deriv, u_c)
    du *= per_element(m.two_over_h, u_c.ndim - 2)[:, None]
    return du


def strong_derivative_with_flux(u_c: np.ndarray, m: Mesh1D,
                                fhat_left: np.ndarray,
                                fhat_right: np.ndarray) -> np.ndarray:
    """Strong-form derivative with surface corrections from numerical fluxes.

    ``fhat_left[e]`` / ``fhat_right[e]`` are the single-valued flux states at
    the left/right face of element ``e``.  Returns

        (2/h) D u  +  M^{-1} t_R (fhat_R - u_R)  -  M^{-1} t_L (fhat_L - u_L),

    which touches only the first/last node of each line beyond the volume
    term because the mass matrix is diagonal and boundary nodes are included.
    """
    rest = u_c.ndim - 2
    out = volume_derivative(u_c, m)
    out[:, -1] += per_element(m.inv_mass_right, rest) * (fhat_right - u_c[:, -1])
    out[:, 0] -= per_element(m.inv_mass_left, rest) * (fhat_left - u_c[:, 0])
    return out


def interface_jumps(trace_left: np.ndarray, trace_right: np.ndarray,
                    periodic: bool) -> np.ndarray:
    """Right-element minus left-element trace at each interface.

    ``trace_left[e]`` / ``trace_right[e]`` are the element traces at its own
    left/right face.  For periodic meshes the last entry is the wrap-around
    interface between the final and first elements.
    """
    if periodic:
        return np.roll(trace_left, -1, axis=0) - trace_right
    return trace_left[1:] - trace_right[:-1]


def interface_means(trace_left: np.ndarray, trace_right: np.ndarray,
                    periodic: bool) -> np.ndarray:
    """Arithmetic mean of the two element traces at each interface."""
    if periodic:
        return 0.5 * (np.roll(trace_left, -1, axis=0) + trace_right)
    return 0.5 * (trace_left[1:] + trace_right[:-1])


def scatter_to_faces(interface_values: np.ndarray, boundary_left,
                     boundary_right, periodic: bool) -> tuple[np.ndarray, np.ndarray]:
    """Distribute per-interface values to per-element (left, right) faces.

    For Dirichlet meshes the domain-boundary faces take the supplied
    ``boundary_left`` / ``boundary_right`` states instead.
    """
    if periodic:
        fhat_right = interface_values
        fhat_left = np.roll(interface_values, 1, axis=0)
        return fhat_left, fhat_right
    n_elem = interface_values.shape[0] + 1
    rest = interface_values.shape[1:]
    fhat_left = np.empty((n_elem,) + rest)
    fhat_right = np.empty((n_elem,) + rest)
    fhat_right[:-1] = interface_values
    fhat_left[1:] = interface_values
    fhat_left[0] = boundary_left
    fhat_right[-1] = boundary_right
    return fhat_left, fhat_right
