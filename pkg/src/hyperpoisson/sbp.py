"""Diagonal-norm SBP operators on Gauss-Lobatto-Legendre nodes.

A reference operator bundles the collocation nodes on [-1, 1], the diagonal
mass matrix (GLL quadrature weights), the nodal derivative matrix ``D`` and
the boundary selector vectors ``t_L = (1, 0, ..., 0)``,
``t_R = (0, ..., 0, 1)``.  Together these satisfy the summation-by-parts
identity

    M D + (M D)^T = t_R t_R^T - t_L t_L^T,

the discrete analogue of integration by parts.  Operators are affinely
mapped to physical elements by :func:`scale_to_element`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Largest supported polynomial degree.  Enough for desk-scale studies;
#: node accuracy of the Newton solve has only been validated up to here.
MAX_DEGREE = 12


@dataclass(frozen=True)
class SBPOperator:
    """Reference-element operator of degree ``p`` with ``p + 1`` GLL nodes."""

    degree: int
    nodes: np.ndarray
    mass_diag: np.ndarray
    deriv: np.ndarray
    boundary_left: np.ndarray
    boundary_right: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.degree + 1


@dataclass(frozen=True)
class ScaledOperator:
    """Reference operator mapped to the element ``(x_left, x_right)``.

    The affine map has Jacobian ``h / 2``; the derivative picks up a factor
    ``2 / h`` and the mass weights a factor ``h / 2``, which leaves the SBP
    boundary term unchanged.
    """

    base: SBPOperator
    x_left: float
    x_right: float
    deriv: np.ndarray
    mass_diag: np.ndarray

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    @property
    def jacobian(self) -> float:
        return 0.5 * (self.x_right - self.x_left)


def _legendre(degree: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the Legendre polynomial ``P_degree`` and its derivative."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    dp_prev = np.zeros_like(x)
    if degree == 0:
        return p_prev, dp_prev
    p = x.copy()
    dp = np.ones_like(x)
    for k in range(2, degree + 1):
        p_next = ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
        dp_next = dp_prev + (2 * k - 1) * p
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def gll_nodes_weights(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and quadrature weights of the (degree+1)-point GLL rule.

    Interior nodes are the roots of ``P'_degree``, found by Newton iteration
    from Chebyshev-Gauss-Lobatto initial guesses.  Weights use the closed
    form ``2 / (p (p+1) P_p(x_i)^2)``.  The node and weight vectors are
    symmetrized so that uniform meshes yield bitwise-symmetric mass corners.
    """
    n = degree + 1
    nodes = np.empty(n)
    nodes[0], nodes[-1] = -1.0, 1.0
    if degree >= 2:
        x = -np.cos(np.pi * np.arange(1, degree) / degree)
        for _ in range(100):
            p, dp = _legendre(degree, x)
            # P'' from the Legendre ODE (1-x^2) P'' = 2 x P' - p(p+1) P
            ddp = (2.0 * x * dp - degree * (degree + 1) * p) / (1.0 - x * x)
            delta = dp / ddp
            x -= delta
            if np.max(np.abs(delta)) <= 1e-15:
                break
        nodes[1:-1] = x
    nodes = 0.5 * (nodes - nodes[::-1])
    p_val, _ = _legendre(degree, nodes)
    weights = 2.0 / (degree * (degree + 1) * p_val * p_val)
    weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


def _derivative_matrix(nodes: np.ndarray) -> np.ndarray:
    """Collocation derivative from barycentric Lagrange weights.

    The diagonal uses the negative-sum trick, which keeps the matrix exact
    on constants and numerically stable at higher degrees.
    """
    n = nodes.size
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    d = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -np.sum(d, axis=1))
    return d


def gll_operator(degree: int) -> SBPOperator:
    """Construct the degree-``p`` GLL collocation operator.

    Degree 0 is rejected because both element boundaries must carry a node;
    degrees above :data:`MAX_DEGREE` are out of the supported range.
    """
    if not isinstance(degree, (int, np.integer)):
        raise TypeError(f"degree must be an integer, got {degree!r}")
    if degree < 1:
        raise ValueError("degree must be >= 1 (boundary nodes cannot both be included)")
    if degree > MAX_DEGREE:
        raise ValueError(f"degree {degree} exceeds supported maximum {MAX_DEGREE}")
    nodes, weights = gll_nodes_weights(degree)
    deriv = _derivative_matrix(nodes)
    t_left = np.zeros(degree + 1)
    t_left[0] = 1.0
    t_right = np.zeros(degree + 1)
    t_right[-1] = 1.0
    for arr in (nodes, weights, deriv, t_left, t_right):
        arr.flags.writeable = False
    return SBPOperator(
        degree=int(degree),
        nodes=nodes,
        mass_diag=weights,
        deriv=deriv,
        boundary_left=t_left,
        boundary_right=t_right,
    )


def scale_to_element(op: SBPOperator, x_left: float, x_right: float) -> ScaledOperator:
    """Map a reference operator to the element ``(x_left, x_right)``."""
    if not x_left < x_right:
        raise ValueError(f"degenerate element: x_left={x_left} >= x_right={x_right}")
    h = x_right - x_left
    deriv = (2.0 / h) * op.deriv
    mass = (0.5 * h) * op.mass_diag
    deriv.flags.writeable = False
    mass.flags.writeable = False
    return ScaledOperator(base=op, x_left=float(x_left), x_right=float(x_right),
                          deriv=deriv, mass_diag=mass)


def mass_corner(op: ScaledOperator, side: str) -> float:
    """Return ``t^T M^{-1} t`` for the requested boundary of a scaled element.

    With a diagonal mass matrix this is simply the reciprocal of the scaled
    quadrature weight at the boundary node.
    """
    if side == "left":
        return 1.0 / op.mass_diag[0]
    if side == "right":
        return 1.0 / op.mass_diag[-1]
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def format_operator(op: SBPOperator) -> str:
    """Plain-text dump of an operator (debugging aid)."""
    lines = [f"GLL SBP operator, degree {op.degree}"]
    lines.append("nodes:     " + "  ".join(f"{x:+.15e}" for x in op.nodes))
    lines.append("mass_diag: " + "  ".join(f"{w:+.15e}" for w in op.mass_diag))
    lines.append("deriv:")
    for row in op.deriv:
        lines.append("  " + "  ".join(f"{d:+.15e}" for d in row))
    return "\n".join(lines)
