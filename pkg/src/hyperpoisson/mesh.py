"""1D and tensor-product 2D element partitions, nodal fields and quadrature.

Fields are plain ``numpy`` arrays in element-major layout:
``value[element, node]`` in 1D and ``value[ex, ey, ix, iy]`` in 2D.  Surface
exchanges therefore touch only the first/last node slices per direction.
All reductions (integrals, norms, errors) run in fixed element order, so
results are reproducible run to run.
"""

from __future__ import annotations

import csv
from typing import Callable, Literal

import numpy as np

from .sbp import SBPOperator, ScaledOperator, gll_operator, scale_to_element

BCType = Literal["dirichlet", "periodic"]

_VALID_BC = ("dirichlet", "periodic")


def _check_bc(bc: str) -> str:
    if bc not in _VALID_BC:
        raise ValueError(f"bc must be one of {_VALID_BC}, got {bc!r}")
    return bc


class Mesh1D:
    """Partition of an interval into N >= 2 elements sharing one GLL operator."""

    def __init__(self, boundaries, degree: int, bc: BCType,
                 operator: SBPOperator | None = None):
        boundaries = np.asarray(boundaries, dtype=float)
        if boundaries.ndim != 1 or boundaries.size < 3:
            raise ValueError("need at least 2 elements (3 boundary points)")
        if not np.all(np.diff(boundaries) > 0):
            raise ValueError("element boundaries must be strictly increasing")
        self.boundaries = boundaries
        self.bc = _check_bc(bc)
        self.op = operator if operator is not None else gll_operator(degree)
        if self.op.degree != degree:
            raise ValueError("operator degree does not match requested degree")
        self.degree = degree
        self.lengths = np.diff(boundaries)
        self.element_ops: list[ScaledOperator] = [
            scale_to_element(self.op, boundaries[e], boundaries[e + 1])
            for e in range(self.n_elements)
        ]
        # x[e, i]: physical position of node i in element e
        jac = 0.5 * self.lengths[:, None]
        self.node_coords = boundaries[:-1, None] + jac * (self.op.nodes[None, :] + 1.0)
        self.mass = jac * self.op.mass_diag[None, :]
        # per-element scaling factors used by the surface kernels
        self.two_over_h = 2.0 / self.lengths
        self.inv_mass_left = 1.0 / self.mass[:, 0]
        self.inv_mass_right = 1.0 / self.mass[:, -1]

    @property
    def n_elements(self) -> int:
        return self.boundaries.size - 1

    @property
    def n_nodes(self) -> int:
        return self.op.n_nodes

    @property
    def extents(self) -> tuple[float, float]:
        return float(self.boundaries[0]), float(self.boundaries[-1])

    @property
    def field_shape(self) -> tuple[int, ...]:
        return (self.n_elements, self.n_nodes)

    @property
    def dimension(self) -> int:
        return 1

    def zero_field(self) -> np.ndarray:
        return np.zeros(self.field_shape)


class Mesh2D:
    """Tensor product of two 1D meshes with equal polynomial degree."""

    def __init__(self, mesh_x: Mesh1D, mesh_y: Mesh1D):
        if mesh_x.degree != mesh_y.degree:
            raise ValueError("tensor-product mesh requires equal degree in x and y")
        self.mesh_x = mesh_x
        self.mesh_y = mesh_y
        self.degree = mesh_x.degree
        self.mass = (mesh_x.mass[:, None, :, None] * mesh_y.mass[None, :, None, :])

    @property
    def extents(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return self.mesh_x.extents, self.mesh_y.extents

    @property
    def field_shape(self) -> tuple[int, ...]:
        return (self.mesh_x.n_elements, self.mesh_y.n_elements,
                self.mesh_x.n_nodes, self.mesh_y.n_nodes)

    @property
    def dimension(self) -> int:
        return 2

    def zero_field(self) -> np.ndarray:
        return np.zeros(self.field_shape)

    def node_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable (X, Y) coordinate arrays for the full field shape."""
        x = self.mesh_x.node_coords[:, None, :, None]
        y = self.mesh_y.node_coords[None, :, None, :]
        return x, y


def uniform_mesh_1d(x_min: float, x_max: float, n_elements: int, degree: int,
                    bc: BCType) -> Mesh1D:
    """Partition (x_min, x_max) into equal elements."""
    if n_elements < 2:
        raise ValueError("n_elements must be >= 2 (interface coefficients need "
                         "at least one interior interface)")
    if not x_min < x_max:
        raise ValueError(f"empty domain: ({x_min}, {x_max})")
    return Mesh1D(np.linspace(x_min, x_max, n_elements + 1), degree, bc)


def nonuniform_mesh_1d(boundaries, degree: int, bc: BCType) -> Mesh1D:
    """Mesh with explicitly given, strictly increasing element boundaries."""
    return Mesh1D(boundaries, degree, bc)


def geometric_boundaries(x_min: float, x_max: float, n_elements: int,
                         ratio: float) -> np.ndarray:
    """Element boundaries with lengths in geometric progression."""
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    if not x_min < x_max:
        raise ValueError(f"empty domain: ({x_min}, {x_max})")
    factors = ratio ** np.arange(n_elements)
    cuts = np.concatenate([[0.0], np.cumsum(factors)]) / factors.sum()
    return x_min + (x_max - x_min) * cuts


def uniform_mesh_2d(extents, n_elements: int, degree: int,
                    bc_x: BCType, bc_y: BCType | None = None) -> Mesh2D:
    """Square-count tensor mesh on ``((x0, x1), (y0, y1))``."""
    (x0, x1), (y0, y1) = extents
    if bc_y is None:
        bc_y = bc_x
    return Mesh2D(uniform_mesh_1d(x0, x1, n_elements, degree, bc_x),
                  uniform_mesh_1d(y0, y1, n_elements, degree, bc_y))


def _evaluate(f: Callable, coords, shape) -> np.ndarray:
    values = np.asarray(f(*coords), dtype=float)
    if values.shape != shape:
        values = np.broadcast_to(values, shape).copy()
    return values


def interpolate(mesh, f: Callable) -> np.ndarray:
    """Collocate ``f`` at the mesh nodes (1D: ``f(x)``, 2D: ``f(x, y)``)."""
    if mesh.dimension == 1:
        return _evaluate(f, (mesh.node_coords,), mesh.field_shape)
    return _evaluate(f, mesh.node_coords(), mesh.field_shape)


def integrate(mesh, field: np.ndarray) -> float:
    """GLL quadrature of a nodal field over the whole mesh."""
    if field.shape != mesh.field_shape:
        raise ValueError(f"field shape {field.shape} does not match mesh "
                         f"{mesh.field_shape}")
    return float(np.sum(mesh.mass * field))


def inner(mesh, u: np.ndarray, v: np.ndarray) -> float:
    """Mass-weighted discrete L2 inner product."""
    return float(np.sum(mesh.mass * u * v))


def norm(mesh, u: np.ndarray) -> float:
    return float(np.sqrt(max(inner(mesh, u, u), 0.0)))


def mean_value(mesh, u: np.ndarray) -> float:
    """Integral mean of a field (used for periodic mean deflation)."""
    return integrate(mesh, u) / float(np.sum(mesh.mass))


def l2_error(mesh, field: np.ndarray, exact: Callable) -> float:
    """Weighted L2 norm of ``field - exact`` sampled at the nodes."""
    if mesh.dimension == 1:
        ref = _evaluate(exact, (mesh.node_coords,), mesh.field_shape)
    else:
        ref = _evaluate(exact, mesh.node_coords(), mesh.field_shape)
    return norm(mesh, field - ref)


def dump_field(mesh, field: np.ndarray, path) -> None:
    """Write a field as CSV (element and node indices, coordinates, value)."""
    if field.shape != mesh.field_shape:
        raise ValueError("field does not match mesh")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if mesh.dimension == 1:
            writer.writerow(["element_index", "node_index", "x", "value"])
            for e in range(mesh.n_elements):
                for i in range(mesh.n_nodes):
                    writer.writerow([e, i, repr(float(mesh.node_coords[e, i])),
                                     repr(float(field[e, i]))])
        else:
            writer.writerow(["element_index_x", "element_index_y",
                             "node_index_x", "node_index_y", "x", "y", "value"])
            mx, my = mesh.mesh_x, mesh.mesh_y
            for ex in range(mx.n_elements):
                for ey in range(my.n_elements):
                    for ix in range(mx.n_nodes):
                        for iy in range(my.n_nodes):
                            writer.writerow([
                                ex, ey, ix, iy,
                                repr(float(mx.node_coords[ex, ix])),
                                repr(float(my.node_coords[ey, iy])),
                                repr(float(field[ex, ey, ix, iy])),
                            ])


def load_field(mesh, path) -> np.ndarray:
    """Read a field written by :func:`dump_field` back onto ``mesh``."""
    field = np.full(mesh.field_shape, np.nan)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_index = 2 if mesh.dimension == 1 else 4
        if len(header) != n_index + mesh.dimension + 1:
            raise ValueError(f"unexpected column count in {path}")
        for row in reader:
            idx = tuple(int(c) for c in row[:n_index])
            if mesh.dimension == 2:
                idx = (idx[0], idx[1], idx[2], idx[3])
            field[idx] = float(row[-1])
    if np.any(np.isnan(field)):
        raise ValueError(f"{path} does not cover every node of the mesh")
    return field
