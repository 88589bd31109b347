"""Poisson solver built on nodal DG-SBP operators and hyperbolic-diffusion
upwind fluxes, with element-local evaluation of the superconvergent discrete
gradient."""

from .convergence import (
    ConvergenceReport,
    LevelResult,
    ProblemSetup,
    builtin_setup,
    emit_report,
    eoc_values,
    run_convergence,
)
from .elliptic import EllipticOperator, RelaxationTime, relaxation_time
from .gradient import (
    InterfaceCoeffs,
    implicit_gradient_oracle,
    interface_coeffs,
    local_gradient_1d,
    local_gradient_2d,
)
from .mesh import (
    Mesh1D,
    Mesh2D,
    dump_field,
    geometric_boundaries,
    inner,
    integrate,
    interpolate,
    l2_error,
    load_field,
    mean_value,
    nonuniform_mesh_1d,
    norm,
    uniform_mesh_1d,
    uniform_mesh_2d,
)
from .relaxation import (
    MarchConfig,
    MarchError,
    RelaxState,
    march_to_steady,
    semidiscrete_rhs,
    time_step,
    zero_state,
)
from .sbp import (
    SBPOperator,
    ScaledOperator,
    format_operator,
    gll_operator,
    mass_corner,
    scale_to_element,
)
from .solvers import (
    DivergenceError,
    NonConvergenceError,
    SolveReport,
    assemble_dense,
    solve_cg,
    solve_direct_1d,
)

__version__ = "0.1.0"
