"""Micropolar flow solver on a MAC grid with runtime auditing of its
energy-estimate chain."""

from .analysis import (
    DiagnosticsRecord,
    TrajectorySeries,
    energy_ledger,
    gn_audit,
    gradw_ledger,
    gronwall_envelopes,
    h1_norm,
    l4_ledger,
    lp_linf_ledger,
    lp_norm,
    sobolev_seminorm,
)
from .auxfield import AuxFields, build_aux_fields, compute_Q, compute_v, g_residual, v_evolution_residual
from .elliptic import BoundaryFlux, EllipticSolveResult, poisson_dirichlet, poisson_neumann
from .errors import CflCollapseError, ConfigurationError, ConvergenceError, StepSizeError
from .fixedpoint import (
    FixedPointReport,
    MollifierSpec,
    StabilityReport,
    fixed_point_solve,
    mollify,
    solve_ns_linearized,
    solve_transport_linearized,
    uniqueness_probe,
)
from .grid import (
    GridSpec,
    ScalarField,
    VelocityField,
    divergence,
    laplacian,
    laplacian_vec,
    make_grid,
    perp_divergence,
    perp_gradient,
)
from .micropolar import (
    CompatibilityReport,
    DtPolicy,
    FluidParams,
    RunResult,
    SimState,
    advect_w,
    check_compatibility,
    momentum_step,
    run,
    step,
)
from .stokes import (
    StokesSolveResult,
    apply_A_inv_perp,
    leray_project,
    log_gradient_audit,
    stokes_stationary,
    stokes_unsteady_step,
)

__version__ = "0.1.0"
