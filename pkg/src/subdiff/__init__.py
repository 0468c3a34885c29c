"""Solver and verification tools for semilinear subdiffusion in 1-D.

The package discretizes d^alpha_t u = d_x(D d_x u) + f(x, t, u) on the
unit interval with homogeneous Dirichlet boundaries, using the L1
scheme in time and piecewise-linear finite elements in space, and ships
the measurement harness (convergence orders, error-in-time studies,
power-law fits) plus a command line front end.
"""

from .fem1d import (
    AssemblyError,
    FEFunction,
    Mesh1D,
    NotSPDError,
    TriDiagonalOperator,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    fe_error_norms,
    fe_error_vs_function,
    l2_project,
    make_mesh,
    ritz_project,
    solve_tridiag,
)
from .fraccalc import (
    AccuracyError,
    FracOrder,
    L1Weights,
    caputo_l1_apply,
    caputo_monomial,
    frac_integral_apply,
    gamma,
    l1_weights,
    mittag_leffler,
)
from .harness import (
    OrderStudyResult,
    PowerLawFit,
    TimeErrorSeries,
    aitken_order,
    aitken_p,
    dt_rule,
    emit_report,
    fit_power_law,
    time_error_study,
    worker_count,
)
from .problems import PROBLEM_NAMES, get_problem, verify_manufactured
from .spectral import (
    SineExpansion,
    estimate_smoothness,
    hdot_norm,
    sine_coeffs,
)
from .timestepper import (
    MAX_STEPS,
    STATE_BAND,
    DivergenceError,
    ProblemSpec,
    SolutionHistory,
    TimeGrid,
    extrapolate_state,
    make_time_grid,
    march,
)

__all__ = [
    "AccuracyError",
    "AssemblyError",
    "DivergenceError",
    "FEFunction",
    "FracOrder",
    "L1Weights",
    "MAX_STEPS",
    "Mesh1D",
    "NotSPDError",
    "OrderStudyResult",
    "PROBLEM_NAMES",
    "PowerLawFit",
    "ProblemSpec",
    "STATE_BAND",
    "SineExpansion",
    "SolutionHistory",
    "TimeErrorSeries",
    "TimeGrid",
    "TriDiagonalOperator",
    "aitken_order",
    "aitken_p",
    "assemble_load",
    "assemble_mass",
    "assemble_stiffness",
    "caputo_l1_apply",
    "caputo_monomial",
    "dt_rule",
    "emit_report",
    "estimate_smoothness",
    "extrapolate_state",
    "fe_error_norms",
    "fe_error_vs_function",
    "fit_power_law",
    "frac_integral_apply",
    "gamma",
    "get_problem",
    "hdot_norm",
    "l1_weights",
    "l2_project",
    "make_mesh",
    "make_time_grid",
    "march",
    "mittag_leffler",
    "ritz_project",
    "sine_coeffs",
    "solve_tridiag",
    "time_error_study",
    "verify_manufactured",
    "worker_count",
]

__version__ = "0.1.0"
