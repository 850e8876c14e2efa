"""Proximal method of multipliers with a semismooth Newton inner solver.

Composite convex problems min f(x) + phi(E x) with closed-form proximal
operators, an augmented-Lagrangian outer loop, and ADMM / forward-backward
Newton baselines. See the C++ headers for the full API documentation; this
package re-exports the compiled core.
"""

from ._core import (
    EXIT_ERROR,
    EXIT_NOT_CONVERGED,
    EXIT_SOLVED,
    AdmmResult,
    ConvergenceTrace,
    CSchedule,
    EpsSchedule,
    FbnConfig,
    FbnResult,
    Image,
    InnerConfig,
    InnerResult,
    IterateState,
    JacobianElement,
    KktResidual,
    LinearOperator,
    OuterConfig,
    Problem,
    ProxSpec,
    RunConfig,
    SmoothSpec,
    SolveResult,
    SolveStatus,
    TraceRow,
    admm_solve,
    alm_solve,
    aug_lagrangian_grad_x,
    aug_lagrangian_value,
    build_l1tv,
    build_lasso,
    conjugate_prox,
    envelope_eval,
    fb_envelope_value,
    fb_newton_solve,
    kkt_residual,
    newton_solve,
    parse_run_config,
    parse_run_config_text,
    phi_value,
    pmm_solve,
    prox_eval,
    prox_jacobian,
    read_pgm,
    run,
    run_config_file,
    salt_pepper_noise,
    trace_csv,
    write_pgm,
)

__version__ = "0.1.0"

__all__ = [
    "EXIT_ERROR",
    "EXIT_NOT_CONVERGED",
    "EXIT_SOLVED",
    "AdmmResult",
    "ConvergenceTrace",
    "CSchedule",
    "EpsSchedule",
    "FbnConfig",
    "FbnResult",
    "Image",
    "InnerConfig",
    "InnerResult",
    "IterateState",
    "JacobianElement",
    "KktResidual",
    "LinearOperator",
    "OuterConfig",
    "Problem",
    "ProxSpec",
    "RunConfig",
    "SmoothSpec",
    "SolveResult",
    "SolveStatus",
    "TraceRow",
    "admm_solve",
    "alm_solve",
    "aug_lagrangian_grad_x",
    "aug_lagrangian_value",
    "build_l1tv",
    "build_lasso",
    "conjugate_prox",
    "envelope_eval",
    "fb_envelope_value",
    "fb_newton_solve",
    "kkt_residual",
    "newton_solve",
    "parse_run_config",
    "parse_run_config_text",
    "phi_value",
    "pmm_solve",
    "prox_eval",
    "prox_jacobian",
    "read_pgm",
    "run",
    "run_config_file",
    "salt_pepper_noise",
    "trace_csv",
    "write_pgm",
]
