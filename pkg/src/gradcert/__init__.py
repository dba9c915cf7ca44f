"""Gradient methods under restricted curvature conditions.

Solvers (plain, accelerated, restarted, adaptive), an oracle zoo with known
secant/Lipschitz constants, numerical certification of per-iteration rate
bounds, and linearized-Bregman sparse recovery.
"""

from .numkit import (
    GaussianStream,
    SpectralSummary,
    gaussian_stream,
    jacobi_eigh,
    least_squares_min_norm,
    matvec,
    spectral_norm_sq,
    sym_eig_summary,
)
from .oracles import (
    KnownConstants,
    Objective,
    compose_constants,
    finite_diff_check,
    make_augl1_dual,
    make_example_1d,
    make_quadratic_composite,
    shrink,
)
from .solvers import (
    SolverConfig,
    SolverTrace,
    gradient_descent,
    nesterov,
    nesterov_adaptive,
    nesterov_restart_fixed,
    theta_step,
)
from .certify import (
    BoundReport,
    ConstantEstimate,
    GridOptimum,
    RateFit,
    appendix_grid,
    check_bounds,
    converse_secant,
    estimate_rlg,
    estimate_rsi,
    fit_rate,
)
from .sparse_recovery import (
    RecoveryResult,
    SparseProblem,
    gen_sparse_problem,
    lbreg_step,
    recover,
)

__version__ = "0.1.0"
