"""Pathwise coordinate descent for bridge (lq) penalized least squares.

The penalty is written ``(omega^(2-q)/q) ||beta||_q^q`` so that the scalar
thresholding function is nested in both ``omega`` and ``q``.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

from ._backend import BACKEND
from .data import (
    DataError,
    RawDataset,
    StandardizedDataset,
    load_csv,
    mean_abs_correlation,
    standardize,
    synth_instance,
)
from .pathwise import (
    OmegaGrid,
    QGrid,
    SolutionPath,
    Strategy,
    SurfaceCell,
    base_omega_grid,
    build_omega_grid,
    cold_path_fixed_omega,
    cold_path_fixed_q,
    default_q_grid,
    omega_min,
    path_fixed_omega,
    path_fixed_q,
    surface,
)
from .solver import (
    ProblemInstance,
    Solution,
    SolveConfig,
    coordinate_update,
    objective_value,
    ridge_closed_form,
    solve,
)
from .threshold import (
    PenaltyPoint,
    alpha,
    brute_force_threshold,
    gamma,
    lambda_equivalent,
    omega_from_lambda,
    omega_zero_bound,
    phi_root,
    q_tilde,
    threshold,
)

__all__ = [name for name in dir() if not name.startswith("_")]
