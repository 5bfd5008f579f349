"""Cyclic coordinate descent for bridge-penalized least squares at one (omega, q)."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg

from . import _backend
from .threshold import Q_MIN, PenaltyPoint, lambda_equivalent, threshold

__all__ = [
    "ProblemInstance",
    "SolveConfig",
    "Solution",
    "objective_value",
    "coordinate_update",
    "coordinate_omega",
    "solve",
    "ridge_closed_form",
]


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Response ``y`` and design ``X`` with cached column statistics.

    Treat as immutable once built; concurrent solves may share one.
    """

    y: np.ndarray
    X: np.ndarray
    col_sq_norms: np.ndarray = field(init=False)
    col_y_products: np.ndarray = field(init=False)

    def __post_init__(self):
        y = np.ascontiguousarray(self.y, dtype=float)
        X = np.asarray(self.X, dtype=float)
        if y.ndim != 1 or X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValueError(f"shape mismatch: X {X.shape}, y {y.shape}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("X and y must be finite")
        sq = np.einsum("ij,ij->j", X, X)
        if np.any(sq <= 0.0):
            bad = np.flatnonzero(sq <= 0.0).tolist()
            raise ValueError(f"zero columns are not allowed: {bad}")
        y.setflags(write=False)
        X = X.copy()
        X.setflags(write=False)
        sq.setflags(write=False)
        xty = X.T @ y
        xty.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "col_sq_norms", sq)
        object.__setattr__(self, "col_y_products", xty)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @cached_property
    def Xt(self) -> np.ndarray:
        """Row-major transpose; the kernels read column j as ``Xt[j]``."""
        return np.ascontiguousarray(self.X.T)


@dataclass
class SolveConfig:
    tol: float = 1e-10
    max_sweeps: int = 10_000
    ordering: np.ndarray | None = None
    boundary_tol: float = 1e-12

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.ordering is not None:
            self.ordering = np.asarray(self.ordering, dtype=np.int64)

    def order_for(self, p: int) -> np.ndarray:
        if self.ordering is None:
            return np.arange(p, dtype=np.int64)
        order = np.ascontiguousarray(self.ordering, dtype=np.int64)
        if order.shape != (p,) or not np.array_equal(np.sort(order), np.arange(p)):
            raise ValueError(f"ordering is not a permutation of range({p})")
        return order


@dataclass
class Solution:
    beta: np.ndarray
    objective: float
    sweeps: int
    updates: int
    converged: bool
    max_increase: float = 0.0


def objective_value(problem: ProblemInstance, beta: np.ndarray, point: PenaltyPoint) -> float:
    """``1/2 ||y - X beta||^2 + (omega^(2-q)/q) sum |beta_j|^q``."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (problem.p,):
        raise ValueError(f"beta has shape {beta.shape}, expected ({problem.p},)")
    r = problem.y - problem.X @ beta
    pen = float(np.sum(np.abs(beta) ** point.q))
    return 0.5 * float(r @ r) + lambda_equivalent(point) * pen


def coordinate_omega(point: PenaltyPoint, col_sq: float) -> float:
    """omega of the scalar subproblem after dividing through by ``x_j'x_j``."""
    if point.q == 2.0:
        return point.omega
    return point.omega * col_sq ** (1.0 / (point.q - 2.0))


def coordinate_update(problem: ProblemInstance, beta: np.ndarray, residual: np.ndarray,
                      j: int, point: PenaltyPoint) -> tuple[float, np.ndarray]:
    """Exactly minimize over coordinate ``j``; ``beta`` and ``residual`` change in place."""
    if not 0 <= j < problem.p:
        raise IndexError(f"coordinate {j} out of range for p={problem.p}")
    xj = problem.Xt[j]
    cj = float(problem.col_sq_norms[j])
    bj = float(xj @ residual) / cj + float(beta[j])
    if point.q == 2.0:
        new = bj * cj / (cj + 1.0)
    else:
        new = threshold(PenaltyPoint(coordinate_omega(point, cj), point.q), bj)
    delta = new - beta[j]
    if delta != 0.0:
        beta[j] = new
        residual -= delta * xj
    return new, residual


def solve(problem: ProblemInstance, point: PenaltyPoint, beta0: np.ndarray | None = None,
          config: SolveConfig | None = None, *, backend: str | None = None,
          instrument: bool = False) -> Solution:
    """Cyclic coordinate descent from ``beta0`` (zeros when omitted).

    Sweeps follow ``config.ordering`` until the largest coefficient change in
    a sweep is at most ``config.tol``; running out of sweeps gives
    ``converged=False`` rather than an error.  With ``instrument`` the
    objective is recomputed from scratch after every update and the largest
    increase is reported in ``Solution.max_increase``.
    """
    if point.q < Q_MIN:
        raise ValueError(f"q={point.q} is below the supported minimum {Q_MIN}")
    config = config or SolveConfig()
    kern = _backend.get_kernel(backend)
    p = problem.p
    beta = np.zeros(p) if beta0 is None else np.array(beta0, dtype=float)
    if beta.shape != (p,) or not np.all(np.isfinite(beta)):
        raise ValueError("beta0 must be a finite vector of length p")
    resid = problem.y - problem.X @ beta
    sweeps, updates, converged, max_inc, failed = kern.cd_run(
        problem.Xt, problem.y, problem.col_sq_norms, beta, resid,
        float(point.omega), float(point.q), config.order_for(p),
        float(config.tol), int(config.max_sweeps), float(config.boundary_tol),
        bool(instrument),
    )
    if failed:
        converged = False
    return Solution(
        beta=beta,
        objective=objective_value(problem, beta, point),
        sweeps=int(sweeps),
        updates=int(updates),
        converged=bool(converged),
        max_increase=float(max_inc),
    )


def ridge_closed_form(problem: ProblemInstance) -> np.ndarray:
    """Solve ``(X'X + I) beta = X'y`` by Cholesky."""
    gram = problem.X.T @ problem.X
    gram[np.diag_indices_from(gram)] += 1.0
    return linalg.cho_solve(linalg.cho_factor(gram), problem.col_y_products)
