"""Grids, warm/cold path strategies and regularization surfaces."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .solver import (
    ProblemInstance,
    Solution,
    SolveConfig,
    objective_value,
    ridge_closed_form,
    solve,
)
from .threshold import PenaltyPoint, _log_alpha_factor

__all__ = [
    "Axis",
    "GridOrigin",
    "Strategy",
    "OmegaGrid",
    "QGrid",
    "SolutionPath",
    "SurfaceCell",
    "omega_min",
    "base_omega_grid",
    "build_omega_grid",
    "fixed_q_grid_for",
    "default_q_grid",
    "path_fixed_q",
    "path_fixed_omega",
    "cold_path_fixed_q",
    "cold_path_fixed_omega",
    "surface",
]


class Axis(enum.Enum):
    Omega = "omega"
    Q = "q"


class GridOrigin(enum.Enum):
    FromOmegaMin = "from_omega_min"
    UserSupplied = "user_supplied"


class Strategy(str, enum.Enum):
    WarmFixedQ = "warm_fixed_q"
    ColdFixedQ = "cold_fixed_q"
    WarmFixedOmega = "warm_fixed_omega"
    ColdFixedOmega = "cold_fixed_omega"

    @property
    def fixed_q(self) -> bool:
        return self in (Strategy.WarmFixedQ, Strategy.ColdFixedQ)

    @property
    def warm(self) -> bool:
        return self in (Strategy.WarmFixedQ, Strategy.WarmFixedOmega)


@dataclass(frozen=True)
class OmegaGrid:
    values: np.ndarray
    origin: GridOrigin = GridOrigin.UserSupplied

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("omega grid must be a non-empty 1-d array")
        if np.any(v <= 0) or np.any(np.diff(v) >= 0):
            raise ValueError("omega grid must be positive and strictly decreasing")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class QGrid:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("q grid must be a non-empty 1-d array")
        if v[0] != 2.0:
            raise ValueError("q grid must start at 2")
        if np.any(v <= 0) or np.any(v > 2) or np.any(np.diff(v) >= 0):
            raise ValueError("q grid must be decreasing within (0, 2]")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


@dataclass
class SolutionPath:
    """Solutions along one grid axis; ``columns`` is the p x k array B."""

    axis: Axis
    fixed: float
    grid: np.ndarray
    columns: np.ndarray
    per_column: list[Solution] = field(default_factory=list)

    @property
    def total_updates(self) -> int:
        return sum(s.updates for s in self.per_column)

    @property
    def all_converged(self) -> bool:
        return all(s.converged for s in self.per_column)

    def point(self, l: int) -> PenaltyPoint:
        if self.axis is Axis.Omega:
            return PenaltyPoint(float(self.grid[l]), self.fixed)
        return PenaltyPoint(self.fixed, float(self.grid[l]))


@dataclass
class SurfaceCell:
    omega: float
    q: float
    beta: np.ndarray
    objective: float
    updates: int
    converged: bool = True
    max_increase: float = 0.0


def omega_min(q: float, problem: ProblemInstance) -> float:
    """Smallest omega keeping CD from zero at zero (q <= 1); max |x_j'y| otherwise."""
    if not (0.0 < q <= 2.0):
        raise ValueError(f"q must lie in (0, 2], got {q!r}")
    xty = np.abs(problem.col_y_products)
    if q > 1.0:
        return float(xty.max())
    scale = problem.col_sq_norms ** ((q - 1.0) / (2.0 - q))
    return float(np.max(scale * xty) * math.exp(-_log_alpha_factor(q)))


def base_omega_grid(problem: ProblemInstance, k: int = 20, floor: float = 1e-7) -> np.ndarray:
    """``k`` log-equispaced values from omega_min(1) down to ``floor``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    top = omega_min(1.0, problem)
    if not (0.0 < floor < top):
        raise ValueError(f"floor must lie in (0, {top}), got {floor!r}")
    grid = np.geomspace(top, floor, k)
    grid[0], grid[-1] = top, floor
    return grid


def build_omega_grid(problem: ProblemInstance, q: float, k: int = 20,
                     floor: float = 1e-7) -> OmegaGrid:
    """omega_min(q) followed by the base-grid values strictly below it."""
    head = omega_min(q, problem)
    base = base_omega_grid(problem, k, floor)
    return OmegaGrid(np.concatenate([[head], base[base < head]]), GridOrigin.FromOmegaMin)


def default_q_grid(k: int = 20, q_min: float = 0.1) -> QGrid:
    # rounding keeps q == 1 exact so the soft-threshold branch is taken
    return QGrid(np.round(np.linspace(2.0, q_min, k), 12))


def _as_omega_grid(grid) -> OmegaGrid:
    return grid if isinstance(grid, OmegaGrid) else OmegaGrid(np.asarray(grid, dtype=float))


def _as_q_grid(grid) -> QGrid:
    return grid if isinstance(grid, QGrid) else QGrid(np.asarray(grid, dtype=float))


def _assemble(axis, fixed, grid, sols) -> SolutionPath:
    cols = np.column_stack([s.beta for s in sols]) if sols else np.empty((0, 0))
    return SolutionPath(axis, float(fixed), np.asarray(grid, dtype=float), cols, list(sols))


def _ridge_solution(problem: ProblemInstance, omega: float) -> Solution:
    beta = ridge_closed_form(problem)
    return Solution(beta, objective_value(problem, beta, PenaltyPoint(omega, 2.0)), 0, 0, True)


def path_fixed_q(problem: ProblemInstance, q: float, grid, config: SolveConfig | None = None,
                 *, backend: str | None = None, instrument: bool = False) -> SolutionPath:
    """Warm-started path over decreasing omega at fixed ``q``.

    The first column is solved from zero; each later one from its
    predecessor.  Non-converged columns are flagged, never fatal.
    """
    grid = _as_omega_grid(grid)
    sols = []
    beta = np.zeros(problem.p)
    for omega in grid.values:
        sol = solve(problem, PenaltyPoint(float(omega), q), beta, config,
                    backend=backend, instrument=instrument)
        sols.append(sol)
        beta = sol.beta
    return _assemble(Axis.Omega, q, grid.values, sols)


def cold_path_fixed_q(problem: ProblemInstance, q: float, grid, config: SolveConfig | None = None,
                      *, backend: str | None = None, instrument: bool = False) -> SolutionPath:
    grid = _as_omega_grid(grid)
    zero = np.zeros(problem.p)
    sols = [solve(problem, PenaltyPoint(float(w), q), zero, config,
                  backend=backend, instrument=instrument) for w in grid.values]
    return _assemble(Axis.Omega, q, grid.values, sols)


def path_fixed_omega(problem: ProblemInstance, omega: float, grid, config: SolveConfig | None = None,
                     *, backend: str | None = None, instrument: bool = False) -> SolutionPath:
    """Warm-started path over decreasing q from the ridge solution at q=2."""
    grid = _as_q_grid(grid)
    sols = [_ridge_solution(problem, omega)]
    beta = sols[0].beta
    for q in grid.values[1:]:
        sol = solve(problem, PenaltyPoint(omega, float(q)), beta, config,
                    backend=backend, instrument=instrument)
        sols.append(sol)
        beta = sol.beta
    return _assemble(Axis.Q, omega, grid.values, sols)


def cold_path_fixed_omega(problem: ProblemInstance, omega: float, grid,
                          config: SolveConfig | None = None, *, backend: str | None = None,
                          instrument: bool = False) -> SolutionPath:
    grid = _as_q_grid(grid)
    start = ridge_closed_form(problem)
    sols = [solve(problem, PenaltyPoint(omega, float(q)), start, config,
                  backend=backend, instrument=instrument) for q in grid.values]
    return _assemble(Axis.Q, omega, grid.values, sols)


def fixed_q_grid_for(problem: ProblemInstance, q: float, lattice: np.ndarray) -> np.ndarray:
    """Path grid used on a surface: omega_min(q) then the lattice values below it."""
    head = omega_min(q, problem)
    return np.concatenate([[head], lattice[lattice < head]])


def surface(problem: ProblemInstance, omega_grid, q_grid, strategy: Strategy | str,
            config: SolveConfig | None = None, *, backend: str | None = None,
            instrument: bool = False) -> list[SurfaceCell]:
    """Run ``strategy`` over every line of the omega x q lattice.

    Cells are returned omega-major in lattice order.  Under the fixed-q
    strategies, lattice cells at or above omega_min(q) for q <= 1 are the
    exact zero vector; for q > 1 such cells get a cold solve from zero.
    """
    strategy = Strategy(strategy)
    lattice = _as_omega_grid(omega_grid).values
    qs = np.asarray(q_grid.values if isinstance(q_grid, QGrid) else q_grid, dtype=float)
    cells: dict[tuple[int, int], SurfaceCell] = {}

    if strategy.fixed_q:
        runner = path_fixed_q if strategy.warm else cold_path_fixed_q
        zero = np.zeros(problem.p)
        for iq, q in enumerate(qs):
            q = float(q)
            pgrid = fixed_q_grid_for(problem, q, lattice)
            path = runner(problem, q, pgrid, config, backend=backend, instrument=instrument)
            by_omega = {float(w): s for w, s in zip(pgrid, path.per_column)}
            for iw, w in enumerate(lattice):
                w = float(w)
                sol = by_omega.get(w)
                if sol is None and q <= 1.0:
                    sol = Solution(zero.copy(), 0.5 * float(problem.y @ problem.y), 0, 0, True)
                elif sol is None:
                    sol = solve(problem, PenaltyPoint(w, q), zero, config,
                                backend=backend, instrument=instrument)
                cells[iw, iq] = SurfaceCell(w, q, sol.beta, sol.objective, sol.updates,
                                            sol.converged, sol.max_increase)
    else:
        if qs.size == 0 or qs[0] != 2.0:
            raise ValueError("fixed-omega strategies need a q grid starting at 2")
        runner = path_fixed_omega if strategy.warm else cold_path_fixed_omega
        for iw, w in enumerate(lattice):
            path = runner(problem, float(w), qs, config, backend=backend, instrument=instrument)
            for iq, (q, sol) in enumerate(zip(qs, path.per_column)):
                cells[iw, iq] = SurfaceCell(float(w), float(q), sol.beta, sol.objective,
                                            sol.updates, sol.converged, sol.max_increase)
    return [cells[iw, iq] for iw in range(lattice.size) for iq in range(qs.size)]
