"""Scalar mode-thresholding for the omega-parameterized bridge penalty.

The scalar problem is

    h(omega, q; b) = argmin_beta  1/2 (b - beta)^2 + (omega^(2-q) / q) |beta|^q

for 0 < q <= 2.  Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PenaltyPoint",
    "Branch",
    "ThresholdDiagnostics",
    "ConvergenceError",
    "Q_MIN",
    "alpha",
    "gamma",
    "phi_root",
    "threshold",
    "threshold_diagnostics",
    "soft_threshold",
    "omega_zero_bound",
    "q_tilde",
    "lambda_equivalent",
    "omega_from_lambda",
    "brute_force_threshold",
]

#: smallest exponent accepted by the thresholding routines
Q_MIN = 0.01
BOUNDARY_TOL = 1e-12
MAX_ITER = 200
_EPS = float(np.finfo(float).eps)


class ConvergenceError(RuntimeError):
    """The safeguarded root finder hit its iteration cap."""


@dataclass(frozen=True)
class PenaltyPoint:
    """A point ``(omega, q)`` on the regularization surface."""

    omega: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega >= 0.0):
            raise ValueError(f"omega must be finite and >= 0, got {self.omega!r}")
        if not (0.0 < self.q <= 2.0):
            raise ValueError(f"q must lie in (0, 2], got {self.q!r}")

    @property
    def lam(self) -> float:
        return lambda_equivalent(self)


class Branch(enum.Enum):
    Zero = "zero"
    Boundary = "boundary"
    NonzeroClosedForm = "nonzero_closed_form"
    NonzeroRoot = "nonzero_root"


@dataclass(frozen=True)
class ThresholdDiagnostics:
    value: float
    alpha: float
    gamma: float
    branch: Branch


def _check_point(point: PenaltyPoint) -> None:
    if point.q < Q_MIN:
        raise ValueError(f"q={point.q} is below the supported minimum {Q_MIN}")


def _check_sub_one(q: float) -> None:
    if not (0.0 < q <= 1.0):
        raise ValueError(f"q must lie in (0, 1], got {q!r}")


def _log_alpha_factor(q: float) -> float:
    """log of alpha(1, q) = (2(1-q))^((q-1)/(2-q)) (2-q) q^(1/(q-2)).

    At q == 1 the first factor is the 0^0 limit, i.e. 1.
    """
    tail = 0.0 if q == 1.0 else (q - 1.0) / (2.0 - q) * math.log(2.0 * (1.0 - q))
    return tail + math.log(2.0 - q) - math.log(q) / (2.0 - q)


def alpha(point: PenaltyPoint) -> float:
    """Threshold on ``|b|`` below which ``h`` is exactly zero (q <= 1)."""
    _check_sub_one(point.q)
    return point.omega * math.exp(_log_alpha_factor(point.q))


def gamma(point: PenaltyPoint) -> float:
    """Magnitude of the nonzero minimizer at ``|b| == alpha`` (q <= 1).

    Uses the omega-linear form ``omega (2(1-q)/q)^(1/(2-q))``.
    """
    _check_sub_one(point.q)
    if point.q == 1.0:
        return 0.0
    return point.omega * math.exp(math.log(2.0 * (1.0 - point.q) / point.q) / (2.0 - point.q))


def omega_zero_bound(q: float, b: float) -> float:
    """Bound ``B(q, b)`` with ``omega > B`` implying ``h(omega, q; b) == 0``."""
    _check_sub_one(q)
    return abs(b) * math.exp(-_log_alpha_factor(q))


def q_tilde(ratio: float) -> float:
    """Infimum exponent below which ``h`` at ``omega/|b| == ratio`` is zero.

    ``1/alpha(1, q)`` is strictly increasing on (0, 1] with value 1 at q=1,
    so the infimum is the solution of ``1/alpha(1, q) == ratio`` when
    ``ratio < 1`` and 1 otherwise.
    """
    if not ratio > 0.0:
        raise ValueError(f"ratio must be positive, got {ratio!r}")
    if ratio >= 1.0:
        return 1.0
    target = math.log(ratio)
    lo, hi = 0.0, 1.0
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if -_log_alpha_factor(mid) > target:
            hi = mid
        else:
            lo = mid
    return hi


def lambda_equivalent(point: PenaltyPoint) -> float:
    """Penalty weight ``omega^(2-q)/q`` of the original lambda form."""
    if point.q == 2.0:
        return 0.5
    return point.omega ** (2.0 - point.q) / point.q


def omega_from_lambda(lam: float, q: float) -> float:
    """Inverse of :func:`lambda_equivalent`; undefined at q == 2."""
    if not (0.0 < q < 2.0):
        raise ValueError(f"inverse map needs 0 < q < 2, got q={q!r}")
    if lam < 0.0:
        raise ValueError("lambda must be nonnegative")
    return (q * lam) ** (1.0 / (2.0 - q))


def soft_threshold(b: float, t: float) -> float:
    return math.copysign(max(abs(b) - t, 0.0), b) if b != 0.0 else 0.0


def _newton_from_above(f, fprime, lo: float, hi: float, what: str, log_scale: bool = False) -> float:
    """Safeguarded Newton for an increasing convex ``f`` with f(lo) <= 0 <= f(hi).

    ``f`` returns the value and the magnitude of its terms; iteration stops
    once the value is at rounding level relative to that magnitude.

    Starting from ``hi`` the Newton iterates decrease monotonically; the
    bisection fallback only triggers on rounding trouble.  ``log_scale``
    makes the step test absolute near zero, as it should be for x = log(phi).
    """
    x = hi
    for _ in range(MAX_ITER):
        fx, size = f(x)
        if abs(fx) <= 8.0 * _EPS * size:
            return x
        if fx > 0.0:
            hi = x
        else:
            lo = x
        d = fprime(x)
        xn = x - fx / d if d > 0.0 else lo - 1.0
        if not (lo <= xn <= hi):
            xn = 0.5 * (lo + hi)
        scale = max(abs(x), 1.0) if log_scale else abs(x)
        if abs(xn - x) <= 8.0 * _EPS * scale:
            return xn
        x = xn
    raise ConvergenceError(f"root finder for {what} did not converge in {MAX_ITER} iterations")


def _phi_sub_one(c: float, q: float, b_abs: float, lo: float) -> float:
    # f(phi) = phi + c phi^(q-1) - |b| is convex and increasing on [lo, |b|]
    def f(x):
        t = c * x ** (q - 1.0)
        return x + t - b_abs, x + t + b_abs

    def fp(x):
        return 1.0 + (q - 1.0) * c * x ** (q - 2.0)

    return _newton_from_above(f, fp, lo, b_abs, "phi (q < 1)")


def _phi_super_one(c: float, q: float, b_abs: float) -> float:
    # in u = log(phi): F(u) = e^u + c e^((q-1)u) - |b|, convex and increasing
    u_hi = math.log(b_abs)
    u_lo = math.log(0.5 * b_abs)
    if c > 0.0:
        u_lo = min(u_lo, (math.log(0.5 * b_abs) - math.log(c)) / (q - 1.0))
    if u_lo < -740.0:
        # the root underflows; clamp so the result is the nearest double
        u_lo = -740.0
        if math.exp(u_lo) + c * math.exp((q - 1.0) * u_lo) > b_abs:
            return 0.0

    def f(u):
        t = math.exp(u) + c * math.exp((q - 1.0) * u)
        return t - b_abs, t + b_abs

    def fp(u):
        return math.exp(u) + (q - 1.0) * c * math.exp((q - 1.0) * u)

    return math.exp(_newton_from_above(f, fp, u_lo, u_hi, "phi (q > 1)", log_scale=True))


def phi_root(point: PenaltyPoint, b_abs: float) -> float:
    """Largest root of ``phi + omega (phi/omega)^(q-1) == b_abs``."""
    q, omega = point.q, point.omega
    if q == 1.0:
        raise ValueError("phi_root is not defined at q == 1")
    if q == 2.0:
        return 0.5 * b_abs
    if not b_abs > 0.0:
        raise ValueError(f"b_abs must be positive, got {b_abs!r}")
    if omega == 0.0:
        return b_abs
    c = omega ** (2.0 - q)
    if q < 1.0:
        if b_abs <= alpha(point):
            raise ValueError("phi_root needs b_abs > alpha(point) when q < 1")
        return _phi_sub_one(c, q, b_abs, gamma(point))
    return _phi_super_one(c, q, b_abs)


def threshold_diagnostics(
    point: PenaltyPoint, b: float, boundary_tol: float = BOUNDARY_TOL
) -> ThresholdDiagnostics:
    """Evaluate ``h(omega, q; b)`` along with the branch that produced it."""
    _check_point(point)
    if not math.isfinite(b):
        raise ValueError(f"b must be finite, got {b!r}")
    q, omega = point.q, point.omega
    if q <= 1.0:
        a, g = alpha(point), gamma(point)
    else:
        a, g = 0.0, 0.0
    if b == 0.0:
        return ThresholdDiagnostics(0.0, a, g, Branch.Zero)
    b_abs = abs(b)
    if q == 2.0:
        return ThresholdDiagnostics(0.5 * b, a, g, Branch.NonzeroClosedForm)
    if q == 1.0:
        value = soft_threshold(b, omega)
        branch = Branch.Zero if value == 0.0 else Branch.NonzeroClosedForm
        return ThresholdDiagnostics(value, a, g, branch)
    if omega == 0.0:
        return ThresholdDiagnostics(b, a, g, Branch.NonzeroClosedForm)
    if q < 1.0:
        if b_abs < a * (1.0 - boundary_tol):
            return ThresholdDiagnostics(0.0, a, g, Branch.Zero)
        if b_abs <= a * (1.0 + boundary_tol):
            return ThresholdDiagnostics(0.0, a, g, Branch.Boundary)
        phi = _phi_sub_one(omega ** (2.0 - q), q, b_abs, g)
    else:
        phi = _phi_super_one(omega ** (2.0 - q), q, b_abs)
    return ThresholdDiagnostics(math.copysign(phi, b), a, g, Branch.NonzeroRoot)


def threshold(point: PenaltyPoint, b: float, boundary_tol: float = BOUNDARY_TOL) -> float:
    """Global minimizer of ``1/2 (b - beta)^2 + (omega^(2-q)/q) |beta|^q``.

    At the two-minimizer boundary ``|b| == alpha`` (q < 1) zero is returned.

    >>> threshold(PenaltyPoint(0.5, 1.0), 2.0)
    1.5
    >>> threshold(PenaltyPoint(7.0, 2.0), 1.0)
    0.5
    """
    return threshold_diagnostics(point, b, boundary_tol).value


def brute_force_threshold(
    point: PenaltyPoint,
    b: float,
    grid_half_width: float | None = None,
    grid_points: int = 100_001,
) -> float:
    """Grid-search minimizer of the scalar objective (test oracle only).

    Evaluates a uniform grid on ``[-w, w]`` and then one refined grid over
    the two cells around the best point.  Zero is always a candidate.
    """
    if grid_points < 10_000:
        raise ValueError("grid_points must be at least 1e4")
    if grid_half_width is None:
        grid_half_width = abs(b) + 1.0
    q = point.q
    lam = point.omega ** (2.0 - q) / q

    def objective(beta):
        return 0.5 * (b - beta) ** 2 + lam * np.abs(beta) ** q

    grid = np.linspace(-grid_half_width, grid_half_width, grid_points)
    grid = np.append(grid, 0.0)
    vals = objective(grid)
    k = int(np.argmin(vals))
    step = 2.0 * grid_half_width / (grid_points - 1)
    fine = np.linspace(grid[k] - step, grid[k] + step, grid_points)
    fine = np.append(fine, [0.0, grid[k]])
    fvals = objective(fine)
    return float(fine[int(np.argmin(fvals))])
