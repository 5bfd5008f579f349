"""CSV ingestion, centering/scaling, and synthetic instances."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .solver import ProblemInstance

__all__ = [
    "DataError",
    "RawDataset",
    "StandardizedDataset",
    "load_csv",
    "standardize",
    "synth_instance",
    "mean_abs_correlation",
]


class DataError(ValueError):
    """Raised for unreadable or unusable input data."""


@dataclass(frozen=True)
class RawDataset:
    name: str
    columns: dict[str, np.ndarray]
    response_name: str

    @property
    def feature_names(self) -> list[str]:
        return [k for k in self.columns if k != self.response_name]

    @property
    def n(self) -> int:
        return len(self.columns[self.response_name])

    @property
    def p(self) -> int:
        return len(self.feature_names)

    def design(self) -> tuple[np.ndarray, np.ndarray]:
        X = np.column_stack([self.columns[k] for k in self.feature_names])
        return X, np.asarray(self.columns[self.response_name], dtype=float)


@dataclass(frozen=True)
class StandardizedDataset:
    name: str
    problem: ProblemInstance
    feature_names: list[str]
    x_center: np.ndarray
    x_scale: np.ndarray
    y_center: float
    y_scale: float

    def to_original(self, beta: np.ndarray) -> tuple[float, np.ndarray]:
        """Map standardized coefficients to ``(intercept, slopes)`` on raw scales."""
        slopes = np.asarray(beta, dtype=float) * self.y_scale / self.x_scale
        return self.y_center - float(self.x_center @ slopes), slopes

    def standardize_X(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.x_center) / self.x_scale


def _check_constant(name: str, col: np.ndarray) -> None:
    if np.ptp(col) == 0.0:
        raise DataError(f"column {name!r} is constant")


def load_csv(path: str | Path, response_name: str) -> RawDataset:
    """Read a headed, comma-delimited numeric CSV file.

    Blank lines are skipped; everything else must parse as a finite float.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise DataError(f"duplicate column names in {path}")
    if response_name not in header:
        raise DataError(f"response column {response_name!r} not found in {path}")
    body = rows[1:]
    if len(body) < 2:
        raise DataError(f"{path} needs at least two data rows")
    data = np.empty((len(body), len(header)))
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{i}: expected {len(header)} fields, got {len(row)}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}:{i}: non-numeric value {cell!r} in column {header[j]!r}") from None
            if not math.isfinite(v):
                raise DataError(f"{path}:{i}: non-finite value in column {header[j]!r}")
            data[i - 2, j] = v
    columns = {name: data[:, j].copy() for j, name in enumerate(header)}
    for name, col in columns.items():
        _check_constant(name, col)
    return RawDataset(path.stem, columns, response_name)


def _center_scale(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    center = a.mean(axis=0)
    scale = a.std(axis=0, ddof=1)
    return (a - center) / scale, center, scale


def standardize(raw: RawDataset) -> StandardizedDataset:
    """Center to mean 0 and scale to unit sample sd (denominator n - 1)."""
    X, y = raw.design()
    for name, col in zip(raw.feature_names, X.T):
        _check_constant(name, col)
    _check_constant(raw.response_name, y)
    Xs, xc, xs = _center_scale(X)
    ys, yc, ysc = _center_scale(y)
    return StandardizedDataset(raw.name, ProblemInstance(ys, Xs), raw.feature_names,
                               xc, xs, float(yc), float(ysc))


def _from_arrays(name: str, X: np.ndarray, y: np.ndarray) -> RawDataset:
    cols = {f"x{j + 1}": X[:, j] for j in range(X.shape[1])}
    cols["y"] = y
    return RawDataset(name, cols, "y")


def synth_instance(seed: int, n: int = 100, p: int = 50, sparsity: int = 5,
                   correlation_rho: float = 0.3, noise_sd: float = 1.0) -> StandardizedDataset:
    """Equicorrelated Gaussian design with a sparse alternating-sign truth.

    ``X = sqrt(rho) z + sqrt(1 - rho) E`` row-wise, ``beta`` has ``sparsity``
    leading entries of +1, -1, +1, ... and ``y = X beta + noise``.
    """
    if n < 2 or p < 1:
        raise ValueError("need n >= 2 and p >= 1")
    if not 0 <= sparsity <= p:
        raise ValueError("sparsity must lie in [0, p]")
    if not 0.0 <= correlation_rho < 1.0:
        raise ValueError("correlation_rho must lie in [0, 1)")
    if noise_sd < 0:
        raise ValueError("noise_sd must be nonnegative")
    rng = np.random.default_rng(seed)
    shared = rng.standard_normal((n, 1))
    X = math.sqrt(correlation_rho) * shared + math.sqrt(1.0 - correlation_rho) * rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[:sparsity] = np.where(np.arange(sparsity) % 2 == 0, 1.0, -1.0)
    y = X @ beta + noise_sd * rng.standard_normal(n)
    name = f"synth-n{n}-p{p}-s{sparsity}-rho{correlation_rho:g}-seed{seed}"
    return standardize(_from_arrays(name, X, y))


def mean_abs_correlation(dataset) -> float:
    """Average ``|cor(x_i, x_j)|`` over ordered pairs ``i != j``."""
    if isinstance(dataset, StandardizedDataset):
        X = dataset.problem.X
    elif isinstance(dataset, RawDataset):
        X = dataset.design()[0]
    else:
        X = np.asarray(dataset, dtype=float)
    p = X.shape[1]
    if p < 2:
        raise ValueError("need at least two covariates")
    C = np.corrcoef(X, rowvar=False)
    return float((np.abs(C).sum() - np.trace(np.abs(C))) / (p * (p - 1)))
