"""Warm-versus-cold benchmark over random covariate orderings.

For every dataset and ordering the four strategies run on a shared
omega x q lattice.  Timing is reported both as wall time and as the number
of coordinate updates; the latter is hardware independent.  Solution
quality is compared per lattice cell: a strategy "agrees" at a cell when
its objective is within ``agreement_tol`` of the lowest objective any
strategy reached at that cell with the same ordering.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import StandardizedDataset
from .pathwise import Strategy, base_omega_grid, default_q_grid, surface
from .solver import SolveConfig

__all__ = [
    "BenchRecord",
    "AgreementRow",
    "BenchResult",
    "orderings",
    "run_bench",
    "agreement",
    "timing_ratios",
    "write_bench",
]

STRATEGIES = (Strategy.WarmFixedQ, Strategy.ColdFixedQ,
              Strategy.WarmFixedOmega, Strategy.ColdFixedOmega)
PAIRS = (("fixed_q", Strategy.WarmFixedQ, Strategy.ColdFixedQ),
         ("fixed_omega", Strategy.WarmFixedOmega, Strategy.ColdFixedOmega))


@dataclass
class BenchRecord:
    dataset: str
    strategy: Strategy
    ordering_seed: int
    wall_time_s: float
    total_updates: int
    cells: list[tuple[float, float, float]] = field(default_factory=list)
    nonconverged: int = 0


@dataclass
class AgreementRow:
    dataset: str
    strategy: Strategy
    proportion: float
    convex_proportion: float
    nonconvex_proportion: float
    n_cells: int


@dataclass
class BenchResult:
    records: list[BenchRecord]
    omega_grids: dict[str, list[float]]
    q_grid: list[float]
    ordering_seeds: list[int]
    agreement_tol: float

    def by_key(self) -> dict[tuple[str, int, Strategy], BenchRecord]:
        return {(r.dataset, r.ordering_seed, r.strategy): r for r in self.records}


def orderings(p: int, seeds: list[int]) -> list[np.ndarray]:
    """One Fisher-Yates permutation of ``range(p)`` per seed.

    Each seed drives its own PCG64 stream; a permutation that repeats an
    earlier one is redrawn from the same stream while distinct
    permutations remain.
    """
    seen: set[tuple[int, ...]] = set()
    out = []
    distinct = math.factorial(p) if p <= 20 else None
    for s in seeds:
        rng = np.random.default_rng(s)
        perm = rng.permutation(p)
        while tuple(perm) in seen and (distinct is None or len(seen) < distinct):
            perm = rng.permutation(p)
        seen.add(tuple(perm))
        out.append(perm.astype(np.int64))
    return out


def run_bench(datasets: list[StandardizedDataset], ordering_seeds: list[int], *,
              k_omega: int = 20, floor: float = 1e-7, k_q: int = 20, q_min: float = 0.1,
              config: SolveConfig | None = None, agreement_tol: float = 1e-7,
              backend: str | None = None) -> BenchResult:
    config = config or SolveConfig()
    qgrid = default_q_grid(k_q, q_min)
    records = []
    omega_grids = {}
    for ds in datasets:
        prob = ds.problem
        lattice = base_omega_grid(prob, k_omega, floor)
        omega_grids[ds.name] = lattice.tolist()
        for seed, order in zip(ordering_seeds, orderings(prob.p, ordering_seeds)):
            cfg = SolveConfig(config.tol, config.max_sweeps, order, config.boundary_tol)
            for strat in STRATEGIES:
                t0 = time.perf_counter()
                cells = surface(prob, lattice, qgrid, strat, cfg, backend=backend)
                wall = time.perf_counter() - t0
                records.append(BenchRecord(
                    dataset=ds.name,
                    strategy=strat,
                    ordering_seed=int(seed),
                    wall_time_s=max(wall, 1e-9),
                    total_updates=sum(c.updates for c in cells),
                    cells=[(c.omega, c.q, c.objective) for c in cells],
                    nonconverged=sum(not c.converged for c in cells),
                ))
    return BenchResult(records, omega_grids, qgrid.values.tolist(), list(ordering_seeds),
                       agreement_tol)


def _cell_matrix(result: BenchResult, dataset: str, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Objectives as a (strategy, cell) array, plus the q of each cell."""
    recs = result.by_key()
    rows = [recs[dataset, seed, s].cells for s in STRATEGIES]
    obj = np.array([[c[2] for c in r] for r in rows])
    qs = np.array([c[1] for c in rows[0]])
    return obj, qs


def agreement(result: BenchResult, tol: float | None = None) -> list[AgreementRow]:
    """Per-cell agreement proportions, pooled over orderings, per dataset."""
    tol = result.agreement_tol if tol is None else tol
    out = []
    for ds in result.omega_grids:
        hits = {s: [] for s in STRATEGIES}
        convex_mask = []
        for seed in result.ordering_seeds:
            obj, qs = _cell_matrix(result, ds, seed)
            best = obj.min(axis=0)
            for i, s in enumerate(STRATEGIES):
                hits[s].append(obj[i] <= best + tol)
            convex_mask.append(qs >= 1.0)
        convex = np.concatenate(convex_mask)
        for s in STRATEGIES:
            h = np.concatenate(hits[s])
            out.append(AgreementRow(
                dataset=ds,
                strategy=s,
                proportion=float(h.mean()),
                convex_proportion=float(h[convex].mean()) if convex.any() else math.nan,
                nonconvex_proportion=float(h[~convex].mean()) if (~convex).any() else math.nan,
                n_cells=int(h.size),
            ))
    return out


def timing_ratios(result: BenchResult) -> list[dict]:
    """Warm/cold wall-time and update-count ratios per (dataset, ordering)."""
    recs = result.by_key()
    rows = []
    for ds in result.omega_grids:
        for seed in result.ordering_seeds:
            row = {"dataset": ds, "ordering_seed": seed}
            for name, warm, cold in PAIRS:
                w, c = recs[ds, seed, warm], recs[ds, seed, cold]
                row[f"{name}_time_ratio"] = w.wall_time_s / c.wall_time_s
                row[f"{name}_update_ratio"] = (w.total_updates / c.total_updates
                                               if c.total_updates else math.nan)
            rows.append(row)
    return rows


def ratio_summary(ratios: list[dict]) -> list[dict]:
    out = []
    for ds in dict.fromkeys(r["dataset"] for r in ratios):
        sub = [r for r in ratios if r["dataset"] == ds]
        for name, _, _ in PAIRS:
            for kind in ("time", "update"):
                vals = np.array([r[f"{name}_{kind}_ratio"] for r in sub])
                out.append({"dataset": ds, "algorithm": name, "measure": kind,
                            "mean_ratio": float(np.mean(vals)), "max_ratio": float(np.max(vals)),
                            "n_orderings": len(vals)})
    return out


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])


def write_bench(result: BenchResult, outdir: Path) -> dict[str, Path]:
    """Write runs, cells, ratios, ratio summary and agreement CSV files."""
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {k: outdir / f"{k}.csv" for k in ("runs", "cells", "ratios", "ratio_summary", "agreement")}
    _write_csv(paths["runs"],
               ["dataset", "strategy", "ordering_seed", "wall_time_s", "total_updates",
                "n_cells", "n_nonconverged"],
               ([r.dataset, r.strategy.value, r.ordering_seed, float(r.wall_time_s),
                 r.total_updates, len(r.cells), r.nonconverged] for r in result.records))
    _write_csv(paths["cells"],
               ["dataset", "strategy", "ordering_seed", "omega", "q", "objective"],
               ([r.dataset, r.strategy.value, r.ordering_seed, float(w), float(q), float(o)]
                for r in result.records for (w, q, o) in r.cells))
    ratios = timing_ratios(result)
    _write_csv(paths["ratios"], list(ratios[0]) if ratios else ["dataset", "ordering_seed"],
               ([r[k] for k in r] for r in ratios))
    summary = ratio_summary(ratios)
    _write_csv(paths["ratio_summary"],
               ["dataset", "algorithm", "measure", "mean_ratio", "max_ratio", "n_orderings"],
               ([r[k] for k in r] for r in summary))
    _write_csv(paths["agreement"],
               ["dataset", "strategy", "aggregation", "tolerance", "proportion",
                "convex_proportion", "nonconvex_proportion", "n_cells"],
               ([a.dataset, a.strategy.value, "per_cell", float(result.agreement_tol),
                 a.proportion, a.convex_proportion, a.nonconvex_proportion, a.n_cells]
                for a in agreement(result)))
    return paths
