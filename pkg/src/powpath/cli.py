"""Command-line front end.

Subcommands: ``threshold-curve``, ``solve``, ``path``, ``surface``, ``bench``
and ``rerun`` (replays a JSON manifest written by any of the others).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__, _backend
from .bench import orderings, run_bench, write_bench
from .data import DataError, load_csv, standardize, synth_instance
from .pathwise import (
    Strategy,
    base_omega_grid,
    build_omega_grid,
    cold_path_fixed_omega,
    cold_path_fixed_q,
    default_q_grid,
    path_fixed_omega,
    path_fixed_q,
    surface,
)
from .solver import SolveConfig, solve
from .threshold import PenaltyPoint, alpha, threshold

log = logging.getLogger("powpath")

COEF_HEADER = ["dataset", "strategy", "ordering_seed", "omega", "q", "coefficient_index", "value"]
SYNTH_KEYS = {"n": int, "p": int, "sparsity": int, "rho": float, "noise": float, "seed": int}


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def parse_synth(spec: str) -> dict:
    """``"n=100,p=50,rho=0.3,seed=1"`` -> keyword dict for :func:`synth_instance`."""
    out = {"n": 100, "p": 50, "sparsity": 5, "rho": 0.3, "noise": 1.0, "seed": 0}
    for part in filter(None, (s.strip() for s in spec.split(","))):
        key, _, val = part.partition("=")
        if key not in SYNTH_KEYS or not val:
            raise UsageError(f"bad synthetic spec element {part!r}; keys are {sorted(SYNTH_KEYS)}")
        try:
            out[key] = SYNTH_KEYS[key](val)
        except ValueError:
            raise UsageError(f"bad value in synthetic spec: {part!r}") from None
    return out


def _synth(spec: dict):
    return synth_instance(spec["seed"], spec["n"], spec["p"], spec["sparsity"],
                          spec["rho"], spec["noise"])


def _datasets(args) -> list:
    out = []
    for path in args.data or []:
        if not args.response:
            raise UsageError("--response is required with --data")
        out.append(standardize(load_csv(path, args.response)))
    for spec in args.synth or []:
        out.append(_synth(parse_synth(spec)))
    if not out:
        raise UsageError("give a dataset with --data/--response or --synth")
    return out


def _config(args, p: int) -> tuple[SolveConfig, int | None]:
    seed = getattr(args, "ordering_seed", None)
    order = orderings(p, [seed])[0] if seed is not None else None
    return SolveConfig(tol=args.tol, max_sweeps=args.max_sweeps, ordering=order), seed


def _write_coefs(path: Path, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COEF_HEADER)
        for ds, strat, seed, omega, q, beta in rows:
            for j, v in enumerate(beta):
                w.writerow([ds, strat, "" if seed is None else seed, repr(float(omega)),
                            repr(float(q)), j, repr(float(v))])


def _manifest(args, extra: dict) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out", "verbose")}
    return {
        "command": args.command,
        "args": params,
        "version": __version__,
        "backend": _backend.BACKEND,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "rng": "numpy PCG64 per ordering seed, Generator.permutation",
        **extra,
    }


def _write_manifest(outdir: Path, manifest: dict) -> None:
    with (outdir / "manifest.json").open("w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_threshold_curve(args) -> int:
    """Rows ``(b, q, omega, h)`` over the cartesian product of the sweeps."""
    start, stop, num = args.b_range
    num = int(num)
    if num < 0:
        raise UsageError("number of b points must be >= 0")
    for q in args.q:
        if not 0.01 <= q <= 2:
            raise UsageError(f"q={q} outside [0.01, 2]")
    if any(w < 0 for w in args.omega):
        raise UsageError("omega must be nonnegative")
    base = np.linspace(start, stop, num) if num else np.empty(0)
    lo, hi = min(start, stop), max(start, stop)
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["b", "q", "omega", "h"])
        for q in args.q:
            for omega in args.omega:
                pt = PenaltyPoint(omega, q)
                bs = base
                if num and q < 1.0 and omega > 0:
                    # straddle +-alpha so the jump shows in plots
                    a = alpha(pt)
                    extra = [s * a * f for s in (-1.0, 1.0) for f in (1 - 1e-9, 1 + 1e-9)]
                    bs = np.union1d(base, [e for e in extra if lo <= e <= hi])
                for b in bs:
                    w.writerow([repr(float(b)), repr(q), repr(omega), repr(threshold(pt, float(b)))])
    return 0


def cmd_solve(args) -> int:
    ds = _datasets(args)[0]
    cfg, seed = _config(args, ds.problem.p)
    pt = PenaltyPoint(args.omega, args.q)
    sol = solve(ds.problem, pt, None, cfg)
    out = _outdir(args)
    _write_coefs(out / "coefficients.csv", [(ds.name, "single", seed, pt.omega, pt.q, sol.beta)])
    _write_manifest(out, _manifest(args, {
        "dataset": ds.name,
        "result": {"objective": sol.objective, "sweeps": sol.sweeps, "updates": sol.updates,
                   "converged": sol.converged},
    }))
    if not sol.converged:
        log.warning("solver did not converge within %d sweeps", cfg.max_sweeps)
    print(f"objective={sol.objective!r} sweeps={sol.sweeps} converged={sol.converged}")
    return 0


def cmd_path(args) -> int:
    ds = _datasets(args)[0]
    prob = ds.problem
    cfg, seed = _config(args, prob.p)
    if (args.fixed_q is None) == (args.fixed_omega is None):
        raise UsageError("give exactly one of --fixed-q or --fixed-omega")
    if args.fixed_q is not None:
        grid = build_omega_grid(prob, args.fixed_q, args.k_omega, args.floor)
        runner = cold_path_fixed_q if args.cold else path_fixed_q
        strat = Strategy.ColdFixedQ if args.cold else Strategy.WarmFixedQ
        path = runner(prob, args.fixed_q, grid, cfg)
        rows = [(ds.name, strat.value, seed, w, args.fixed_q, path.columns[:, l])
                for l, w in enumerate(grid.values)]
        grid_vals = {"omega": grid.values.tolist(), "q": [args.fixed_q]}
    else:
        qgrid = default_q_grid(args.k_q, args.q_min)
        runner = cold_path_fixed_omega if args.cold else path_fixed_omega
        strat = Strategy.ColdFixedOmega if args.cold else Strategy.WarmFixedOmega
        path = runner(prob, args.fixed_omega, qgrid, cfg)
        rows = [(ds.name, strat.value, seed, args.fixed_omega, q, path.columns[:, l])
                for l, q in enumerate(qgrid.values)]
        grid_vals = {"omega": [args.fixed_omega], "q": qgrid.values.tolist()}
    out = _outdir(args)
    _write_coefs(out / "coefficients.csv", rows)
    _write_manifest(out, _manifest(args, {
        "dataset": ds.name, "strategy": strat.value, "grid": grid_vals,
        "total_updates": path.total_updates,
        "nonconverged_columns": sum(not s.converged for s in path.per_column),
    }))
    print(f"{strat.value}: {len(rows)} columns, {path.total_updates} coordinate updates")
    return 0


def cmd_surface(args) -> int:
    ds = _datasets(args)[0]
    prob = ds.problem
    cfg, seed = _config(args, prob.p)
    lattice = base_omega_grid(prob, args.k_omega, args.floor)
    qgrid = default_q_grid(args.k_q, args.q_min)
    cells = surface(prob, lattice, qgrid, args.strategy, cfg)
    out = _outdir(args)
    _write_coefs(out / "coefficients.csv",
                 [(ds.name, args.strategy, seed, c.omega, c.q, c.beta) for c in cells])
    with (out / "cells.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "strategy", "ordering_seed", "omega", "q", "objective", "updates",
                    "converged"])
        for c in cells:
            w.writerow([ds.name, args.strategy, "" if seed is None else seed, repr(c.omega),
                        repr(c.q), repr(c.objective), c.updates, int(c.converged)])
    _write_manifest(out, _manifest(args, {
        "dataset": ds.name,
        "grid": {"omega": lattice.tolist(), "q": qgrid.values.tolist()},
        "total_updates": sum(c.updates for c in cells),
    }))
    print(f"{args.strategy}: {len(cells)} cells")
    return 0


def cmd_bench(args) -> int:
    datasets = _datasets(args)
    seeds = args.seeds if args.seeds else list(range(args.seed, args.seed + args.n_orderings))
    if len(seeds) != args.n_orderings and not args.seeds:
        raise UsageError("seed list does not match --n-orderings")
    cfg = SolveConfig(tol=args.tol, max_sweeps=args.max_sweeps)
    result = run_bench(datasets, seeds, k_omega=args.k_omega, floor=args.floor, k_q=args.k_q,
                       q_min=args.q_min, config=cfg, agreement_tol=args.agreement_tol)
    out = _outdir(args)
    paths = write_bench(result, out)
    _write_manifest(out, _manifest(args, {
        "datasets": [d.name for d in datasets],
        "ordering_seeds": seeds,
        "grid": {"omega": result.omega_grids, "q": result.q_grid},
        "agreement": {"aggregation": "per_cell", "tolerance": args.agreement_tol},
        "outputs": sorted(p.name for p in paths.values()),
    }))
    with paths["ratio_summary"].open(encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    return 0


def cmd_rerun(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    try:
        command, params = manifest["command"], dict(manifest["args"])
    except KeyError as exc:
        raise UsageError(f"manifest lacks {exc}") from None
    argv = [command]
    subs = build_parser().subcommands
    if command not in subs or command == "rerun":
        raise UsageError(f"manifest names unknown command {command!r}")
    sub = subs[command]
    for action in sub._actions:
        if action.dest not in params or action.dest in ("help", "out"):
            continue
        val = params[action.dest]
        if val is None or val is False:
            continue
        flag = action.option_strings[0]
        if val is True:
            argv.append(flag)
        elif action.dest == "b_range":
            argv += [flag, ":".join(repr(v) for v in val)]
        elif isinstance(val, list):
            if isinstance(action, argparse._AppendAction):
                for v in val:
                    argv += [flag, str(v)]
            else:
                argv += [flag, ",".join(str(v) for v in val)]
        else:
            argv += [flag, str(val)]
    argv += ["--out", args.out]
    return main(argv)


def _b_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    try:
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
    except (IndexError, ValueError):
        raise argparse.ArgumentTypeError(f"expected START:STOP:NUM, got {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected START:STOP:NUM, got {text!r}")
    return start, stop, num


def _add_data(p) -> None:
    p.add_argument("--data", action="append", help="CSV file (repeatable for bench)")
    p.add_argument("--response", help="name of the response column in --data files")
    p.add_argument("--synth", action="append",
                   help="synthetic instance, e.g. 'n=100,p=50,sparsity=5,rho=0.3,noise=1,seed=0'")


def _add_solver(p, ordering: bool = True) -> None:
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-sweeps", type=int, default=10_000)
    if ordering:
        p.add_argument("--ordering-seed", type=int, default=None,
                       help="seed of the covariate ordering (default: natural order)")


def _add_grids(p) -> None:
    p.add_argument("--k-omega", type=int, default=20)
    p.add_argument("--floor", type=float, default=1e-7)
    p.add_argument("--k-q", type=int, default=20)
    p.add_argument("--q-min", type=float, default=0.1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powpath", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("threshold-curve", help="dump h(omega, q; b) curves as CSV")
    p.add_argument("--omega", type=_floats, default=[1.0], help="comma-separated omega values")
    p.add_argument("--q", type=_floats, default=[0.05, 0.5, 1.0, 2.0],
                   help="comma-separated q values")
    p.add_argument("--b-range", type=_b_range, default=(-4.0, 4.0, 801), help="START:STOP:NUM")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_threshold_curve)

    p = subs.add_parser("solve", help="single (omega, q) solve")
    _add_data(p)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    _add_solver(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_solve)

    p = subs.add_parser("path", help="fixed-q or fixed-omega solution path")
    _add_data(p)
    p.add_argument("--fixed-q", type=float)
    p.add_argument("--fixed-omega", type=float)
    p.add_argument("--cold", action="store_true", help="use the cold-start baseline")
    _add_grids(p)
    _add_solver(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_path)

    p = subs.add_parser("surface", help="full omega x q regularization surface")
    _add_data(p)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="warm_fixed_q")
    _add_grids(p)
    _add_solver(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_surface)

    p = subs.add_parser("bench", help="warm vs cold benchmark over random orderings")
    _add_data(p)
    p.add_argument("--n-orderings", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="first ordering seed")
    p.add_argument("--seeds", type=_ints, default=None, help="explicit ordering seeds")
    p.add_argument("--agreement-tol", type=float, default=1e-7)
    _add_grids(p)
    _add_solver(p, ordering=False)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = subs.add_parser("rerun", help="replay a manifest.json")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rerun)
    parser.subcommands = subs.choices
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, DataError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"powpath: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
