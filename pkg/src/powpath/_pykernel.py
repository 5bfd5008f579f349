"""Pure-Python coordinate-descent kernel, used when the extension is absent."""

from __future__ import annotations

import numpy as np

from .threshold import PenaltyPoint, threshold

NAME = "python"


def threshold_scalar(omega, q, b, boundary_tol=1e-12):
    return threshold(PenaltyPoint(omega, q), b, boundary_tol)


def threshold_array(omega, q, b, boundary_tol=1e-12):
    point = PenaltyPoint(omega, q)
    return np.array([threshold(point, float(v), boundary_tol) for v in b])


def _full_objective(Xt, y, beta, lam, q):
    r = y - Xt.T @ beta
    return 0.5 * float(r @ r) + lam * float(np.sum(np.abs(beta) ** q))


def cd_run(Xt, y, col_sq, beta, resid, omega, q, order, tol, max_sweeps,
           boundary_tol=1e-12, instrument=False, refresh_every=1000):
    p = beta.shape[0]
    lam = 0.5 if q == 2.0 else omega ** (2.0 - q) / q
    if q == 2.0:
        points = [None] * p
    else:
        points = [PenaltyPoint(omega * col_sq[j] ** (1.0 / (q - 2.0)), q) for j in range(p)]
    sweep = updates = 0
    converged = False
    max_inc = 0.0
    obj_prev = _full_objective(Xt, y, beta, lam, q) if instrument else 0.0
    while sweep < max_sweeps:
        sweep += 1
        maxchange = 0.0
        for j in order:
            cj = col_sq[j]
            old = beta[j]
            xj = Xt[j]
            bj = float(xj @ resid) / cj + old
            if q == 2.0:
                new = bj * cj / (cj + 1.0)
            else:
                new = threshold(points[j], bj, boundary_tol)
            updates += 1
            delta = new - old
            if delta != 0.0:
                beta[j] = new
                resid -= delta * xj
                maxchange = max(maxchange, abs(delta))
            if instrument:
                obj_new = _full_objective(Xt, y, beta, lam, q)
                max_inc = max(max_inc, obj_new - obj_prev)
                obj_prev = obj_new
        if refresh_every > 0 and sweep % refresh_every == 0:
            resid[:] = y - Xt.T @ beta
        if maxchange <= tol:
            converged = True
            break
    return sweep, updates, converged, max_inc, 0
