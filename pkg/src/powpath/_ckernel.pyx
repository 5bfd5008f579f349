# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled coordinate-descent kernel.

Mirrors ``powpath._pykernel`` exactly; the two are cross-checked in the
test-suite.
"""

from libc.math cimport exp, log, pow, fabs, copysign

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef int MAX_ITER = 200
cdef double EPS = 2.220446049250313e-16


cdef inline double _log_alpha_factor(double q) noexcept nogil:
    cdef double tail = 0.0
    if q != 1.0:
        tail = (q - 1.0) / (2.0 - q) * log(2.0 * (1.0 - q))
    return tail + log(2.0 - q) - log(q) / (2.0 - q)


cdef inline double _log_gamma_factor(double q) noexcept nogil:
    return log(2.0 * (1.0 - q) / q) / (2.0 - q)


cdef double _phi_sub_one(double c, double q, double b_abs, double lo, int* status) noexcept nogil:
    cdef double hi = b_abs
    cdef double x = hi, fx, d, xn, e2
    cdef int it
    for it in range(MAX_ITER):
        e2 = c * pow(x, q - 1.0)
        fx = x + e2 - b_abs
        if fabs(fx) <= 8.0 * EPS * (x + e2 + b_abs):
            return x
        if fx > 0.0:
            hi = x
        else:
            lo = x
        d = 1.0 + (q - 1.0) * c * pow(x, q - 2.0)
        if d > 0.0:
            xn = x - fx / d
        else:
            xn = lo - 1.0
        if not (lo <= xn <= hi):
            xn = 0.5 * (lo + hi)
        if fabs(xn - x) <= 8.0 * EPS * fabs(x):
            return xn
        x = xn
    status[0] = 1
    return x


cdef double _phi_super_one(double c, double q, double b_abs, int* status) noexcept nogil:
    cdef double u_hi = log(b_abs)
    cdef double u_lo = log(0.5 * b_abs)
    cdef double alt, x, fx, d, xn, lo, hi, e1, e2, scale
    cdef int it
    if c > 0.0:
        alt = (log(0.5 * b_abs) - log(c)) / (q - 1.0)
        if alt < u_lo:
            u_lo = alt
    if u_lo < -740.0:
        u_lo = -740.0
        if exp(u_lo) + c * exp((q - 1.0) * u_lo) > b_abs:
            return 0.0
    lo = u_lo
    hi = u_hi
    x = hi
    for it in range(MAX_ITER):
        e1 = exp(x)
        e2 = c * exp((q - 1.0) * x)
        fx = e1 + e2 - b_abs
        if fabs(fx) <= 8.0 * EPS * (e1 + e2 + b_abs):
            return exp(x)
        if fx > 0.0:
            hi = x
        else:
            lo = x
        d = e1 + (q - 1.0) * e2
        if d > 0.0:
            xn = x - fx / d
        else:
            xn = lo - 1.0
        if not (lo <= xn <= hi):
            xn = 0.5 * (lo + hi)
        scale = fabs(x) if fabs(x) > 1.0 else 1.0
        if fabs(xn - x) <= 8.0 * EPS * scale:
            return exp(xn)
        x = xn
    status[0] = 1
    return exp(x)


cdef double _threshold_pre(double b, double q, double omega, double cpow,
                           double a, double g, double btol, int* status) noexcept nogil:
    """Threshold with the per-omega constants already evaluated."""
    cdef double b_abs, phi
    if b == 0.0:
        return 0.0
    if q == 2.0:
        return 0.5 * b
    b_abs = fabs(b)
    if q == 1.0:
        if b_abs > omega:
            return copysign(b_abs - omega, b)
        return 0.0
    if omega == 0.0:
        return b
    if q < 1.0:
        if b_abs <= a * (1.0 + btol):
            return 0.0
        phi = _phi_sub_one(cpow, q, b_abs, g, status)
    else:
        phi = _phi_super_one(cpow, q, b_abs, status)
    return copysign(phi, b)


cdef void _constants(double omega, double q, double* cpow, double* a, double* g) noexcept nogil:
    cpow[0] = pow(omega, 2.0 - q)
    if q <= 1.0:
        a[0] = omega * exp(_log_alpha_factor(q))
        g[0] = 0.0 if q == 1.0 else omega * exp(_log_gamma_factor(q))
    else:
        a[0] = 0.0
        g[0] = 0.0


def threshold_scalar(double omega, double q, double b, double boundary_tol=1e-12):
    """Compiled evaluation of h(omega, q; b); validation is the caller's job."""
    cdef double cpow, a, g, out
    cdef int status = 0
    _constants(omega, q, &cpow, &a, &g)
    out = _threshold_pre(b, q, omega, cpow, a, g, boundary_tol, &status)
    if status:
        raise RuntimeError("root finder did not converge")
    return out


def threshold_array(double omega, double q, double[::1] b, double boundary_tol=1e-12):
    cdef Py_ssize_t i, m = b.shape[0]
    cdef double cpow, a, g
    cdef int status = 0
    out = np.empty(m)
    cdef double[::1] ov = out
    _constants(omega, q, &cpow, &a, &g)
    with nogil:
        for i in range(m):
            ov[i] = _threshold_pre(b[i], q, omega, cpow, a, g, boundary_tol, &status)
    if status:
        raise RuntimeError("root finder did not converge")
    return out


cdef double _full_objective(const double[:, ::1] Xt, const double[::1] y, double[::1] beta,
                            double[::1] work, double lam, double q) noexcept nogil:
    cdef Py_ssize_t n = y.shape[0], p = beta.shape[0], i, j
    cdef double s = 0.0, pen = 0.0, bj
    for i in range(n):
        work[i] = y[i]
    for j in range(p):
        bj = beta[j]
        if bj != 0.0:
            for i in range(n):
                work[i] -= bj * Xt[j, i]
            pen += pow(fabs(bj), q)
    for i in range(n):
        s += work[i] * work[i]
    return 0.5 * s + lam * pen


def cd_run(const double[:, ::1] Xt, const double[::1] y, const double[::1] col_sq,
           double[::1] beta, double[::1] resid, double omega, double q,
           const cnp.int64_t[::1] order, double tol, long max_sweeps,
           double boundary_tol=1e-12, bint instrument=False, long refresh_every=1000):
    """Cyclic coordinate descent, updating ``beta`` and ``resid`` in place.

    Returns ``(sweeps, updates, converged, max_increase, n_failed_roots)``.
    ``max_increase`` is the largest rise of the from-scratch objective across
    single updates (only when ``instrument`` is set).
    """
    cdef Py_ssize_t n = y.shape[0], p = beta.shape[0], m = order.shape[0]
    cdef Py_ssize_t i, k, j
    cdef long sweep = 0, updates = 0, failed = 0
    cdef bint converged = False
    cdef double lam, bj, old, new, delta, maxchange, cj, obj_prev = 0.0, obj_new, max_inc = 0.0
    cdef double dot
    cdef int status
    omj_arr = np.empty(p)
    cp_arr = np.empty(p)
    a_arr = np.empty(p)
    g_arr = np.empty(p)
    work_arr = np.empty(n)
    cdef double[::1] omj = omj_arr, cpw = cp_arr, aa = a_arr, gg = g_arr, work = work_arr

    lam = 0.5 if q == 2.0 else pow(omega, 2.0 - q) / q
    for j in range(p):
        if q == 2.0:
            omj[j] = 0.0
        else:
            omj[j] = omega * pow(col_sq[j], 1.0 / (q - 2.0))
        _constants(omj[j], q, &cpw[j], &aa[j], &gg[j])

    with nogil:
        if instrument:
            obj_prev = _full_objective(Xt, y, beta, work, lam, q)
        while sweep < max_sweeps:
            sweep += 1
            maxchange = 0.0
            for k in range(m):
                j = order[k]
                cj = col_sq[j]
                old = beta[j]
                dot = 0.0
                for i in range(n):
                    dot = dot + Xt[j, i] * resid[i]
                bj = dot / cj + old
                if q == 2.0:
                    new = bj * cj / (cj + 1.0)
                else:
                    status = 0
                    new = _threshold_pre(bj, q, omj[j], cpw[j], aa[j], gg[j], boundary_tol, &status)
                    failed += status
                updates += 1
                delta = new - old
                if delta != 0.0:
                    beta[j] = new
                    for i in range(n):
                        resid[i] -= delta * Xt[j, i]
                    if fabs(delta) > maxchange:
                        maxchange = fabs(delta)
                if instrument:
                    obj_new = _full_objective(Xt, y, beta, work, lam, q)
                    if obj_new - obj_prev > max_inc:
                        max_inc = obj_new - obj_prev
                    obj_prev = obj_new
            if refresh_every > 0 and sweep % refresh_every == 0:
                for i in range(n):
                    resid[i] = y[i]
                for j in range(p):
                    if beta[j] != 0.0:
                        for i in range(n):
                            resid[i] -= beta[j] * Xt[j, i]
            if maxchange <= tol:
                converged = True
                break
    return sweep, updates, converged, max_inc, failed
