# cython: language_level=3
"""Compiled versions of the hot loops in ``_pykernels``.

Each routine works element by element, so no temporaries are allocated and
converged elements stop iterating immediately.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, pow, sqrt, fabs, floor, isfinite
from libc.math cimport expm1
from scipy.special.cython_special cimport gammaincc, gamma, exp1

from ._pykernels import LGAMMA1P as _LGAMMA1P_PY

from ..errors import NumericError

cnp.import_array()

NAME = "compiled"

cdef double LGAMMA1P[30]
for _k in range(30):
    LGAMMA1P[_k] = _LGAMMA1P_PY[_k]


cdef inline void _series_and_slope(const double[::1] c, double lead, double z,
                                   double* f, double* df) noexcept nogil:
    cdef Py_ssize_t j
    cdef double p = 0.0, dp = 0.0, zl
    for j in range(c.shape[0] - 1, -1, -1):
        p = p * z + c[j]
        dp = dp * z + (lead + j) * c[j]
    zl = pow(z, lead - 1.0)
    f[0] = zl * z * p
    df[0] = zl * dp


def invert_power_series(coeffs, double lead, double zmax, targets, z0,
                        double rtol=1e-12, int max_iter=200):
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef const double[::1] t = np.ascontiguousarray(targets, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(z0, dtype=np.float64)
    out = np.empty(t.shape[0])
    cdef double[::1] z = out
    cdef Py_ssize_t i, n = t.shape[0], failed = 0
    cdef int it
    cdef double lo, hi, zi, f, df, resid, step
    with nogil:
        for i in range(n):
            lo = 0.0
            hi = zmax
            zi = g[i]
            if not (zi > 0.0 and zi < zmax):
                zi = 0.5 * zmax
            for it in range(max_iter):
                _series_and_slope(c, lead, zi, &f, &df)
                resid = f - t[i]
                if resid < 0:
                    lo = zi
                else:
                    hi = zi
                if fabs(resid) <= rtol * t[i] or hi - lo <= 4e-16 * zi:
                    break
                step = zi - resid / df
                if not (step > lo and step < hi) or not isfinite(step):
                    step = 0.5 * (lo + hi)
                zi = step
            else:
                failed += 1
            z[i] = zi
    if failed:
        raise NumericError(f"power-series inversion did not converge for {failed} targets")
    return out


cdef inline double _upper_gamma_cf(double a, double x) noexcept nogil:
    """``Gamma(a, x)`` for ``a <= 0``, ``x >= 1`` by the Lentz continued fraction."""
    cdef double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d, an, delta
    cdef int i
    for i in range(1, 400):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if fabs(d) < 1e-300:
            d = 1e-300
        c = b + an / c
        if fabs(c) < 1e-300:
            c = 1e-300
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < 1e-16:
            break
    return exp(-x + a * log(x)) * h


cdef inline double _upper_gamma_small(double d, double x) noexcept nogil:
    """``Gamma(d, x)`` for ``-1/4 <= d < 0`` and ``x < 1`` without cancellation."""
    cdef double lg = 0.0, ser = 0.0, term = 1.0, lx = log(x)
    cdef int k
    for k in range(29, -1, -1):
        lg = lg * d + LGAMMA1P[k]
    lg *= d
    for k in range(1, 26):
        term *= -x / k
        ser += term / (d + k)
    return expm1(lg) / d - expm1(d * lx) / d - exp(d * lx) * ser


cdef inline double _tail_measure(double x, double alpha, double p) noexcept nogil:
    cdef double y = pow(x, p)
    cdef double s = -alpha / p
    cdef double m, d, cur, val
    cdef int n, k
    if s > 0:
        return gammaincc(s, y) * gamma(s) / p
    if y >= 1.0:
        return _upper_gamma_cf(s, y) / p
    m = floor(s + 0.5)
    d = s - m
    if fabs(d) < 1e-15:
        val = exp1(y)
        cur = 0.0
        n = <int>(-m)
    elif -0.25 <= d < 0:
        val = _upper_gamma_small(d, y)
        cur = d
        n = <int>(-m)
    else:
        n = <int>floor(-s) + 1
        cur = s + n
        val = gammaincc(cur, y) * gamma(cur)
    for k in range(n):
        cur -= 1.0
        val = (val - pow(y, cur) * exp(-y)) / cur
    return val / p


def tail_measure(x, double alpha, double p):
    cdef const double[::1] xv = np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64)
    out = np.empty(xv.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            o[i] = _tail_measure(xv[i], alpha, p)
    return out if np.ndim(x) else out[0]


def invert_tail(targets, x0, double alpha, double p, double tol=1e-12, int max_iter=60):
    cdef const double[::1] t = np.ascontiguousarray(targets, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(x0, dtype=np.float64)
    out = np.empty(t.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i, failed = 0
    cdef int it
    cdef double lx, lt, x, u, dens, step
    with nogil:
        for i in range(t.shape[0]):
            lt = log(t[i])
            lx = log(g[i])
            for it in range(max_iter):
                x = exp(lx)
                u = _tail_measure(x, alpha, p)
                dens = pow(x, -alpha) * exp(-pow(x, p))
                step = (log(u) - lt) * u / dens
                if step > 2.0:
                    step = 2.0
                elif step < -2.0:
                    step = -2.0
                lx += step
                if fabs(step) <= tol:
                    break
            else:
                failed += 1
            o[i] = exp(lx)
    if failed:
        raise NumericError(f"tail inversion did not converge for {failed} targets")
    return out


def sample_piecewise_linear(u_pick, u_within, cum_mass, f_nodes, double w0, double h):
    cdef const double[::1] up = np.ascontiguousarray(u_pick, dtype=np.float64)
    cdef const double[::1] uw = np.ascontiguousarray(u_within, dtype=np.float64)
    cdef const double[::1] cm = np.ascontiguousarray(cum_mass, dtype=np.float64)
    cdef const double[::1] fn = np.ascontiguousarray(f_nodes, dtype=np.float64)
    out = np.empty(up.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i, lo, hi, mid, m = cm.shape[0]
    cdef double total = cm[m - 1], target, f0, f1, ua, den
    with nogil:
        for i in range(up.shape[0]):
            target = up[i] * total
            # first index with cm[idx] > target
            lo = 0
            hi = m
            while lo < hi:
                mid = (lo + hi) >> 1
                if cm[mid] <= target:
                    lo = mid + 1
                else:
                    hi = mid
            if lo > m - 1:
                lo = m - 1
            f0 = fn[lo]
            f1 = fn[lo + 1]
            ua = uw[i] * 0.5 * (f0 + f1)
            den = f0 + sqrt(f0 * f0 + 2.0 * (f1 - f0) * ua)
            o[i] = w0 + h * (lo + (2.0 * ua / den if den > 0 else 0.0))
    return out


def ou_filter(y0, double decay, innov):
    innov = np.atleast_2d(np.asarray(innov, dtype=np.float64))
    cdef const double[:, ::1] x = np.ascontiguousarray(innov)
    cdef Py_ssize_t npath = x.shape[0], nstep = x.shape[1], i, k
    y0a = np.ascontiguousarray(np.broadcast_to(np.asarray(y0, dtype=np.float64), (npath,)))
    cdef const double[::1] y0v = y0a
    out = np.empty((npath, nstep + 1))
    cdef double[:, ::1] o = out
    cdef double y
    with nogil:
        for i in range(npath):
            y = y0v[i]
            o[i, 0] = y
            for k in range(nstep):
                y = decay * y + x[i, k]
                o[i, k + 1] = y
    return out
