"""Pure numpy implementations of the hot loops.

These are the reference implementations; ``_ckernels.pyx`` mirrors them
element by element in compiled code.
"""
from __future__ import annotations

import numpy as np
from scipy import signal
from scipy import special as sc

from ..errors import NumericError

NAME = "python"


def _series_and_slope(coeffs, lead, z):
    """``F = z**lead * P(z)`` and ``dF/dz`` by a fused Horner pass."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    n = len(coeffs)
    for j in range(n - 1, -1, -1):
        c = coeffs[j]
        p = p * z + c
        dp = dp * z + (lead + j) * c
    zl = np.power(z, lead - 1.0)
    return zl * z * p, zl * dp


def invert_power_series(coeffs, lead, zmax, targets, z0, rtol=1e-12, max_iter=200):
    """Solve ``z**lead * sum_j coeffs[j] z**j = target`` on ``(0, zmax)``.

    Safeguarded Newton: every iterate keeps a bracket ``[lo, hi]`` and falls
    back to bisection whenever the Newton step leaves it.
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    t = np.asarray(targets, dtype=float)
    z = np.clip(np.asarray(z0, dtype=float).copy(), 0.0, zmax)
    lo = np.zeros_like(t)
    hi = np.full_like(t, zmax)
    z = np.where((z <= 0.0) | (z >= zmax), 0.5 * zmax, z)
    active = np.arange(t.size)
    for _ in range(max_iter):
        za = z[active]
        ta = t[active]
        f, df = _series_and_slope(coeffs, lead, za)
        resid = f - ta
        below = resid < 0
        lo[active] = np.where(below, za, lo[active])
        hi[active] = np.where(below, hi[active], za)
        done = (np.abs(resid) <= rtol * ta) | (hi[active] - lo[active] <= 4e-16 * za)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = za - resid / df
        la, ha = lo[active], hi[active]
        bad = ~((step > la) & (step < ha)) | ~np.isfinite(step)
        step = np.where(bad, 0.5 * (la + ha), step)
        z[active] = np.where(done, za, step)
        active = active[~done]
        if active.size == 0:
            return z
    raise NumericError(f"power-series inversion did not converge for {active.size} targets")


# ln Gamma(1+d) = sum_k LGAMMA1P[k-1] d**k for |d| < 1
LGAMMA1P = np.array([-np.euler_gamma] + [(-1) ** k * sc.zeta(k) / k for k in range(2, 31)])


def _upper_gamma_cf(a, x):
    """``Gamma(a, x)`` for ``a <= 0``, ``x >= 1`` by the Lentz continued fraction."""
    b = x + 1.0 - a
    c = np.full_like(x, 1e300)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, 400):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < 1e-300, 1e-300, d)
        c = b + an / c
        c = np.where(np.abs(c) < 1e-300, 1e-300, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return np.exp(-x + a * np.log(x)) * h


def _upper_gamma_small(d, x):
    """``Gamma(d, x)`` for ``-1/4 <= d < 0`` and ``x < 1`` without cancellation:
    ``(Gamma(1+d) - 1)/d - expm1(d ln x)/d - x**d sum_k (-x)**k / (k! (d+k))``."""
    g1 = np.expm1(d * np.polyval(LGAMMA1P[::-1], d)) / d
    lx = np.log(x)
    ser = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 26):
        term = term * (-x) / k
        ser = ser + term / (d + k)
    return g1 - np.expm1(d * lx) / d - np.exp(d * lx) * ser


def _upper_gamma_below_one(s, y):
    """``Gamma(s, y)`` for ``s <= 0`` and ``y < 1`` by the downward recurrence
    ``Gamma(a, y) = (Gamma(a+1, y) - y**a e**-y) / a``, started so that no step
    divides by a small ``a``."""
    m = np.floor(s + 0.5)
    d = s - m
    if abs(d) < 1e-15:
        val, cur, n = sc.exp1(y), 0.0, int(-m)
    elif -0.25 <= d < 0:
        val, cur, n = _upper_gamma_small(d, y), d, int(-m)
    else:
        n = int(np.floor(-s)) + 1
        cur = s + n
        val = sc.gammaincc(cur, y) * sc.gamma(cur)
    for _ in range(n):
        cur -= 1.0
        val = (val - np.power(y, cur) * np.exp(-y)) / cur
    return val


def tail_measure(x, alpha, p):
    """``int_x^inf t**(-1-alpha) exp(-t**p) dt`` for ``x > 0`` and ``alpha < 1``.

    This is ``Gamma(s, x**p) / p`` with ``s = -alpha/p``.
    """
    y = np.power(x, p)
    s = -alpha / p
    if s > 0:
        return sc.gammaincc(s, y) * sc.gamma(s) / p
    y1 = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty_like(y1)
    big = y1 >= 1.0
    if big.any():
        out[big] = _upper_gamma_cf(s, y1[big])
    if not big.all():
        out[~big] = _upper_gamma_below_one(s, y1[~big])
    out /= p
    return out if np.ndim(y) else out[0]


def invert_tail(targets, x0, alpha, p, tol=1e-12, max_iter=60):
    """Newton in ``log x`` for ``tail_measure(x) = target`` starting from ``x0``."""
    lt = np.log(np.asarray(targets, dtype=float))
    lx = np.log(np.asarray(x0, dtype=float)).copy()
    active = np.arange(lt.size)
    for _ in range(max_iter):
        x = np.exp(lx[active])
        u = tail_measure(x, alpha, p)
        dens = np.power(x, -alpha) * np.exp(-np.power(x, p))
        # d log U / d log x = -x * x**(-1-alpha) e^{-x^p} / U
        step = (np.log(u) - lt[active]) * u / dens
        step = np.clip(step, -2.0, 2.0)
        lx[active] += step
        active = active[np.abs(step) > tol]
        if active.size == 0:
            return np.exp(lx)
    raise NumericError(f"tail inversion did not converge for {active.size} targets")


def sample_piecewise_linear(u_pick, u_within, cum_mass, f_nodes, w0, h):
    """Draw from the piecewise-linear density with node values ``f_nodes``.

    ``cum_mass`` holds the cumulative interval masses (last entry = total) on a
    grid of equal width ``h`` starting at ``w0``.
    """
    total = cum_mass[-1]
    idx = np.searchsorted(cum_mass, u_pick * total, side="right")
    idx = np.minimum(idx, len(cum_mass) - 1)
    f0 = f_nodes[idx]
    f1 = f_nodes[idx + 1]
    a = 0.5 * (f0 + f1)
    ua = u_within * a
    den = f0 + np.sqrt(f0 * f0 + 2.0 * (f1 - f0) * ua)
    # den == 0 only when f0 == 0 and ua == 0: the draw sits on the left node
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(den > 0, 2.0 * ua / den, 0.0)
    return w0 + h * (idx + frac)


def ou_filter(y0, decay, innov):
    """``y[:, k+1] = decay * y[:, k] + innov[:, k]`` with ``y[:, 0] = y0``."""
    innov = np.atleast_2d(np.asarray(innov, dtype=float))
    y0 = np.broadcast_to(np.asarray(y0, dtype=float), (innov.shape[0],))
    out = np.empty((innov.shape[0], innov.shape[1] + 1))
    out[:, 0] = y0
    if innov.shape[1]:
        zi = (decay * y0)[:, None]
        out[:, 1:], _ = signal.lfilter([1.0], [1.0, -decay], innov, axis=1, zi=zi)
    return out
