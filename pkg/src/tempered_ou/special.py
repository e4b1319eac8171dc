"""Numerically stable special-function helpers shared by the distribution modules.

The incomplete-beta type integral

    J(z; b, g) = int_0^z s**(g-1) * (1-s)**(-b-1) ds,    0 <= z < 1,

is the workhorse behind the IGa and IBGM mixing laws.  With ``z = 1 - 1/y`` it
equals ``int_1^y (x-1)**(g-1) * x**(b-g) dx``.  The textbook expansions of these
integrals for integer ``g`` are alternating binomial sums that cancel badly
when ``y`` is close to 1, so here they are evaluated either as positive power
series in ``z`` or, for the exact constants, in multiprecision arithmetic.
"""
from __future__ import annotations

import math
import warnings
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy import integrate as _integrate
from scipy import special as sc

from .errors import NumericError, ParameterError

# Above this z the power series in z converges too slowly and the expansion in
# w = 1 - z is used instead.
_SPLIT_Z = 0.9
_MP_DPS = 60


# ---------------------------------------------------------------------------
# elementary limbs


def phi1(x):
    """``(exp(x) - 1) / x`` with the removable singularity at 0 filled in."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = x != 0.0
    out[nz] = np.expm1(x[nz]) / x[nz]
    return out[()] if out.ndim == 0 else out


def phi2(x):
    """``(exp(x) - 1 - x) / x**2``, accurate near 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 0.05
    xs = x[small]
    out[small] = 0.5 + xs * (1 / 6 + xs * (1 / 24 + xs * (1 / 120 + xs * (1 / 720 + xs / 5040))))
    xl = x[~small]
    out[~small] = (np.expm1(xl) - xl) / (xl * xl)
    return out[()] if out.ndim == 0 else out


def pow_ratio(y, e):
    """``(y**e - 1) / e`` for ``y > 0``, equal to ``ln y`` at ``e = 0``."""
    ly = np.log(y)
    return ly * phi1(e * ly)


def pow_ratio_log(log_y, e):
    """Same as :func:`pow_ratio` but takes ``ln y``; safe for huge ``y``."""
    return log_y * phi1(e * log_y)


def log_pow_ratio(log_y, e):
    """``log((y**e - 1)/e)`` for ``y > 1``, robust when ``y**e`` overflows."""
    x = e * log_y
    if x > 30.0:
        return x - math.log(e) + math.log1p(-math.exp(-x))
    return math.log(log_y * float(phi1(x)))


# ---------------------------------------------------------------------------
# quadrature


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def integrate(f, a, b, *, epsabs=0.0, epsrel=1e-12, limit=400, points=None, weight=None,
              wvar=None, what="integral"):
    """Adaptive Gauss-Kronrod quadrature that raises instead of warning.

    ``weight="cos"`` or ``"sin"`` with frequency ``wvar`` integrates
    ``f(x) cos(wvar x)`` (or ``sin``) by the oscillatory rule, which stays
    accurate over many periods.

    A result is rejected only if quadpack reports a problem *and* its own error
    estimate is worse than ``1e3 * max(epsabs, epsrel*|value|)``; quadpack
    routinely flags roundoff at the requested tolerance on benign integrands.
    Values at overflow scale are always rejected: the Fourier rule on infinite
    ranges can return ``DBL_MAX`` with a small error estimate.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        kw = {"points": points} if weight is None else {"weight": weight, "wvar": wvar}
        val, err, info = _integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel,
                                         limit=limit, full_output=1, **kw)[:3]
    tol = max(epsabs, epsrel * abs(val), 1e-300)
    bad = not np.isfinite(val) or abs(val) > 1e300
    if bad or err > 1e3 * tol and err > 1e-9 * abs(val):
        raise NumericError(f"quadrature of {what} on [{a}, {b}] failed: value={val!r}, "
                           f"error estimate={err!r}")
    return val


# ---------------------------------------------------------------------------
# the J integral


def _raw_coeffs(b, g, n):
    """First ``n`` coefficients ``(1+b)_j / (j! (g+j))``."""
    j = np.arange(n, dtype=float)
    ratios = np.ones(n)
    ratios[1:] = (b + j[1:]) / j[1:]
    return np.cumprod(ratios) / (g + j)


def _truncate(coeffs_fn, zmax, rtol, max_terms, what):
    """Grow a coefficient array until its geometric tail at ``zmax`` is below ``rtol``."""
    if zmax == 0.0:
        return coeffs_fn(1)
    n = 32
    while True:
        c = coeffs_fn(n)
        with np.errstate(under="ignore"):
            terms = np.abs(c) * zmax ** np.arange(n)
        total = abs(float(np.sum(c * zmax ** np.arange(n))))
        r = terms[-1] / terms[-2] if terms[-2] > 0 else 0.0
        if r < 1.0 and terms[-1] * r / (1.0 - r) <= rtol * total:
            # drop trailing terms that cannot matter
            keep = np.nonzero(terms > rtol * total * (1.0 - r) * 1e-3)[0]
            m = int(keep[-1]) + 2 if keep.size else 1
            return c[:min(m, n)]
        if n >= max_terms:
            raise NumericError(f"{what} series needs more than {max_terms} terms at z={zmax}")
        n = min(2 * n, max_terms)


def j_series_coeffs(b: float, g: float, zmax: float, rtol: float = 1e-17, max_terms: int = 20000):
    """Coefficients ``c_j`` with ``J(z) = z**g * sum_j c_j z**j`` for ``z <= zmax``.

    ``c_j = (1+b)_j / (j! (g+j))``, all positive when ``b > -1``.  The series
    is truncated once the remaining terms cannot change the sum at ``zmax`` by
    more than ``rtol`` relative.
    """
    if not 0.0 <= zmax < 1.0:
        raise ParameterError(f"series needs 0 <= zmax < 1, got {zmax}")
    return _truncate(lambda n: _raw_coeffs(b, g, n), zmax, rtol, max_terms, "J")


def _horner(coeffs, z):
    acc = np.zeros_like(z)
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def _j_head(z, b, g):
    if z.size == 0:
        return z.copy()
    coeffs = j_series_coeffs(b, g, float(np.max(z)) if np.size(z) else 0.0)
    return np.power(z, g) * _horner(coeffs, z)


def _j_tail_terms(b, g, w_hi):
    """Coefficients ``d_k`` of ``(1-w)**(g-1) = sum_k d_k w**k`` to machine precision on w <= w_hi."""
    d = [1.0]
    k = 0
    while True:
        nxt = d[-1] * (k + 1 - g) / (k + 1)
        k += 1
        if nxt == 0.0 or (abs(nxt) * w_hi ** k < 1e-18 and k > 2):
            if nxt != 0.0:
                d.append(nxt)
            break
        d.append(nxt)
        if k > 400:
            break
    return np.array(d)


def _j_tail(w, b, g):
    """``int_{zs}^{1-w} s**(g-1) (1-s)**(-b-1) ds`` via the expansion in ``w = 1-s``."""
    w0 = 1.0 - _SPLIT_Z
    d = _j_tail_terms(b, g, w0)
    out = np.zeros_like(w)
    lr = np.log(w0 / w)  # >= 0
    for k, dk in enumerate(d):
        e = k - b
        # (w0**e - w**e)/e = w**e * ((w0/w)**e - 1)/e
        out += dk * np.power(w, e) * pow_ratio_log(lr, e)
    return out


def _j_eval(z, w, b, g):
    out = np.empty_like(z)
    head = z <= _SPLIT_Z
    if head.any():
        out[head] = _j_head(z[head], b, g)
    if (~head).any():
        base = float(_j_head(np.array([_SPLIT_Z]), b, g)[0])
        out[~head] = base + _j_tail(w[~head], b, g)
    return out


def j_integral(z, b: float, g: float):
    """``J(z; b, g) = int_0^z s**(g-1) (1-s)**(-b-1) ds`` for ``0 <= z < 1``, vectorised."""
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any((z < 0) | (z >= 1)):
        raise ParameterError("J integral needs 0 <= z < 1")
    out = _j_eval(z, 1.0 - z, b, g)
    return out[0] if scalar else out


def j_integral_y(y, b: float, g: float):
    """``int_1^y (x-1)**(g-1) * x**(b-g) dx`` for ``y >= 1``, i.e. ``J(1 - 1/y)``."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    if np.any(y < 1):
        raise ParameterError("J integral needs y >= 1")
    out = _j_eval(-np.expm1(-np.log(y)), 1.0 / y, b, g)
    return out[0] if scalar else out


def msharp_series_coeffs(b: float, g: float, zmax: float, rtol: float = 1e-17, max_terms: int = 20000):
    """Coefficients ``a_m`` with ``int_0^Z J(s)/(1-s) ds = Z**(g+1) sum_m a_m Z**m``.

    With ``S_m`` the partial sums of the J coefficients,
    ``a_m = S_m / (g + 1 + m)``.
    """
    if not 0.0 <= zmax < 1.0:
        raise ParameterError(f"series needs 0 <= zmax < 1, got {zmax}")

    def coeffs(n):
        return np.cumsum(_raw_coeffs(b, g, n)) / (g + 1.0 + np.arange(n))

    return _truncate(coeffs, zmax, rtol, max_terms, "m-sharp cdf")


def msharp_integral(z, b: float, g: float):
    """``int_0^z J(s)/(1-s) ds``: the unnormalised m-sharp cdf in ``z = 1 - 1/y``."""
    z = np.asarray(z, dtype=float)
    zmax = float(np.max(z)) if z.size else 0.0
    if zmax >= 1.0:
        raise ParameterError("m-sharp integral needs z < 1")
    a = msharp_series_coeffs(b, g, zmax)
    return np.power(z, g + 1.0) * _horner(a, z)


# ---------------------------------------------------------------------------
# exact constants in multiprecision


def _mp_pow_ratio(log_y, e):
    e = mp.mpf(e)
    if e == 0:
        return log_y
    return mp.expm1(e * log_y) / e


def j_exact(z, b: float, g: float) -> float:
    """J in multiprecision via the Gauss hypergeometric closed form."""
    with mp.workdps(_MP_DPS):
        z = mp.mpf(z)
        g = mp.mpf(g)
        val = z ** g / g * mp.hyp2f1(g, 1 + mp.mpf(b), g + 1, z)
        return float(val)


def kstar_alternating(b: float, g: int, eta: float) -> float:
    """``sum_k (-1)**k C(g-1,k) (eta**(b-k) - 1)/(b-k)`` in multiprecision."""
    with mp.workdps(_MP_DPS):
        L = mp.log(mp.mpf(eta))
        tot = mp.mpf(0)
        for k in range(int(g)):
            tot += (-1) ** k * mp.binomial(g - 1, k) * _mp_pow_ratio(L, mp.mpf(b) - k)
        return float(tot)


def _mp_sharp_term(L, d):
    """``(d*L - 1 + exp(-d*L)) / d**2`` with the ``L**2/2`` limb at ``d = 0``."""
    if d == 0:
        return L * L / 2
    x = d * L
    if abs(x) < 0.1:
        # x - 1 + e**-x = x**2 sum_j (-x)**j / (j+2)!, free of cancellation
        return L * L * mp.nsum(lambda j: (-x) ** j / mp.factorial(j + 2), [0, mp.inf])
    return (x - 1 + mp.exp(-x)) / (d * d)


def cstar_alternating(b: float, g: int, eta: float) -> float:
    """Closed sum for the IBGM constant with ``p = 1``:
    ``sum_k (-1)**k C(g-1,k) ((k-b) ln eta - 1 + eta**(b-k)) / (k-b)**2``."""
    with mp.workdps(_MP_DPS):
        L = mp.log(mp.mpf(eta))
        tot = mp.mpf(0)
        for k in range(int(g)):
            tot += (-1) ** k * mp.binomial(g - 1, k) * _mp_sharp_term(L, k - mp.mpf(b))
        return float(tot)


def msharp_cdf_alternating(y: float, b: float, g: int, eta: float) -> float:
    """Closed-sum m-sharp cdf (``p = 1``) in multiprecision; a test oracle."""
    with mp.workdps(_MP_DPS):
        Ly = mp.log(mp.mpf(y))
        num = mp.mpf(0)
        for k in range(int(g)):
            num += (-1) ** k * mp.binomial(g - 1, k) * _mp_sharp_term(Ly, k - mp.mpf(b))
        return float(num / mp.mpf(cstar_alternating(b, g, eta)))


def ibgm_moment_sum(beta: float, g: int, p: float, eta: float, xi: float) -> float:
    """``sum_k C(g-1,k)(-1)**k/(pk-beta) * int_1^eta t**(-xi-1)(1 - t**(beta-pk)) dt``.

    Each summand equals ``int_1^eta t**(-xi-1) * (1 - t**(beta-pk))/(pk-beta) dt``;
    the ``beta = pk`` limb is ``int_1^eta t**(-xi-1) ln t dt``.  Evaluated in
    multiprecision so the alternating sum keeps full double accuracy.
    """
    with mp.workdps(_MP_DPS):
        L = mp.log(mp.mpf(eta))
        xi = mp.mpf(xi)
        tot = mp.mpf(0)
        for k in range(int(g)):
            d = p * k - mp.mpf(beta)
            if d == 0:
                # int_1^eta t^(-xi-1) ln t dt
                if xi == 0:
                    term = L * L / 2
                else:
                    term = (1 - mp.exp(-xi * L) * (xi * L + 1)) / (xi * xi)
            else:
                # (1/d) * [ (1 - eta^-xi)/xi + (1 - eta^(-d-xi))/(-d-xi) ]; the
                # difference loses about -log10|d| digits, so add them back
                with mp.extradps(max(0, int(-mp.log10(abs(d)))) + 5):
                    a1 = _mp_pow_ratio(L, -xi)  # (1 - eta^-xi)/xi
                    a2 = _mp_pow_ratio(L, -d - xi)  # (1 - eta^(-d-xi))/(d+xi)
                    term = (a1 - a2) / d
            tot += (-1) ** k * mp.binomial(g - 1, k) * term
        return float(tot)


# ---------------------------------------------------------------------------
# incomplete gamma


def gammaincinv_lower(a: float, q: float) -> float:
    """``x`` with regularised lower incomplete gamma ``P(a, x) = q``."""
    return float(sc.gammaincinv(a, q))
