"""One-dimensional p-tempered alpha-stable laws ``TS^p_alpha(R, b)``.

The characteristic function is ``exp(c(z))`` with

    c(z) = i b z + sum_i r_i int_0^inf (e^{i t x_i z} - 1 - i t x_i z 1[alpha >= 1])
                                      t^{-1-alpha} e^{-t^p} dt

for a Rosinski measure ``R = sum_i r_i delta_{x_i}`` with finitely many atoms.

Samplers
--------
``sample_ts_cp``      exact, ``alpha < 0`` (compound Poisson)
``sample_ts_cts``     exact, ``p = 1`` and ``0 < alpha < 1`` (tilted positive stable)
``sample_ts_series``  approximate, ``0 <= alpha < 1`` and any ``p`` (inverse Levy
                      series with small-jump compensation)
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import special as sc
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from . import _kernels
from .errors import ConfigurationError, ParameterError, RegimeError
from .ggsm import RejectionStats, rejection_sample
from .rand_core import RandomStream
from .special import integrate

#: expected jumps per draw above which the series sampler refuses to run
MAX_SERIES_JUMPS = 100_000
#: nodes of the tail-measure inversion table
TAIL_TABLE_NODES = 512
DEFAULT_SERIES_TOL = 1e-4


@dataclass(frozen=True)
class RosinskiMeasure:
    """Finite discrete measure ``sum_i weights[i] * delta_{locations[i]}``."""

    locations: tuple
    weights: tuple

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.locations, dtype=float))
        r = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if x.shape != r.shape or x.ndim != 1 or x.size == 0:
            raise ParameterError("locations and weights must be equal-length non-empty sequences")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(r))):
            raise ParameterError("atoms must be finite")
        if np.any(x == 0):
            raise ParameterError("a Rosinski measure may not charge 0")
        if np.any(r <= 0):
            raise ParameterError("atom weights must be > 0")
        object.__setattr__(self, "locations", tuple(float(v) for v in x))
        object.__setattr__(self, "weights", tuple(float(v) for v in r))

    @classmethod
    def point(cls, location: float, weight: float = 1.0) -> "RosinskiMeasure":
        return cls((location,), (weight,))

    @classmethod
    def rapidly_decreasing(cls, c: float, beta: float, alpha: float) -> "RosinskiMeasure":
        """``c beta**alpha delta_{1/beta}``: the one-sided p-RDTS measure."""
        if c <= 0 or beta <= 0:
            raise ParameterError(f"c and beta must be > 0, got {c}, {beta}")
        return cls.point(1.0 / beta, c * beta**alpha)

    @classmethod
    def bilateral(cls, c_minus, beta_minus, c_plus, beta_plus, alpha) -> "RosinskiMeasure":
        return cls((-1.0 / beta_minus, 1.0 / beta_plus),
                   (c_minus * beta_minus**alpha, c_plus * beta_plus**alpha))

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.locations)

    @property
    def r(self) -> np.ndarray:
        return np.asarray(self.weights)

    @property
    def total_mass(self) -> float:
        return float(self.r.sum())

    @property
    def pmf(self) -> np.ndarray:
        return self.r / self.r.sum()

    def moment(self, k: float) -> float:
        """``int x**k R(dx)``."""
        return float(np.dot(self.r, self.x**k))

    def scaled(self, factor: float) -> "RosinskiMeasure":
        """The measure ``factor * R`` (``factor > 0``)."""
        if not factor > 0:
            raise ParameterError(f"scale factor must be > 0, got {factor}")
        return RosinskiMeasure(self.locations, tuple(factor * self.r))


@dataclass(frozen=True)
class TSParams:
    """``TS^p_alpha(R, b)`` with ``alpha < 2``, ``p > 0``."""

    alpha: float
    p: float
    R: RosinskiMeasure
    b: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "p", "b"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.alpha >= 2:
            raise ParameterError(f"alpha must be < 2, got {self.alpha}")
        if self.p <= 0:
            raise ParameterError(f"p must be > 0, got {self.p}")
        if not isinstance(self.R, RosinskiMeasure):
            raise ParameterError("R must be a RosinskiMeasure")

    @classmethod
    def rapidly_decreasing(cls, alpha, p, c=1.0, beta=1.0, b=0.0) -> "TSParams":
        return cls(alpha, p, RosinskiMeasure.rapidly_decreasing(c, beta, alpha), b)

    @property
    def gamma_(self) -> int:
        """``1 + floor(alpha/p)`` for ``alpha`` in ``(0, 2)``, else 1."""
        if 0 < self.alpha < 2:
            return 1 + int(np.floor(self.alpha / self.p))
        return 1

    def with_measure(self, R: RosinskiMeasure, b: float = 0.0, alpha: Optional[float] = None):
        return TSParams(self.alpha if alpha is None else alpha, self.p, R, b)


def ts_cumulant(params: TSParams, k: int) -> float:
    """``c_k = Gamma((k-alpha)/p)/p * int x**k R(dx) + 1[k=1] b``; ``c_1 = b`` for ``alpha >= 1``."""
    k = int(k)
    if k < 1:
        raise ParameterError(f"cumulant order must be >= 1, got {k}")
    if k == 1 and params.alpha >= 1:
        return params.b
    val = sc.gamma((k - params.alpha) / params.p) / params.p * params.R.moment(k)
    return float(val + (params.b if k == 1 else 0.0))


def levy_tail(params: TSParams, t):
    """``int_t^inf s**(-1-alpha) e^{-s**p} ds`` for ``t > 0``: mass of jumps above ``t x_i`` per unit weight."""
    return _kernels.tail_measure(np.asarray(t, dtype=float), params.alpha, params.p)


def characteristic_exponent(params: TSParams, z: float) -> complex:
    """``c(z)`` by adaptive quadrature over the radial variable.

    On ``[0, 1]`` the linear part ``w t`` of ``sin(w t)`` is removed so the
    remaining integrand is bounded; for ``alpha < 1`` it is added back in closed
    form through the incomplete gamma function.  The tail ``[1, t_hi]`` uses the oscillatory rule, which stays
    accurate when ``e^{-t**p}`` decays slowly (small ``p``) and the integrand
    oscillates over many periods.
    """
    a, p = params.alpha, params.p
    comp = a >= 1
    # beyond t_hi the factor e^{-t**p} is below e**-40
    t_hi = max(40.0 ** (1.0 / p), 2.0)

    def k(t):
        return t ** (-1 - a) * np.exp(-t**p)

    tail_mass = integrate(k, 1.0, t_hi, epsabs=1e-14, epsrel=1e-12, what="Levy tail mass")
    tail_first = (integrate(lambda t: t * k(t), 1.0, t_hi, epsabs=1e-14, epsrel=1e-12,
                            what="Levy tail first moment") if comp else 0.0)
    # int_0^1 t**(-alpha) e^{-t**p} dt, the uncompensated linear head term
    s = (1.0 - a) / p
    head_linear = 0.0 if comp else float(sc.gammainc(s, 1.0) * sc.gamma(s) / p)
    re = im = 0.0
    for x, r in zip(params.R.x, params.R.r):
        w = x * z
        if w == 0:
            continue
        aw, sgn = abs(w), np.sign(w)

        def f_re(t):
            return -2.0 * np.sin(0.5 * aw * t) ** 2 * k(t)

        def f_im(t):
            return (np.sin(aw * t) - aw * t) * k(t)

        head_re = integrate(f_re, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12,
                            what="characteristic exponent (real part near 0)")
        head_im = integrate(f_im, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12,
                            what="characteristic exponent (imaginary part near 0)")
        cos_tail = integrate(k, 1.0, t_hi, epsabs=1e-14, weight="cos", wvar=aw,
                             what="characteristic exponent (real tail)")
        sin_tail = integrate(k, 1.0, t_hi, epsabs=1e-14, weight="sin", wvar=aw,
                             what="characteristic exponent (imaginary tail)")
        re += r * (head_re + cos_tail - tail_mass)
        im += r * sgn * (head_im + aw * head_linear + sin_tail - aw * tail_first)
    return complex(re, im + params.b * z)


def characteristic_function(params: TSParams, z: float) -> complex:
    return complex(np.exp(characteristic_exponent(params, z)))


# ---------------------------------------------------------------------------
# compound Poisson (alpha < 0)


def _sum_by_draw(n: int, counts: np.ndarray, values: np.ndarray) -> np.ndarray:
    owner = np.repeat(np.arange(n), counts)
    return np.bincount(owner, weights=values, minlength=n)


def _pick_atoms(s: RandomStream, R: RosinskiMeasure, m: int) -> np.ndarray:
    if len(R.locations) == 1:
        return np.full(m, R.locations[0])
    idx = np.searchsorted(np.cumsum(R.pmf), s.uniform(m), side="right")
    return R.x[np.minimum(idx, len(R.locations) - 1)]


class CompoundPoissonSampler:
    """Exact sampler for ``alpha < 0``: Poisson many jumps ``x_i * GGa(|alpha|, p, 1)`` plus ``b``."""

    def __init__(self, params: TSParams):
        if params.alpha >= 0:
            raise RegimeError(f"compound Poisson sampling needs alpha < 0, got {params.alpha}")
        self.params = params
        a = -params.alpha
        self.jump_rate = float(params.R.total_mass * sc.gamma(a / params.p) / params.p)

    def __call__(self, s: RandomStream, n: int) -> np.ndarray:
        pr = self.params
        counts = s.poisson(self.jump_rate, n)
        total = int(counts.sum())
        jumps = _pick_atoms(s, pr.R, total) * np.power(
            s.standard_gamma(-pr.alpha / pr.p, total), 1.0 / pr.p)
        return pr.b + _sum_by_draw(n, counts, jumps)


def sample_ts_cp(s: RandomStream, params: TSParams, size=None):
    """Exact draw from ``TS^p_alpha(R, b)`` for ``alpha < 0``."""
    n = 1 if size is None else int(np.prod(size))
    out = CompoundPoissonSampler(params)(s, n)
    return float(out[0]) if size is None else out.reshape(size)


# ---------------------------------------------------------------------------
# classical tempered stable (p = 1)


def positive_stable(s: RandomStream, alpha: float, n: int) -> np.ndarray:
    """Kanter's representation of ``S`` with ``E exp(-u S) = exp(-u**alpha)``, ``0 < alpha < 1``."""
    u = np.pi * s.uniform(n)
    e = s.exponential(n)
    a = np.sin(alpha * u) / np.sin(u) ** (1.0 / alpha)
    c = (np.sin((1.0 - alpha) * u) / e) ** ((1.0 - alpha) / alpha)
    return a * c


class CTSSampler:
    """Exact sampler for ``p = 1``, ``0 < alpha < 1``.

    For each atom ``(x, r)`` the law is a sum of ``m`` independent copies of a
    positive stable variable tilted by ``e^{-y/|x|}``; each copy is drawn by
    rejection with acceptance ``exp(-r Gamma(1-alpha)/(alpha m))``, and ``m``
    is chosen so this is at least ``e**-1``.
    """

    def __init__(self, params: TSParams):
        if params.p != 1 or not 0 < params.alpha < 1:
            raise RegimeError("the exact CTS sampler needs p = 1 and 0 < alpha < 1, "
                              f"got p={params.p}, alpha={params.alpha}")
        self.params = params
        a = params.alpha
        self.pieces = []
        for x, r in zip(params.R.x, params.R.r):
            load = r * sc.gamma(1.0 - a) / a
            m = max(1, int(np.ceil(load)))
            scale = (load / m) ** (1.0 / a) * abs(x)
            self.pieces.append((np.sign(x), abs(x), m, scale, float(np.exp(load / m))))

    def __call__(self, s: RandomStream, n: int, stats: Optional[RejectionStats] = None):
        a = self.params.alpha
        out = np.full(n, self.params.b)
        for sign, ax, m, scale, v in self.pieces:
            y = rejection_sample(s, n * m, lambda k: scale * positive_stable(s, a, k),
                                 lambda y: np.exp(-y / ax), v, stats=stats,
                                 what="tempered positive stable")
            out += sign * y.reshape(n, m).sum(axis=1)
        return out


def sample_ts_cts(s: RandomStream, params: TSParams, size=None, *,
                  stats: Optional[RejectionStats] = None):
    """Exact draw from ``TS^1_alpha(R, b)`` with ``0 < alpha < 1``."""
    n = 1 if size is None else int(np.prod(size))
    out = CTSSampler(params)(s, n, stats)
    return float(out[0]) if size is None else out.reshape(size)


# ---------------------------------------------------------------------------
# inverse Levy series (0 <= alpha < 1)


class SeriesSampler:
    """Approximate sampler by the inverse Levy measure method.

    Jumps ``t x_i`` with ``t`` above a per-atom threshold ``tau`` are simulated
    exactly: their number is Poisson with mean ``r_i U(tau)`` and each ``t``
    solves ``U(t) = V U(tau)`` for uniform ``V``, where
    ``U(t) = int_t^inf s**(-1-alpha) e^{-s**p} ds``.  The discarded jumps below
    ``tau`` are replaced by their mean and, when ``gaussian`` is true, by a
    normal variable with their variance, so the first two cumulants are exact.

    ``tau`` is the largest value for which the discarded share of the first
    cumulant not matched (the third when ``gaussian``, else the second) is at
    most ``tol``.

    Parameters
    ----------
    tol : float
        Relative truncation tolerance.
    gaussian : bool
        Whether to add the normal small-jump correction.
    max_jumps : float
        Refuse (ConfigurationError) when more jumps per draw would be needed.
    """

    def __init__(self, params: TSParams, tol: float = DEFAULT_SERIES_TOL, *,
                 gaussian: bool = True, max_jumps: float = MAX_SERIES_JUMPS):
        a, p = params.alpha, params.p
        if a >= 1:
            raise RegimeError(f"the series sampler needs alpha < 1 (no compensation), got {a}")
        if a < 0:
            raise RegimeError(f"alpha < 0 is compound Poisson; use sample_ts_cp (alpha={a})")
        if not 0 < tol < 1:
            raise ParameterError(f"tol must be in (0, 1), got {tol}")
        self.params = params
        self.tol = float(tol)
        self.gaussian = bool(gaussian)
        order = 3 if gaussian else 2
        self.tau = float(sc.gammaincinv((order - a) / p, tol) ** (1.0 / p))
        if not self.tau > 0:
            raise ConfigurationError(f"series truncation underflowed for tol={tol}")
        self.tail_at_tau = float(_kernels.tail_measure(self.tau, a, p))
        R = params.R
        self.rates = R.r * self.tail_at_tau
        self.expected_jumps = float(self.rates.sum())
        if self.expected_jumps > max_jumps:
            raise ConfigurationError(
                f"series sampler would need {self.expected_jumps:.3g} jumps per draw "
                f"(cap {max_jumps:g}); raise tol or max_jumps")
        # moments of the discarded part t < tau, per unit weight
        lower1 = sc.gammainc((1 - a) / p, self.tau**p) * sc.gamma((1 - a) / p) / p
        lower2 = sc.gammainc((2 - a) / p, self.tau**p) * sc.gamma((2 - a) / p) / p
        self.shift = float(params.b + np.dot(R.r, R.x) * lower1)
        self.small_jump_sd = float(np.sqrt(np.dot(R.r, R.x**2) * lower2)) if gaussian else 0.0

    @cached_property
    def _table(self):
        """Monotone interpolant of ``log t`` against ``log U(t)`` for the Newton start."""
        a, p = self.params.alpha, self.params.p
        top = np.log(self.tail_at_tau)

        def excess(lt):
            return np.log(_kernels.tail_measure(np.exp(lt), a, p)) - (top + np.log(1e-12))

        lt_hi = np.log(self.tau)
        while excess(lt_hi + 1.0) > 0:
            lt_hi += 1.0
        lt_hi = brentq(excess, lt_hi, lt_hi + 1.0, xtol=1e-10)
        lt = np.linspace(np.log(self.tau), lt_hi, TAIL_TABLE_NODES)
        lu = np.log(_kernels.tail_measure(np.exp(lt), a, p))
        return PchipInterpolator(lu[::-1], lt[::-1], extrapolate=True)

    def jump_sizes(self, v: np.ndarray) -> np.ndarray:
        """``t`` with ``U(t) = v U(tau)`` for ``v`` in ``(0, 1]``."""
        target = v * self.tail_at_tau
        x0 = np.exp(self._table(np.log(target)))
        x0 = np.where(np.isfinite(x0) & (x0 > 0), x0, self.tau)
        return _kernels.invert_tail(target, x0, self.params.alpha, self.params.p, 1e-12)

    def __call__(self, s: RandomStream, n: int) -> np.ndarray:
        R = self.params.R
        out = np.full(n, self.shift)
        for x, rate in zip(R.x, self.rates):
            counts = s.poisson(rate, n)
            total = int(counts.sum())
            if total:
                out += x * _sum_by_draw(n, counts, self.jump_sizes(s.uniform(total)))
        if self.gaussian:
            out += self.small_jump_sd * s.standard_normal(n)
        return out


def sample_ts_series(s: RandomStream, params: TSParams, size=None, *,
                     tol: float = DEFAULT_SERIES_TOL, gaussian: bool = True):
    """Approximate draw from ``TS^p_alpha(R, b)``, ``0 <= alpha < 1``; see :class:`SeriesSampler`."""
    n = 1 if size is None else int(np.prod(size))
    out = SeriesSampler(params, tol, gaussian=gaussian)(s, n)
    return float(out[0]) if size is None else out.reshape(size)


# ---------------------------------------------------------------------------
# dispatch

TS_METHODS = ("cp", "cts", "series")


def auto_ts_method(params: TSParams) -> str:
    if params.alpha < 0:
        return "cp"
    if params.alpha >= 1:
        raise RegimeError(f"no sampler for alpha in [1, 2) (alpha={params.alpha})")
    if params.p == 1 and params.alpha > 0:
        return "cts"
    return "series"


def ts_sampler(params: TSParams, method: str = "auto", **kwargs):
    """A reusable callable ``(stream, n) -> draws`` for ``TS^p_alpha(R, b)``."""
    if method == "auto":
        method = auto_ts_method(params)
    if method == "cp":
        return CompoundPoissonSampler(params)
    if method == "cts":
        return CTSSampler(params)
    if method == "series":
        return SeriesSampler(params, **kwargs)
    raise ConfigurationError(f"unknown TS method {method!r}; choose from {TS_METHODS}")


def sample_ts(s: RandomStream, params: TSParams, method: str = "auto", size=None, **kwargs):
    n = 1 if size is None else int(np.prod(size))
    out = ts_sampler(params, method, **kwargs)(s, n)
    return float(out[0]) if size is None else out.reshape(size)
