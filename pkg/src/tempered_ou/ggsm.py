"""Generalized gamma laws and generalized gamma scale mixtures (GGSM).

A GGSM with shape ``gamma_``, power ``p`` and mixing density ``m`` has pdf

    f(u) = int g_{gamma_, p, theta**p}(u) m(theta) dtheta,

where ``g_{gamma_, p, theta}`` is the generalized gamma density.  It can be
simulated directly as ``Y**(1/p) / Z`` with ``Y ~ Ga(gamma_/p)`` and
``Z ~ m``, or by rejection from ``GGa(gamma_, p, a**p)`` when the support of
``m`` is bounded below by ``a > 0``.  The IGa, IBGM and DGGa modules plug
their mixing densities into this framework.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special as sc
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError, DomainError, NumericError, ParameterError
from .rand_core import RandomStream
from .special import gauss_legendre, integrate

#: proposals allowed without a single acceptance before a rejection loop gives up
MAX_CONSECUTIVE_REJECTIONS = 10**7


def _positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be finite and > 0, got {value}")
    return float(value)


def _as_output(x, size):
    return float(x[0]) if size is None else x.reshape(size)


def _count(size):
    return 1 if size is None else int(np.prod(size))


# ---------------------------------------------------------------------------
# generalized gamma


@dataclass(frozen=True)
class GGaParams:
    """Generalized gamma law with density ``p th**(g/p) u**(g-1) exp(-th u**p) / Gamma(g/p)``."""

    gamma_: float
    p: float
    theta: float = 1.0

    def __post_init__(self):
        for name in ("gamma_", "p", "theta"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))


def gga_logpdf(params: GGaParams, u):
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise DomainError("generalized gamma density needs u > 0")
    g, p, th = params.gamma_, params.p, params.theta
    return (np.log(p) + g / p * np.log(th) + (g - 1) * np.log(u)
            - th * u**p - sc.gammaln(g / p))


def gga_pdf(params: GGaParams, u):
    """Generalized gamma density at ``u > 0``."""
    return np.exp(gga_logpdf(params, u))


def gga_cdf(params: GGaParams, u):
    u = np.asarray(u, dtype=float)
    return sc.gammainc(params.gamma_ / params.p, params.theta * np.power(u, params.p))


def gga_ppf(params: GGaParams, q):
    x = sc.gammaincinv(params.gamma_ / params.p, np.asarray(q, dtype=float))
    return np.power(x / params.theta, 1.0 / params.p)


def gga_moment(params: GGaParams, xi: float) -> float:
    """``E[X**xi] = Gamma((g+xi)/p) / (Gamma(g/p) theta**(xi/p))`` for ``xi > -g``."""
    g, p = params.gamma_, params.p
    if xi <= -g:
        raise ParameterError(f"moment of order {xi} does not exist (needs xi > {-g})")
    return float(np.exp(sc.gammaln((g + xi) / p) - sc.gammaln(g / p)
                        - xi / p * np.log(params.theta)))


def sample_gga(s: RandomStream, params: GGaParams, size=None):
    """``(X/theta)**(1/p)`` with ``X ~ Ga(gamma_/p, 1)``."""
    x = s.standard_gamma(params.gamma_ / params.p, _count(size))
    return _as_output(np.power(x / params.theta, 1.0 / params.p), size)


# ---------------------------------------------------------------------------
# power-law density on (1, eta)


@dataclass(frozen=True)
class EllParams:
    """Density proportional to ``theta**delta`` on ``(1, eta)``."""

    delta: float
    eta: float

    def __post_init__(self):
        if not (np.isfinite(self.eta) and self.eta > 1):
            raise ParameterError(f"eta must be > 1, got {self.eta}")
        if not np.isfinite(self.delta):
            raise ParameterError(f"delta must be finite, got {self.delta}")


def ell_inverse(u, delta: float, eta: float):
    """Inverse cdf of the ``theta**delta`` law on ``(1, eta)``, stable for all ``delta``."""
    u = np.asarray(u, dtype=float)
    e = delta + 1.0
    le = np.log(eta)
    if e == 0.0:
        return np.exp(u * le)
    return np.exp(np.log1p(u * np.expm1(e * le)) / e)


def ell_pdf(params: EllParams, theta):
    from .special import pow_ratio

    theta = np.asarray(theta, dtype=float)
    out = np.power(theta, params.delta) / pow_ratio(params.eta, params.delta + 1.0)
    return np.where((theta > 1) & (theta < params.eta), out, 0.0)


def ell_moment(params: EllParams, xi: float = 1.0) -> float:
    from .special import pow_ratio

    d, eta = params.delta, params.eta
    return float(pow_ratio(eta, d + 1.0 + xi) / pow_ratio(eta, d + 1.0))


def sample_ell(s: RandomStream, params: EllParams, size=None):
    u = s.uniform(_count(size))
    return _as_output(ell_inverse(u, params.delta, params.eta), size)


# ---------------------------------------------------------------------------
# rejection loop


@dataclass
class RejectionStats:
    """Running proposal and acceptance counts of a rejection sampler."""

    proposals: int = 0
    accepted: int = 0

    @property
    def rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else float("nan")

    def add(self, proposals: int, accepted: int) -> None:
        self.proposals += int(proposals)
        self.accepted += int(accepted)


def rejection_sample(s: RandomStream, n: int, propose: Callable, accept_prob: Callable,
                     v: float, *, squeeze: Optional[Callable] = None,
                     stats: Optional[RejectionStats] = None, what: str = "rejection sampler"):
    """Draw ``n`` accepted values from ``propose`` with acceptance ``accept_prob``.

    ``propose(m)`` returns ``m`` candidates, ``accept_prob(x)`` their acceptance
    probabilities in [0, 1].  Proposals are drawn in batches sized from the
    expected rejection constant ``v``, so the sequence of stream calls depends
    only on ``n`` and ``v``.  ``squeeze(x)``, if given, is a cheap upper bound
    on ``accept_prob``; candidates whose uniform exceeds it are rejected
    without evaluating ``accept_prob``.
    """
    out = np.empty(n)
    filled = 0
    idle = 0
    v = max(float(v), 1.0)
    while filled < n:
        need = n - filled
        m = int(min(need * v * 1.1 + 16, 4_000_000))
        x = propose(m)
        u = s.uniform(m)
        if squeeze is None:
            ok = u <= accept_prob(x)
        else:
            ok = u <= squeeze(x)
            ok[ok] = u[ok] <= accept_prob(x[ok])
        got = x[ok]
        k = min(got.size, need)
        out[filled:filled + k] = got[:k]
        filled += k
        if stats is not None:
            # count only proposals up to the last one used
            used = m if k == got.size else int(np.nonzero(ok)[0][k - 1]) + 1
            stats.add(used, k)
        idle = 0 if k else idle + m
        if idle >= MAX_CONSECUTIVE_REJECTIONS:
            raise NumericError(f"{what}: {idle} consecutive proposals rejected; "
                               "the acceptance function is probably misconfigured")
    return out


# ---------------------------------------------------------------------------
# Laplace-type acceptance functions


class PhiTable:
    """Cheap evaluator for ``phi(u) = int e**(-u t) w(t) dt / int w(t) dt``.

    ``w`` is a non-negative weight on ``[0, t_max]``.  Integrals are computed
    by Gauss-Legendre on geometrically shrinking panels toward ``t = 0`` (which
    resolves both the power-law behaviour of ``w`` and the ``e**(-u t)`` boundary
    layer), then ``log phi`` is interpolated by a cubic spline in ``log1p(u)``.
    The spline is refined until it matches the quadrature at interval
    midpoints to ``rtol``.  Beyond ``u_max`` ``log phi`` is extended linearly.

    Parameters
    ----------
    weight : callable
        Vectorised ``w(t)`` for ``0 < t <= t_max``.
    t_max : float
        Upper end of the support of ``w``.
    u_max : float
        Largest argument for which full accuracy is needed.
    """

    def __init__(self, weight: Callable, t_max: float, u_max: float, *, rtol: float = 1e-9,
                 order: int = 24):
        if not (t_max > 0 and np.isfinite(t_max)):
            raise ConfigurationError(f"PhiTable needs a finite positive support, got {t_max}")
        x, gw = gauss_legendre(order)
        n_panels = int(np.ceil(np.log2(max(t_max * u_max, 1.0)))) + 48
        edges = t_max * np.exp2(-np.arange(n_panels + 1, dtype=float))[::-1]
        edges = np.concatenate([[0.0], edges])
        lo, hi = edges[:-1, None], edges[1:, None]
        self._t = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
        wts = (0.5 * (hi - lo) * gw).ravel() * weight(self._t)
        if np.any(wts < 0) or not np.all(np.isfinite(wts)):
            raise NumericError("PhiTable weight must be finite and non-negative")
        self.mass = float(wts.sum())
        self._w = wts / self.mass
        self.u_max = float(u_max)
        self.rtol = rtol
        self._build()

    def exact(self, u):
        """Quadrature value of ``phi`` (slow; used to build and verify the table)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return np.exp(-np.outer(u, self._t)) @ self._w

    def _build(self):
        n = 64
        xmax = np.log1p(self.u_max)
        while True:
            xs = np.linspace(0.0, xmax, n)
            ys = np.log(self.exact(np.expm1(xs)))
            spline = CubicSpline(xs, ys)
            mid = 0.5 * (xs[1:] + xs[:-1])
            err = np.max(np.abs(spline(mid) - np.log(self.exact(np.expm1(mid)))))
            if err <= self.rtol or n >= 8192:
                break
            n *= 2
        if not np.all(np.isfinite(ys)):
            raise NumericError("PhiTable underflowed; lower u_max")
        self.max_log_error = float(err)
        self._spline = spline
        self._xmax = xmax
        self._ymax = float(ys[-1])
        self._slope = float(spline(xmax, 1))

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        x = np.log1p(u)
        inside = x <= self._xmax
        y = np.where(inside, self._spline(np.minimum(x, self._xmax)),
                     self._ymax + self._slope * (x - self._xmax))
        return np.minimum(np.exp(y), 1.0)


# ---------------------------------------------------------------------------
# mixing densities


@dataclass(frozen=True)
class MixingDensity:
    """Everything the GGSM samplers need to know about a mixing density.

    Attributes
    ----------
    gamma_, p : float
        Shape and power of the generalized gamma kernel this mixer is paired with.
    lower, upper : float
        Support of ``m``; ``lower`` is the ``a > 0`` of the rejection bound.
    pdf : callable
        Vectorised ``m(theta)``.
    sampler : callable or None
        ``sampler(stream, n)`` returning ``n`` draws from ``m``.
    v : float
        Rejection constant ``a**-gamma_ * int theta**gamma_ m(theta) dtheta``.
    phi : callable or None
        Acceptance probability of the rejection sampler as a function of
        ``u = Y / a**p`` with ``Y ~ Ga(gamma_/p)``.
    """

    gamma_: float
    p: float
    lower: float
    upper: float
    pdf: Callable
    sampler: Optional[Callable] = None
    v: float = float("nan")
    phi: Optional[Callable] = None
    name: str = "mixer"
    extra: dict = field(default_factory=dict, compare=False)


def rejection_constant(gamma_: float, lower: float, upper: float, pdf: Callable) -> float:
    """``a**-gamma_ int theta**gamma_ m(theta) dtheta`` by adaptive quadrature."""
    val = integrate(lambda t: (t / lower) ** gamma_ * pdf(t), lower, upper,
                    epsabs=1e-10, what="rejection constant")
    return float(val)


def proposal_u_max(shape: float, tail: float = 1e-17) -> float:
    """Upper ``tail`` quantile of ``Ga(shape)``; arguments beyond it are almost never seen."""
    return float(sc.gammainccinv(shape, tail))


def tabulated_phi(gamma_: float, p: float, lower: float, upper: float, pdf: Callable,
                  **kwargs) -> PhiTable:
    """Acceptance function of the GGSM rejection sampler for a generic mixer.

    ``phi(u) = int e**(-u(th**p - a**p)) th**gamma_ m(th) dth / int th**gamma_ m(th) dth``
    is rewritten in ``t = th**p - a**p`` and tabulated.
    """
    ap = lower**p

    def weight(t):
        th = np.power(t + ap, 1.0 / p)
        # dth/dt = th**(1-p)/p
        return th ** (gamma_ + 1.0 - p) / p * pdf(th)

    u_max = kwargs.pop("u_max", proposal_u_max(gamma_ / p) / ap)
    return PhiTable(weight, upper**p - ap, u_max, **kwargs)


def point_mass_mixer(a: float, gamma_: float, p: float) -> MixingDensity:
    """Degenerate mixer at ``a``: the GGSM is ``GGa(gamma_, p, a**p)``."""
    a = _positive("a", a)

    def pdf(t):
        return np.where(np.asarray(t) == a, np.inf, 0.0)

    return MixingDensity(gamma_=gamma_, p=p, lower=a, upper=a, pdf=pdf,
                         sampler=lambda s, n: np.full(n, a), v=1.0,
                         phi=lambda u: np.ones_like(np.asarray(u, dtype=float)),
                         name="point mass")


# ---------------------------------------------------------------------------
# GGSM samplers


def ggsm_pdf(mix: MixingDensity, u):
    """GGSM density by quadrature of the mixture over ``theta``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u <= 0):
        raise DomainError("GGSM density needs u > 0")
    g, p = mix.gamma_, mix.p
    out = np.empty_like(u)
    for i, ui in enumerate(u):
        def integrand(th):
            return gga_pdf(GGaParams(g, p, th**p), ui) * mix.pdf(th)
        out[i] = integrate(integrand, mix.lower, mix.upper, epsrel=1e-12,
                           what="GGSM mixture")
    return out


def ggsm_sample_direct(s: RandomStream, gamma_: float, p: float, mix: MixingDensity,
                       size=None):
    """``Y**(1/p) / Z`` with ``Y ~ Ga(gamma_/p, 1)`` and ``Z ~ m``."""
    if mix.sampler is None:
        raise ConfigurationError(f"{mix.name} has no direct sampler")
    n = _count(size)
    y = s.standard_gamma(gamma_ / p, n)
    z = mix.sampler(s, n)
    return _as_output(np.power(y, 1.0 / p) / z, size)


def ggsm_sample_rejection(s: RandomStream, gamma_: float, p: float, mix: MixingDensity,
                          size=None, *, stats: Optional[RejectionStats] = None):
    """Rejection from ``GGa(gamma_, p, a**p)``: accept ``Y`` when ``U <= phi(Y/a**p)``."""
    if mix.phi is None:
        raise ConfigurationError(f"{mix.name} has no acceptance function")
    if not (np.isfinite(mix.v) and mix.v >= 1 - 1e-12):
        raise ConfigurationError(f"{mix.name}: rejection constant {mix.v} is not usable")
    if mix.lower <= 0:
        raise ConfigurationError("rejection needs a mixer supported away from 0")
    ap = mix.lower**p
    shape = gamma_ / p
    y = rejection_sample(s, _count(size), lambda m: s.standard_gamma(shape, m),
                         lambda y: mix.phi(y / ap), mix.v, stats=stats,
                         what=f"GGSM rejection ({mix.name})")
    return _as_output(np.power(y, 1.0 / p) / mix.lower, size)
