"""The incomplete gamma (IGa) distribution.

``IGa(beta, gamma_, p, eta)`` has density

    f(u) = G_gamma(u**p (eta - 1)) exp(-u**p) u**(-1-beta) / K,   u > 0,

with ``G_gamma`` the regularised lower incomplete gamma function.  It is the
GGSM with kernel shape ``p*gamma_ - beta`` and mixing density

    m(theta) = p/K* (theta**p - 1)**(gamma_-1) theta**(p+beta-p*gamma_-1),  1 < theta < eta**(1/p).

All mixing-density samplers work with the ``p = 1`` law ``m_{beta/p, gamma_, 1, eta}``
and raise the draw to ``1/p`` at the end.

Method names follow common usage: ``ARGS`` (GGSM1 with rejection mixer
sampling), ``Inverse`` (GGSM1 with cdf inversion), ``ARBD`` (GGSM1 with the
positive-term mixture envelope) and ``ARG`` (GGSM2 rejection from a gamma law).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import special as sc

from . import _kernels
from .errors import ConfigurationError, DomainError, ParameterError
from .ggsm import MixingDensity, RejectionStats, ell_inverse, rejection_sample
from .rand_core import RandomStream
from .special import (integrate, j_integral_y, j_series_coeffs, kstar_alternating, pow_ratio,
                      _horner)

METHODS = ("ARGS", "Inverse", "ARBD", "ARG")
MIXER_METHODS = ("M0", "M1", "M2", "M3")
#: largest ``1 - 1/eta`` for which the power-series cdf inversion is used
INVERSION_ZMAX = 0.995


def _is_int(x) -> bool:
    return float(x).is_integer()


@dataclass(frozen=True)
class IGaParams:
    """Parameters of ``IGa(beta, gamma_, p, eta)``; requires ``beta < p*gamma_`` and ``eta > 1``."""

    beta: float
    gamma_: float
    p: float
    eta: float

    def __post_init__(self):
        for name in ("beta", "gamma_", "p", "eta"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.gamma_ <= 0:
            raise ParameterError(f"gamma_ must be > 0, got {self.gamma_}")
        if self.p <= 0:
            raise ParameterError(f"p must be > 0, got {self.p}")
        if self.eta <= 1:
            raise ParameterError(f"eta must be > 1, got {self.eta}")
        if self.beta >= self.p * self.gamma_:
            raise ParameterError(f"need beta < p*gamma_, got beta={self.beta}, "
                                 f"p*gamma_={self.p * self.gamma_}")

    @property
    def b(self) -> float:
        """``beta / p``: the ``beta`` of the equivalent ``p = 1`` mixing law."""
        return self.beta / self.p

    @property
    def gamma_shape(self) -> float:
        """Shape ``gamma_ - beta/p`` of the gamma variable in both samplers."""
        return self.gamma_ - self.b


# ---------------------------------------------------------------------------
# constants


def iga_kstar(params: IGaParams) -> float:
    """``K* = int_1^eta (x-1)**(gamma_-1) x**(beta/p - gamma_) dx``."""
    return float(j_integral_y(params.eta, params.b, params.gamma_))


def kstar_quadrature(params: IGaParams) -> float:
    """``K*`` by adaptive quadrature of its defining integral; an oracle for tests."""
    g, b = params.gamma_, params.b
    return integrate(lambda x: (1 - x) ** (g - 1) * x ** (-b - 1), 1 / params.eta, 1.0,
                     epsabs=0.0, epsrel=1e-13, what="K*")


def iga_k(params: IGaParams) -> float:
    """Normalising constant ``K = Gamma(gamma_ - beta/p) / (p Gamma(gamma_)) K*``."""
    return float(np.exp(sc.gammaln(params.gamma_shape) - sc.gammaln(params.gamma_))
                 / params.p * iga_kstar(params))


def h_terms(params: IGaParams) -> np.ndarray:
    """``H*_k = C(gamma_-1, k) (eta**(b-k) - 1)/(b-k)`` for ``k = 0..gamma_-1`` (integer ``gamma_``)."""
    if not _is_int(params.gamma_):
        raise ConfigurationError("H* terms need an integer gamma_")
    g = int(params.gamma_)
    k = np.arange(g)
    return sc.comb(g - 1, k) * pow_ratio(params.eta, params.b - k)


@dataclass(frozen=True)
class IGaConstants:
    """Derived constants of an IGa law; ``v1star``/``v2star`` are NaN where undefined."""

    kstar: float
    k: float
    v1: float
    v1star: float
    v2star: float
    h_terms: tuple

    @classmethod
    def of(cls, params: IGaParams) -> "IGaConstants":
        ks = iga_kstar(params)
        g, b, eta = params.gamma_, params.b, params.eta
        k = float(np.exp(sc.gammaln(params.gamma_shape) - sc.gammaln(g)) / params.p * ks)
        v1 = (eta - 1) ** g / (g * ks)
        v1s = (eta - 1) ** (g - 1) * float(pow_ratio(eta, b - g + 1)) / ks if g > 1 else float("nan")
        if _is_int(g):
            h = h_terms(params)
            v2s = float(h[::2].sum() / ks)
        else:
            h, v2s = np.array([]), float("nan")
        return cls(ks, k, v1, v1s, v2s, tuple(float(x) for x in h))


# ---------------------------------------------------------------------------
# density and moments


def _log_lower_gamma_reg(g, x):
    """``log G_g(x)`` accurate for tiny ``x`` where ``gammainc`` underflows."""
    x = np.asarray(x, dtype=float)
    small = x < 1.0
    out = np.empty_like(x)
    xs = x[small]
    out[small] = (g * np.log(xs) - xs + np.log(sc.hyp1f1(1.0, g + 1.0, xs))
                  - sc.gammaln(g + 1.0))
    out[~small] = np.log(sc.gammainc(g, x[~small]))
    return out


def iga_logpdf(params: IGaParams, u):
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise DomainError("IGa density needs u > 0")
    up = np.power(u, params.p)
    return (_log_lower_gamma_reg(params.gamma_, up * (params.eta - 1)) - up
            - (1 + params.beta) * np.log(u) - np.log(iga_k(params)))


def iga_pdf(params: IGaParams, u):
    """Normalised IGa density at ``u > 0``."""
    return np.exp(iga_logpdf(params, u))


def iga_moment(params: IGaParams, xi: float) -> float:
    """``E[W**xi] = K_{beta-xi} / K_beta`` for ``xi > beta - p*gamma_``."""
    if xi <= params.beta - params.p * params.gamma_:
        raise ParameterError(f"moment of order {xi} does not exist "
                             f"(needs xi > {params.beta - params.p * params.gamma_})")
    if xi == 0:
        return 1.0
    shifted = IGaParams(params.beta - xi, params.gamma_, params.p, params.eta)
    g = params.gamma_
    log_gamma_ratio = sc.gammaln(g - shifted.b) - sc.gammaln(g - params.b)
    return float(np.exp(log_gamma_ratio) * iga_kstar(shifted) / iga_kstar(params))


# ---------------------------------------------------------------------------
# mixing density


def m_pdf(params: IGaParams, theta):
    """Mixing density ``m_{beta,gamma_,p,eta}`` on ``(1, eta**(1/p))``."""
    theta = np.asarray(theta, dtype=float)
    p, g, b = params.p, params.gamma_, params.beta
    inside = (theta > 1) & (theta < params.eta ** (1 / p))
    th = np.where(inside, theta, 2.0)
    val = p / iga_kstar(params) * np.power(th**p - 1, g - 1) * np.power(th, p + b - p * g - 1)
    return np.where(inside, val, 0.0)


def m_cdf(params: IGaParams, y):
    """Cdf of ``m_{beta,gamma_,p,eta}`` at ``y`` in ``[1, eta**(1/p)]``."""
    y = np.asarray(y, dtype=float)
    top = params.eta ** (1 / params.p)
    if np.any((y < 1) | (y > top * (1 + 1e-15))):
        raise DomainError(f"mixing cdf needs 1 <= y <= {top}")
    yp = np.minimum(np.power(y, params.p), params.eta)
    out = j_integral_y(yp, params.b, params.gamma_) / iga_kstar(params)
    return np.minimum(out, 1.0)


class _MixerSampler:
    """Samplers for the ``p = 1`` mixing law ``m_{b, gamma_, 1, eta}``."""

    def __init__(self, params: IGaParams):
        self.params = params
        self.b = params.b
        self.g = params.gamma_
        self.eta = params.eta
        self.consts = IGaConstants.of(params)

    # M0: gamma_ == 1, the law is ell_{b-1}
    def m0(self, s, n):
        return ell_inverse(s.uniform(n), self.b - 1.0, self.eta)

    # M1: rejection from ell_{b-gamma_}
    def m1(self, s, n, stats=None):
        g, eta = self.g, self.eta

        def accept(y):
            return np.power((y - 1) / (eta - 1), g - 1)

        return rejection_sample(s, n, lambda m: ell_inverse(s.uniform(m), self.b - g, eta),
                                accept, self.consts.v1star, stats=stats, what="IGa M1")

    # M2: cdf inversion in z = 1 - 1/y
    @cached_property
    def _inversion(self):
        zmax = float(-np.expm1(-np.log(self.eta)))
        if zmax > INVERSION_ZMAX:
            raise ConfigurationError(
                f"cdf inversion supports eta <= {1 / (1 - INVERSION_ZMAX):.0f} after the p "
                f"reparametrisation, got {self.eta}; use ARGS or ARG")
        coeffs = j_series_coeffs(self.b, self.g, zmax)
        total = float(zmax**self.g * _horner(coeffs, np.array(zmax)))
        return coeffs, zmax, total

    def m2(self, s, n):
        coeffs, zmax, total = self._inversion
        u = s.uniform(n)
        # the gamma_ = 1 draw with the same uniform is the starting point
        y0 = ell_inverse(u, self.b - 1.0, self.eta)
        z0 = -np.expm1(-np.log(y0))
        z = _kernels.invert_power_series(coeffs, self.g, zmax, u * total, z0)
        return 1.0 / (1.0 - z)

    # M3: rejection from the positive-term mixture of ell laws
    @cached_property
    def _bd(self):
        h = np.asarray(self.consts.h_terms)[::2]
        cum = np.cumsum(h)
        deltas = self.b - 2.0 * np.arange(h.size) - 1.0
        weights = sc.comb(self.g - 1, 2 * np.arange(h.size))
        return cum / cum[-1], deltas, weights

    def bd(self, s, n):
        """Draws from the positive-term envelope ``m~``."""
        cum, deltas, _ = self._bd
        comp = np.minimum(np.searchsorted(cum, s.uniform(n), side="right"), cum.size - 1)
        u = s.uniform(n)
        out = np.empty(n)
        for k, d in enumerate(deltas):
            sel = comp == k
            out[sel] = ell_inverse(u[sel], d, self.eta)
        return out

    def m3(self, s, n, stats=None):
        _, _, weights = self._bd
        g = self.g

        def accept(y):
            inv2 = 1.0 / (y * y)
            denom = np.zeros_like(y)
            for w in weights[::-1]:
                denom = denom * inv2 + w
            return np.power((y - 1) / y, g - 1) / denom

        return rejection_sample(s, n, lambda m: self.bd(s, m), accept, self.consts.v2star,
                                stats=stats, what="IGa M3")


def _check_mixer_method(params: IGaParams, method: str) -> str:
    g = params.gamma_
    if method == "M0" and g != 1:
        raise ConfigurationError("M0 needs gamma_ = 1")
    if method == "M1" and not g > 1:
        raise ConfigurationError("M1 needs gamma_ > 1")
    if method == "M2" and not (_is_int(g) and g >= 1):
        raise ConfigurationError("M2 needs an integer gamma_ >= 1")
    if method == "M3" and not (_is_int(g) and g >= 2):
        raise ConfigurationError("M3 needs an integer gamma_ >= 2")
    if method not in MIXER_METHODS:
        raise ConfigurationError(f"unknown mixing sampler {method!r}; choose from {MIXER_METHODS}")
    return method


def _sample_mixer_p1(s, sampler: _MixerSampler, method: str, n: int, stats):
    if method == "M0":
        return sampler.m0(s, n)
    if method == "M1":
        return sampler.m1(s, n, stats)
    if method == "M2":
        return sampler.m2(s, n)
    return sampler.m3(s, n, stats)


def sample_m(s: RandomStream, params: IGaParams, method: str = "M1", size=None, *,
             stats: Optional[RejectionStats] = None):
    """Draw from ``m_{beta,gamma_,p,eta}`` with mixing sampler ``method`` (M0, M1, M2, M3).

    ``stats`` collects proposal counts for the rejection samplers (M1, M3).
    """
    method = _check_mixer_method(params, method)
    n = 1 if size is None else int(np.prod(size))
    z = _sample_mixer_p1(s, _MixerSampler(params), method, n, stats)
    z = np.power(z, 1.0 / params.p)
    return float(z[0]) if size is None else z.reshape(size)


# ---------------------------------------------------------------------------
# the IGa law as a GGSM


def phi1(params: IGaParams, u):
    """Acceptance probability of the gamma-proposal rejection sampler.

    ``Gamma(gamma_+1) G_gamma(x) x**-gamma_`` with ``x = (eta-1) u``.
    """
    g = params.gamma_
    x = (params.eta - 1.0) * np.asarray(u, dtype=float)
    out = np.empty_like(x)
    small = x < 1.0
    xs = x[small]
    out[small] = np.exp(-xs) * sc.hyp1f1(1.0, g + 1.0, xs)
    xl = x[~small]
    out[~small] = np.exp(sc.gammaln(g + 1.0) + np.log(sc.gammainc(g, xl)) - g * np.log(xl))
    return np.minimum(out, 1.0)


def iga_mixer(params: IGaParams, method: Optional[str] = None) -> MixingDensity:
    """The IGa mixing density as a :class:`MixingDensity` record."""
    if method is None:
        method = "M0" if params.gamma_ == 1 else "M1"
    _check_mixer_method(params, method)
    sampler = _MixerSampler(params)
    consts = sampler.consts
    return MixingDensity(
        gamma_=params.p * params.gamma_ - params.beta, p=params.p, lower=1.0,
        upper=params.eta ** (1 / params.p), pdf=lambda t: m_pdf(params, t),
        sampler=lambda s, n: np.power(_sample_mixer_p1(s, sampler, method, n, None),
                                      1 / params.p),
        v=consts.v1, phi=lambda u: phi1(params, u), name=f"IGa mixer ({method})")


def method_mixer(params: IGaParams, method: str) -> str:
    """Mixing sampler used by GGSM1-type ``method`` (M0 whenever ``gamma_ == 1``)."""
    if method not in ("ARGS", "Inverse", "ARBD"):
        raise ConfigurationError(f"unknown IGa method {method!r}; choose from {METHODS}")
    if params.gamma_ == 1:
        return "M0"
    return {"ARGS": "M1", "Inverse": "M2", "ARBD": "M3"}[method]


def sample_iga(s: RandomStream, params: IGaParams, method: str = "ARGS", size=None, *,
               stats: Optional[RejectionStats] = None):
    """Draw from ``IGa(beta, gamma_, p, eta)``.

    Parameters
    ----------
    method : {"ARGS", "Inverse", "ARBD", "ARG"}
        ``ARGS``/``Inverse``/``ARBD`` return ``(Y/Z)**(1/p)`` with
        ``Y ~ Ga(gamma_ - beta/p)`` and ``Z`` from mixing sampler M1/M2/M3
        (M0 when ``gamma_ = 1``).  ``ARG`` rejects ``Y`` with probability
        ``1 - phi1(Y)``.
    stats : RejectionStats, optional
        Receives proposal counts of whichever rejection step runs.
    """
    n = 1 if size is None else int(np.prod(size))
    out = IGaSampler(params, method)(s, n, stats)
    return float(out[0]) if size is None else out.reshape(size)


class IGaSampler:
    """Reusable sampler that builds the per-parameter tables once.

    Use this in hot loops (for example the OU engine) instead of
    :func:`sample_iga`, which rebuilds constants on every call.
    """

    def __init__(self, params: IGaParams, method: str = "ARGS"):
        if method not in METHODS:
            raise ConfigurationError(f"unknown IGa method {method!r}; choose from {METHODS}")
        self.params = params
        self.method = method
        self._mix = _MixerSampler(params)
        if method == "ARG":
            self._v1 = self._mix.consts.v1
        else:
            self._mixer = _check_mixer_method(params, method_mixer(params, method))
            if self._mixer == "M2":
                self._mix._inversion  # noqa: B018 - build the series once

    def __call__(self, s: RandomStream, n: int, stats: Optional[RejectionStats] = None):
        p = self.params
        if self.method == "ARG":
            y = rejection_sample(s, n, lambda m: s.standard_gamma(p.gamma_shape, m),
                                 lambda y: phi1(p, y), self._v1, stats=stats, what="IGa ARG")
            return np.power(y, 1.0 / p.p)
        y = s.standard_gamma(p.gamma_shape, n)
        z = _sample_mixer_p1(s, self._mix, self._mixer, n, stats)
        return np.power(y / z, 1.0 / p.p)


def kstar_closed_sum(params: IGaParams) -> float:
    """``sum_k (-1)**k H*_k`` evaluated in multiprecision (integer ``gamma_``)."""
    if not _is_int(params.gamma_):
        raise ConfigurationError("the alternating sum needs an integer gamma_")
    return kstar_alternating(params.b, int(params.gamma_), params.eta)
