"""The difference generalized gamma (DGGa) distribution.

``DGGa(gamma_, p, eta)`` has density

    h(x) = [F(eta x) - F(x)] / (x ln eta),   x > 0,

where ``F`` is the ``GGa(gamma_, p, 1)`` cdf.  Equivalently it is the GGSM with
kernel ``GGa(gamma_, p, theta**p)`` and mixing density ``1/(theta ln eta)`` on
``(1, eta)``, so a draw is ``Ga(gamma_/p)**(1/p) / eta**U``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import special as sc

from .errors import ConfigurationError, DomainError, ParameterError
from .ggsm import (GGaParams, MixingDensity, PhiTable, RejectionStats, gga_pdf, rejection_sample,
                   tabulated_phi)
from .rand_core import RandomStream

METHODS = ("GGSM1", "GGSM2")


@dataclass(frozen=True)
class DGGaParams:
    """Parameters of ``DGGa(gamma_, p, eta)``: ``gamma_, p > 0`` and ``eta > 1``."""

    gamma_: float
    p: float
    eta: float

    def __post_init__(self):
        for name in ("gamma_", "p", "eta"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.gamma_ <= 0 or self.p <= 0:
            raise ParameterError(f"gamma_ and p must be > 0, got {self.gamma_}, {self.p}")
        if self.eta <= 1:
            raise ParameterError(f"eta must be > 1, got {self.eta}")


def _gamma_cdf_difference(a, lo, hi):
    """``P(a, hi) - P(a, lo)`` for ``lo < hi`` without cancellation in either tail."""
    upper_tail = lo > a
    return np.where(upper_tail, sc.gammaincc(a, lo) - sc.gammaincc(a, hi),
                    sc.gammainc(a, hi) - sc.gammainc(a, lo))


def dgga_pdf(params: DGGaParams, x):
    """Density ``[F(eta x) - F(x)]/(x ln eta)`` at ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("DGGa density needs x > 0")
    g, p, eta = params.gamma_, params.p, params.eta
    diff = _gamma_cdf_difference(g / p, np.power(x, p), np.power(eta * x, p))
    return diff / (x * np.log(eta))


def dgga_cdf(params: DGGaParams, x, *, nodes: int = 64):
    """Cdf ``int_0^1 F(eta**v x) dv`` by Gauss-Legendre in ``v = ln(theta)/ln(eta)``."""
    from .special import gauss_legendre

    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("DGGa cdf needs x >= 0")
    g, p, le = params.gamma_, params.p, np.log(params.eta)
    z, w = gauss_legendre(nodes)
    v = 0.5 * (z + 1.0)
    scaled = np.multiply.outer(x, np.exp(le * v))
    return 0.5 * sc.gammainc(g / p, np.power(scaled, p)) @ w


def dgga_moment(params: DGGaParams, xi: float) -> float:
    """``E[X**xi] = Gamma((gamma_+xi)/p)/Gamma(gamma_/p) * (1 - eta**-xi)/(xi ln eta)``."""
    g, p, eta = params.gamma_, params.p, params.eta
    if xi <= -g:
        raise ParameterError(f"moment of order {xi} does not exist (needs xi > {-g})")
    if xi == 0:
        return 1.0
    le = np.log(eta)
    mix = -np.expm1(-xi * le) / (xi * le)
    return float(np.exp(sc.gammaln((g + xi) / p) - sc.gammaln(g / p)) * mix)


def mixer_pdf(params: DGGaParams, theta):
    """Mixing density ``1/(theta ln eta)`` on ``(1, eta)``."""
    theta = np.asarray(theta, dtype=float)
    inside = (theta > 1) & (theta < params.eta)
    return np.where(inside, 1.0 / (np.where(inside, theta, 1.0) * np.log(params.eta)), 0.0)


def mixture_pdf(params: DGGaParams, x):
    """Density as the quadrature of the GGa mixture; an oracle for :func:`dgga_pdf`."""
    from .special import integrate

    x = np.atleast_1d(np.asarray(x, dtype=float))
    g, p, le = params.gamma_, params.p, np.log(params.eta)
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        out[i] = integrate(lambda th: gga_pdf(GGaParams(g, p, th**p), xi) / (th * le),
                           1.0, params.eta, epsrel=1e-13, what="DGGa mixture")
    return out


def rejection_constant(params: DGGaParams) -> float:
    """``int_1^eta theta**gamma_ m(theta) dtheta = (eta**gamma_ - 1)/(gamma_ ln eta)``."""
    g, le = params.gamma_, np.log(params.eta)
    return float(np.expm1(g * le) / (g * le))


def dgga_mixer(params: DGGaParams) -> MixingDensity:
    """The DGGa mixing density as a :class:`MixingDensity` record."""
    le = np.log(params.eta)
    return MixingDensity(
        gamma_=params.gamma_, p=params.p, lower=1.0, upper=params.eta,
        pdf=lambda t: mixer_pdf(params, t),
        sampler=lambda s, n: np.exp(le * s.uniform(n)),
        v=rejection_constant(params),
        phi=tabulated_phi(params.gamma_, params.p, 1.0, params.eta,
                          lambda t: mixer_pdf(params, t)),
        name="DGGa mixer")


class DGGaSampler:
    """Reusable DGGa sampler.

    ``GGSM1`` returns ``Y**(1/p) / eta**U`` with ``Y ~ Ga(gamma_/p)``; ``GGSM2``
    rejects ``Y`` with the tabulated acceptance function of the mixer.
    """

    def __init__(self, params: DGGaParams, method: str = "GGSM1"):
        if method not in METHODS:
            raise ConfigurationError(f"unknown DGGa method {method!r}; choose from {METHODS}")
        self.params = params
        self.method = method
        if method == "GGSM2":
            self._phi  # noqa: B018 - build the table once

    @cached_property
    def _phi(self) -> PhiTable:
        p = self.params
        return tabulated_phi(p.gamma_, p.p, 1.0, p.eta, lambda t: mixer_pdf(p, t))

    def __call__(self, s: RandomStream, n: int, stats: Optional[RejectionStats] = None):
        p = self.params
        shape = p.gamma_ / p.p
        if self.method == "GGSM1":
            y = s.standard_gamma(shape, n)
            return np.power(y, 1.0 / p.p) * np.exp(-np.log(p.eta) * s.uniform(n))
        y = rejection_sample(s, n, lambda m: s.standard_gamma(shape, m), self._phi,
                             rejection_constant(p), stats=stats, what="DGGa GGSM2")
        return np.power(y, 1.0 / p.p)


def sample_dgga(s: RandomStream, params: DGGaParams, method: str = "GGSM1", size=None, *,
                stats: Optional[RejectionStats] = None):
    """Draw from ``DGGa(gamma_, p, eta)`` (scalar when ``size`` is None)."""
    n = 1 if size is None else int(np.prod(size))
    out = DGGaSampler(params, method)(s, n, stats)
    return float(out[0]) if size is None else out.reshape(size)
