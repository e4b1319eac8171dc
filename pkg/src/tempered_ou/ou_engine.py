"""Transition laws of tempered stable OU processes.

An OU process ``dY = -lambda Y dt + dL`` is called

* ``TSOU`` when its stationary law is ``TS^p_alpha(R, b)`` (``0 <= alpha < 2``);
* ``OUTS`` when the law of ``L_1`` is ``TS^p_alpha(lambda R, lambda b)`` (``alpha < 2``).

Given ``Y_s = y`` the value ``Y_{s+t}`` is the sum of

* the deterministic part ``e^{-lambda t} y + (1 - e^{-lambda t}) b`` minus drift corrections,
* independent tempered stable components ``X_0, ..., X_{gamma-1}`` with
  ``gamma = 1 + floor(alpha/p)``,
* a compound Poisson sum ``V_1 W_1 + ... + V_N W_N`` with ``V ~ R/R(R)`` and
  ``W`` from IGa (TSOU), IBGM (OUTS, ``alpha >= 0``) or DGGa (OUTS, ``alpha < 0``).

For TSOU only ``X_1, ..., X_{gamma-1}`` are multiplied by ``e^{-lambda t}``; for
OUTS every ``X_n`` is.  The asymmetry is part of the two representations and is
kept as is.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special as sc

from . import _kernels
from .dgga import DGGaParams, DGGaSampler, dgga_moment
from .errors import ParameterError, RegimeError
from .ibgm import IBGMParams, IBGMSampler, ibgm_c, ibgm_moment, ibgm_pdf
from .iga import IGaParams, IGaSampler, iga_k, iga_moment
from .rand_core import RandomStream, derive_substream
from .special import integrate
from .tempered_stable import (DEFAULT_SERIES_TOL, RosinskiMeasure, TSParams, auto_ts_method,
                              characteristic_exponent, ts_cumulant, ts_sampler)

KINDS = ("TSOU", "OUTS")


@dataclass(frozen=True)
class OUSpec:
    """OU process with rate ``lambda_`` whose stationary (TSOU) or BDLP (OUTS) law is built from ``ts``.

    For ``OUTS`` the law of ``L_1`` is ``TS^p_alpha(lambda_ R, lambda_ b)``.
    """

    lambda_: float
    kind: str
    ts: TSParams

    def __post_init__(self):
        lam = float(self.lambda_)
        if not (np.isfinite(lam) and lam > 0):
            raise ParameterError(f"lambda_ must be > 0, got {self.lambda_}")
        object.__setattr__(self, "lambda_", lam)
        kind = str(self.kind).upper()
        if kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "TSOU" and self.ts.alpha < 0:
            raise RegimeError("a TSOU process needs alpha >= 0: TS laws with alpha < 0 "
                              "are not selfdecomposable")

    @classmethod
    def rapidly_decreasing(cls, kind, lambda_, alpha, p, c=1.0, beta=1.0, b=0.0) -> "OUSpec":
        return cls(lambda_, kind, TSParams.rapidly_decreasing(alpha, p, c, beta, b))


@dataclass(frozen=True)
class Component:
    """Tempered stable summand ``scale * X`` with ``X ~ TS^p_{alpha_n}(R_n, 0)``."""

    params: TSParams
    scale: float


@dataclass(frozen=True)
class TransitionDecomposition:
    """Constants of the transition law over a step ``t``.

    Attributes
    ----------
    decay : float
        ``e^{-lambda t}``, the coefficient of the starting value.
    drift : float
        ``(1 - e^{-lambda t}) b - sum_n b_n``.
    corrections : tuple of float
        The drift corrections ``b_0, ..., b_{gamma-1}``.
    components : tuple of Component
        Tempered stable summands with non-zero measure.
    poisson_mean : float
        Mean number of compound Poisson jumps.
    jump_law : str
        ``"IGa"``, ``"IBGM"`` or ``"DGGa"``.
    jump_params : IGaParams, IBGMParams or DGGaParams
    atoms : RosinskiMeasure
        ``R`` normalised to a probability (the law of ``V``).
    """

    spec: OUSpec
    t: float
    gamma_: int
    decay: float
    drift: float
    corrections: tuple
    components: tuple
    poisson_mean: float
    jump_law: str
    jump_params: object
    atoms: RosinskiMeasure


def _scaled_component(params: TSParams, alpha: float, factor: float, scale: float):
    if factor <= 0:
        return None
    return Component(TSParams(alpha, params.p, params.R.scaled(factor), 0.0), scale)


def kappa(lambda_t: float, n: int, alpha: float, p: float) -> float:
    """``int_{e^{-lambda t}}^1 (1-u^p)^n / n! u^{-1-alpha} du``."""
    lo = math.exp(-lambda_t)
    return integrate(lambda u: (1 - u**p) ** n * u ** (-1 - alpha), lo, 1.0,
                     epsrel=1e-12, what="kappa") / math.factorial(n)


def _expm1_over(a: float, x: float) -> float:
    """``(e^{a x} - 1)/a``, equal to ``x`` at ``a = 0``."""
    return x if a == 0 else math.expm1(a * x) / a


def build_decomposition(spec: OUSpec, t: float) -> TransitionDecomposition:
    """All constants of the transition law of ``spec`` over a step ``t > 0``."""
    if not (np.isfinite(t) and t > 0):
        raise ParameterError(f"time step must be > 0, got {t}")
    ts, lam = spec.ts, spec.lambda_
    a, p, R, b = ts.alpha, ts.p, ts.R, ts.b
    lt = lam * t
    decay = math.exp(-lt)
    atoms = RosinskiMeasure(R.locations, tuple(R.pmf))
    mean_v = float(np.dot(atoms.r, atoms.x))
    mass, first = R.total_mass, R.moment(1)

    if spec.kind == "TSOU":
        g = ts.gamma_ if a > 0 else 1
        comps = [_scaled_component(ts, a, -math.expm1(-a * lt), 1.0)]
        corr = [0.0] * g
        for n in range(1, g):
            f = (-math.expm1(-p * lt)) ** n / math.factorial(n)
            comps.append(_scaled_component(ts, a - n * p, f, decay))
            if 1 <= a < 1 + n * p:
                corr[n] = decay * f * first * sc.gamma((1 - a + n * p) / p) / p
        eta = math.exp(p * lt)
        jump = IGaParams(a, g, p, eta)
        pm = math.exp(-a * lt) * mass * iga_k(jump)
        if 1 <= a < 2:
            corr[0] = math.exp(-a * lt) * first * iga_k(IGaParams(a - 1, g, p, eta))
        law = "IGa"
    elif a < 0:
        g = 1
        comps, corr = [], [0.0]
        jump = DGGaParams(-a, p, math.exp(lt))
        pm = lt * sc.gamma(-a / p) * mass / p
        law = "DGGa"
    else:
        g = ts.gamma_ if a > 0 else 1
        comps = [_scaled_component(ts, a, _expm1_over(a, lt), decay)]
        corr = [0.0] * g
        for n in range(1, g):
            k = kappa(lt, n, a, p)
            comps.append(_scaled_component(ts, a - n * p, k, decay))
            if 1 <= a < 1 + n * p:
                corr[n] = decay * k * first * sc.gamma((1 - a + n * p) / p) / p
        jump = IBGMParams(a, g, p, math.exp(lt))
        pm = p * ibgm_c(jump) * mass / math.factorial(g - 1)
        if 1 <= a < 2:
            corr[0] = pm * mean_v * ibgm_moment(jump, 1.0)
        law = "IBGM"

    drift = -math.expm1(-lt) * b - sum(corr)
    return TransitionDecomposition(
        spec=spec, t=float(t), gamma_=g, decay=decay, drift=drift, corrections=tuple(corr),
        components=tuple(c for c in comps if c is not None), poisson_mean=float(pm),
        jump_law=law, jump_params=jump, atoms=atoms)


def _jump_moment(dec: TransitionDecomposition, k: int) -> float:
    if dec.jump_law == "IGa":
        return iga_moment(dec.jump_params, k)
    if dec.jump_law == "IBGM":
        return ibgm_moment(dec.jump_params, k)
    return dgga_moment(dec.jump_params, k)


def decomposition_cumulant(dec: TransitionDecomposition, k: int, y: float = 0.0) -> float:
    """``k``-th cumulant of the transition law assembled from the decomposition's parts.

    Independent of :func:`transition_cumulant`; the two agreeing checks every
    constant of the decomposition.
    """
    total = sum(c.scale**k * ts_cumulant(c.params, k) for c in dec.components)
    total += dec.poisson_mean * dec.atoms.moment(k) * _jump_moment(dec, k)
    if k == 1:
        total += dec.decay * y + dec.drift
    return float(total)


def transition_cumulant(spec: OUSpec, k: int, y: float, t: float) -> float:
    """Closed-form ``k``-th cumulant of ``Y_{s+t}`` given ``Y_s = y``."""
    k = int(k)
    if k < 1:
        raise ParameterError(f"cumulant order must be >= 1, got {k}")
    ts, lam = spec.ts, spec.lambda_
    a, p = ts.alpha, ts.p
    shrink = -math.expm1(-k * lam * t)
    if spec.kind == "OUTS":
        shrink /= k
    start = y * math.exp(-lam * t) if k == 1 else 0.0
    shift = shrink * ts.b if k == 1 else 0.0
    if k == 1 and a >= 1:
        return float(start + shift)
    return float(start + shift + shrink * sc.gamma((k - a) / p) / p * ts.R.moment(k))


def compose_cumulant(spec: OUSpec, k: int, y: float, t: float) -> float:
    """Cumulant over ``2t`` obtained by chaining two ``t``-steps analytically.

    ``Y_{2t} = e^{-lambda t} Y_t + I`` with ``I`` distributed as the ``t``-step
    law started at 0, so the cumulant is
    ``e^{-k lambda t} c_k(y, t) + c_k(0, t)``.
    """
    return (math.exp(-k * spec.lambda_ * t) * transition_cumulant(spec, k, y, t)
            + transition_cumulant(spec, k, 0.0, t))


# ---------------------------------------------------------------------------
# characteristic function


def _jump_cf_minus_one(dec: TransitionDecomposition, w: float) -> complex:
    """``E[e^{i w W}] - 1`` for the jump-factor law, by quadrature of its density.

    ``[0, 1]`` may hold an integrable singularity and is done directly; the
    long tail uses the oscillatory rule, which copes with many periods when
    ``p`` is small.
    """
    if dec.jump_law == "IBGM":
        law = ibgm_pdf
    elif dec.jump_law == "DGGa":
        from .dgga import dgga_pdf as law
    else:
        from .iga import iga_pdf as law
    params = dec.jump_params

    def pdf(v):
        return float(np.asarray(law(params, v)).reshape(-1)[0])

    # the density decays like exp(-v**p); beyond hi its mass is below e**-40
    hi = max(40.0 ** (1.0 / params.p), 2.0)
    tol = dict(epsabs=1e-13, epsrel=1e-11)
    re = integrate(lambda v: -2.0 * np.sin(0.5 * w * v) ** 2 * pdf(v), 0.0, 1.0, **tol,
                   what="jump law cf (real part near 0)")
    im = integrate(lambda v: np.sin(w * v) * pdf(v), 0.0, 1.0, **tol,
                   what="jump law cf (imaginary part near 0)")
    mass = integrate(pdf, 1.0, hi, **tol, what="jump law tail mass")
    re += integrate(pdf, 1.0, hi, weight="cos", wvar=w, **tol,
                    what="jump law cf (real part)") - mass
    im += integrate(pdf, 1.0, hi, weight="sin", wvar=w, **tol,
                    what="jump law cf (imaginary part)")
    return complex(re, im)


def transition_log_cf(spec: OUSpec, y: float, t: float, z: float,
                      dec: Optional[TransitionDecomposition] = None) -> complex:
    """Log characteristic function assembled group by group from the decomposition.

    The groups are the deterministic part, one tempered stable exponent per
    component evaluated at ``scale * z``, and the compound Poisson term
    ``poisson_mean * sum_i pmf_i (E[e^{i z x_i W}] - 1)``.
    """
    if dec is None:
        dec = build_decomposition(spec, t)
    if z == 0:
        return 0j
    out = 1j * z * (dec.decay * y + dec.drift)
    for c in dec.components:
        out += characteristic_exponent(c.params, c.scale * z)
    for x, w in zip(dec.atoms.x, dec.atoms.r):
        out += dec.poisson_mean * w * _jump_cf_minus_one(dec, z * x)
    return complex(out)


def transition_cf(spec: OUSpec, y: float, t: float, z: float,
                  dec: Optional[TransitionDecomposition] = None) -> complex:
    """Characteristic function of ``Y_{s+t}`` given ``Y_s = y`` by quadrature."""
    return complex(np.exp(transition_log_cf(spec, y, t, z, dec)))


def transition_log_cf_direct(spec: OUSpec, y: float, t: float, z: float) -> complex:
    """Log characteristic function straight from the Levy-driven integral.

    TSOU: ``i e^{-lt} y z + c(z) - c(e^{-lt} z)`` with ``c`` the stationary
    exponent.  OUTS: ``i e^{-lt} y z + i(1-e^{-lt}) b z + int_0^{lt} c_0(e^{-w} z) dw``
    with ``c_0`` the exponent of ``TS^p_alpha(R, 0)``.  Shares no code with the
    decomposition and serves as its oracle.
    """
    lt = spec.lambda_ * t
    d = math.exp(-lt)
    ts = spec.ts
    if spec.kind == "TSOU":
        return complex(1j * d * y * z + characteristic_exponent(ts, z)
                       - characteristic_exponent(ts, d * z))
    base = TSParams(ts.alpha, ts.p, ts.R, 0.0)

    def part(w, f):
        return f(characteristic_exponent(base, math.exp(-w) * z))

    re = integrate(lambda w: part(w, lambda c: c.real), 0.0, lt, epsrel=1e-10,
                   what="OUTS exponent (real part)")
    im = integrate(lambda w: part(w, lambda c: c.imag), 0.0, lt, epsrel=1e-10,
                   what="OUTS exponent (imaginary part)")
    return complex(1j * (d * y + -math.expm1(-lt) * ts.b) * z + re + 1j * im)


# ---------------------------------------------------------------------------
# sampling


class TransitionSampler:
    """Draws from the transition law of a fixed decomposition.

    Parameters
    ----------
    dec : TransitionDecomposition
    jump_method : str, optional
        Method of the jump-factor sampler; defaults to ``"ARGS"`` for IGa,
        ``"auto"`` for IBGM and ``"GGSM1"`` for DGGa.
    ts_method : str
        Method for the tempered stable components (see
        :func:`tempered_ou.tempered_stable.ts_sampler`); components with
        ``alpha < 0`` always use the compound Poisson sampler.
    series_tol : float
        Truncation tolerance of the series sampler.
    """

    def __init__(self, dec: TransitionDecomposition, jump_method: Optional[str] = None,
                 ts_method: str = "auto", series_tol: float = DEFAULT_SERIES_TOL):
        self.dec = dec
        self._components = []
        for c in dec.components:
            method = auto_ts_method(c.params) if ts_method == "auto" or c.params.alpha < 0 \
                else ts_method
            kw = {"tol": series_tol} if method == "series" else {}
            self._components.append((ts_sampler(c.params, method, **kw), c.scale))
        if dec.jump_law == "IGa":
            self._jumps = IGaSampler(dec.jump_params, jump_method or "ARGS")
        elif dec.jump_law == "IBGM":
            self._jumps = IBGMSampler(dec.jump_params, jump_method or "auto")
        else:
            self._jumps = DGGaSampler(dec.jump_params, jump_method or "GGSM1")
        self._cum_pmf = np.cumsum(dec.atoms.r)

    def innovations(self, s: RandomStream, n: int) -> np.ndarray:
        """``n`` draws of ``Y_{s+t} - e^{-lambda t} Y_s`` (the part independent of the start)."""
        dec = self.dec
        out = np.full(n, dec.drift)
        for sampler, scale in self._components:
            out += scale * sampler(s, n)
        counts = s.poisson(dec.poisson_mean, n)
        total = int(counts.sum())
        if total:
            w = self._jumps(s, total)
            if len(self._cum_pmf) == 1:
                v = dec.atoms.x[0]
            else:
                idx = np.searchsorted(self._cum_pmf, s.uniform(total), side="right")
                v = dec.atoms.x[np.minimum(idx, len(self._cum_pmf) - 1)]
            out += np.bincount(np.repeat(np.arange(n), counts), weights=v * w, minlength=n)
        return out

    def __call__(self, s: RandomStream, y, n: int) -> np.ndarray:
        return self.dec.decay * np.asarray(y, dtype=float) + self.innovations(s, n)


def sample_transition(s: RandomStream, spec: OUSpec, y: float, t: float, size=None, **kwargs):
    """Draw ``Y_{s+t}`` given ``Y_s = y`` (scalar when ``size`` is None)."""
    n = 1 if size is None else int(np.prod(size))
    out = TransitionSampler(build_decomposition(spec, t), **kwargs)(s, y, n)
    return float(out[0]) if size is None else out.reshape(size)


@dataclass(frozen=True)
class TrajectoryGrid:
    """Uniform time grid ``0, t_step, ..., n_steps * t_step`` for ``n_paths`` paths from ``y0``."""

    t_step: float
    n_steps: int
    n_paths: int = 1
    y0: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.t_step) and self.t_step > 0):
            raise ParameterError(f"t_step must be > 0, got {self.t_step}")
        if int(self.n_steps) < 1 or int(self.n_paths) < 1:
            raise ParameterError("n_steps and n_paths must be >= 1")
        object.__setattr__(self, "n_steps", int(self.n_steps))
        object.__setattr__(self, "n_paths", int(self.n_paths))
        object.__setattr__(self, "y0", float(self.y0))

    @property
    def times(self) -> np.ndarray:
        return self.t_step * np.arange(self.n_steps + 1)


def simulate_path(s: RandomStream, spec: OUSpec, grid: TrajectoryGrid, **kwargs) -> np.ndarray:
    """Paths on ``grid`` as an ``(n_paths, n_steps + 1)`` array.

    Path ``i`` draws its innovations from ``derive_substream(s, i)``, so each
    path is reproducible on its own and independent of the number of paths.
    """
    sampler = TransitionSampler(build_decomposition(spec, grid.t_step), **kwargs)
    innov = np.empty((grid.n_paths, grid.n_steps))
    for i in range(grid.n_paths):
        innov[i] = sampler.innovations(derive_substream(s, i), grid.n_steps)
    return _kernels.ou_filter(np.full(grid.n_paths, grid.y0), sampler.dec.decay, innov)


def paths_to_csv(times: np.ndarray, paths: np.ndarray) -> str:
    """CSV text with header ``t,path_0,...`` and one row per grid time (17 significant digits)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"path_{i}" for i in range(paths.shape[0])])
    for k, tk in enumerate(times):
        w.writerow([f"{tk:.17g}"] + [f"{v:.17g}" for v in paths[:, k]])
    return buf.getvalue()
