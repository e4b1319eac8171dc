"""Monte Carlo validation of samplers against their closed-form moments."""
from __future__ import annotations

import functools
import subprocess
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .. import __version__
from ..dgga import DGGaParams, DGGaSampler, dgga_moment
from ..errors import ConfigurationError
from ..ibgm import IBGMParams, IBGMSampler, ibgm_moment
from ..iga import IGaParams, IGaSampler, iga_moment
from ..ou_engine import OUSpec, TransitionSampler, build_decomposition, transition_cumulant
from ..rand_core import RandomStream
from ..tempered_stable import TSParams, ts_cumulant, ts_sampler
from .stats import cumulant, err_pct, jackknife_se, raw_moment, tolerance_pct

ORDERS = (1, 2, 3, 4)


@functools.lru_cache(maxsize=1)
def build_id() -> str:
    """``git describe``-style identifier of the running code, or the package version."""
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=here,
                             capture_output=True, text=True, timeout=5, check=True)
        return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        return __version__


@dataclass(frozen=True)
class TransitionTarget:
    """The transition law of ``spec`` from ``y`` over ``t``."""

    spec: OUSpec
    y: float
    t: float


@dataclass
class ValidationRecord:
    order: int
    true: float
    estimate: float
    err_pct: float
    se_pct: float
    tolerance_pct: float
    passed: bool
    absolute: bool = False


@dataclass
class ValidationReport:
    """Per-order comparison of empirical and exact moments (or cumulants)."""

    distribution: str
    params: dict
    method: str
    statistic: str
    n: int
    seed: int
    build_id: str
    elapsed_s: float
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _params_dict(obj) -> dict:
    if isinstance(obj, TransitionTarget):
        ts = obj.spec.ts
        return {"kind": obj.spec.kind, "lambda": obj.spec.lambda_, "alpha": ts.alpha, "p": ts.p,
                "locations": list(ts.R.locations), "weights": list(ts.R.weights), "b": ts.b,
                "y": obj.y, "t": obj.t}
    if isinstance(obj, TSParams):
        return {"alpha": obj.alpha, "p": obj.p, "locations": list(obj.R.locations),
                "weights": list(obj.R.weights), "b": obj.b}
    return asdict(obj)


def resolve(target, method: Optional[str] = None):
    """``(name, statistic, oracle(k), sampler(stream, n), method)`` for a validation target."""
    if isinstance(target, IGaParams):
        method = method or "ARGS"
        return ("iga", "moment", lambda k: iga_moment(target, k),
                IGaSampler(target, method), method)
    if isinstance(target, IBGMParams):
        s = IBGMSampler(target, method or "auto")
        return "ibgm", "moment", lambda k: ibgm_moment(target, k), s, s.method
    if isinstance(target, DGGaParams):
        method = method or "GGSM1"
        return ("dgga", "moment", lambda k: dgga_moment(target, k),
                DGGaSampler(target, method), method)
    if isinstance(target, TSParams):
        method = method or "auto"
        return "ts", "cumulant", lambda k: ts_cumulant(target, k), ts_sampler(target, method), method
    if isinstance(target, TransitionTarget):
        spec = target.spec
        smp = TransitionSampler(build_decomposition(spec, target.t), jump_method=method)
        return (spec.kind.lower(), "cumulant",
                lambda k: transition_cumulant(spec, k, target.y, target.t),
                lambda s, n: smp(s, target.y, n), method or "default")
    raise ConfigurationError(f"no moment oracle for {type(target).__name__}")


def validate_sample(x: np.ndarray, oracle, statistic: str, orders=ORDERS, reference=None,
                    sigmas: float = 5.0) -> list:
    """Compare ``x`` with ``oracle(k)`` for each order; ``reference`` holds published err% cells."""
    est_fn = raw_moment if statistic == "moment" else cumulant
    records = []
    for j, k in enumerate(orders):
        true = oracle(k)
        est = est_fn(x, k)
        e, absolute = err_pct(true, est, with_flag=True)
        se = jackknife_se(x, lambda v, k=k: est_fn(v, k))
        se_pct = se * 100.0 if absolute else se / abs(true) * 100.0
        ref = None if reference is None else reference[j]
        tol = tolerance_pct(se_pct, ref, sigmas)
        records.append(ValidationRecord(k, float(true), est, e, se_pct, tol, abs(e) <= tol,
                                        absolute))
    return records


def validate_moments(target, n: int, seed: int = 0, method: Optional[str] = None,
                     reference=None, orders=ORDERS) -> ValidationReport:
    """Draw ``n`` values with ``method`` and compare orders 1..4 with the exact values.

    Distributions (IGa, IBGM, DGGa) are checked on raw moments; tempered stable
    and OU transition laws on cumulants.  An order passes when
    ``|err%| <= max(2 |reference|, 5 * jackknife se%)``.
    """
    name, statistic, oracle, sampler, method = resolve(target, method)
    t0 = time.perf_counter()
    x = np.asarray(sampler(RandomStream(seed), int(n)), dtype=float)
    elapsed = time.perf_counter() - t0
    records = validate_sample(x, oracle, statistic, orders, reference)
    return ValidationReport(name, _params_dict(target), method, statistic, int(n), int(seed),
                            build_id(), elapsed, records)


def format_report(rep: ValidationReport) -> str:
    lines = [f"{rep.distribution} {rep.params} method={rep.method} n={rep.n} seed={rep.seed} "
             f"build={rep.build_id} ({rep.elapsed_s:.2f} s)",
             f"{'k':>2} {'true':>14} {'estimate':>14} {'err%':>8} {'tol%':>8}  result"]
    for r in rep.records:
        lines.append(f"{r.order:>2} {r.true:>14.6g} {r.estimate:>14.6g} {r.err_pct:>8.3f} "
                     f"{r.tolerance_pct:>8.3f}  {'pass' if r.passed else 'FAIL'}")
    return "\n".join(lines)
