"""Moment and cumulant estimators with jackknife standard errors."""
from __future__ import annotations

from typing import Callable

import numpy as np
from scipy import stats as st

#: groups of the delete-a-group jackknife
JACKKNIFE_GROUPS = 100


def err_pct(true_v: float, est: float, *, with_flag: bool = False):
    """``(true - est)/true * 100``.

    When ``true_v == 0`` the relative error is undefined; the absolute error
    ``(true - est) * 100`` is returned instead and, with ``with_flag``, the
    second element of the returned pair is True.
    """
    true_v, est = float(true_v), float(est)
    absolute = true_v == 0.0
    val = (true_v - est) * 100.0 if absolute else (true_v - est) / true_v * 100.0
    return (val, absolute) if with_flag else val


def raw_moment(x: np.ndarray, k: int) -> float:
    return float(np.mean(np.power(x, k)))


def cumulant(x: np.ndarray, k: int) -> float:
    """Unbiased cumulant estimate (k-statistic) for ``k <= 4``."""
    return float(st.kstat(x, k))


def jackknife_se(x: np.ndarray, statistic: Callable[[np.ndarray], float],
                 groups: int = JACKKNIFE_GROUPS) -> float:
    """Delete-a-group jackknife standard error of ``statistic(x)``."""
    x = np.asarray(x, dtype=float)
    g = min(groups, x.size)
    parts = np.array_split(x, g)
    vals = np.empty(g)
    for i in range(g):
        rest = np.concatenate(parts[:i] + parts[i + 1:])
        vals[i] = statistic(rest)
    return float(np.sqrt((g - 1) / g * np.sum((vals - vals.mean()) ** 2)))


def tolerance_pct(se_pct: float, reference_pct: float | None = None, sigmas: float = 5.0) -> float:
    """``max(2 |reference|, sigmas * se)`` in percent; ``sigmas * se`` without a reference."""
    tol = sigmas * abs(se_pct)
    if reference_pct is not None:
        tol = max(tol, 2.0 * abs(reference_pct))
    return float(tol)
