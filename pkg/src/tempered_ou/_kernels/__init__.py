"""Hot-loop kernels with a compiled core and a numpy fallback.

The compiled extension is used when it was built at install time; otherwise
the numpy versions are used.  Both expose the same functions:

``invert_power_series``  safeguarded Newton inversion of a power-series cdf
``tail_measure``         tempered-stable Levy tail ``int_x^inf t^(-1-a) e^(-t^p) dt``
``invert_tail``          Newton inversion of ``tail_measure``
``sample_piecewise_linear``  inverse transform for piecewise-linear densities
``ou_filter``            first-order recursion ``y[k+1] = decay*y[k] + innov[k]``
"""
from __future__ import annotations

from types import ModuleType

from . import _pykernels

try:  # pragma: no cover - depends on the build
    from . import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

_FUNCTIONS = ("invert_power_series", "tail_measure", "invert_tail",
              "sample_piecewise_linear", "ou_filter")

BACKEND: str = ""


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _ckernels is not None else [])


def get_backend(name: str) -> ModuleType:
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built; reinstall with a C compiler")
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def use_backend(name: str) -> str:
    """Switch every kernel to backend ``name`` ("python" or "compiled"); returns the old name."""
    global BACKEND
    mod = get_backend(name)
    old = BACKEND
    for fn in _FUNCTIONS:
        globals()[fn] = getattr(mod, fn)
    BACKEND = mod.NAME
    return old


use_backend("compiled" if _ckernels is not None else "python")
