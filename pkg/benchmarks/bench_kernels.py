"""Compiled versus numpy kernels: median wall-clock per call and speed-up.

    python benchmarks/bench_kernels.py [--size N] [--repeat R]
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from tempered_ou import _kernels
from tempered_ou.rand_core import RandomStream
from tempered_ou.special import j_series_coeffs


def _cases(n: int):
    s = RandomStream(0)
    u = s.uniform(n)

    coeffs = j_series_coeffs(0.9, 4, 0.5)
    total = float(0.5**4 * np.polyval(coeffs[::-1], 0.5))
    z0 = np.full(n, 0.25)
    yield "invert_power_series", lambda k: k.invert_power_series(coeffs, 4.0, 0.5, u * total, z0)

    x = 0.01 + 3.0 * u
    yield "tail_measure", lambda k: k.tail_measure(x, 0.5, 1.5)

    targets = _kernels.get_backend("python").tail_measure(x, 0.5, 1.5)
    yield "invert_tail", lambda k: k.invert_tail(targets, np.full(n, 0.5), 0.5, 1.5)

    f = 1.0 + np.sin(np.linspace(0.0, 3.0, 2001)) ** 2
    cum = np.cumsum(0.5 * 1e-3 * (f[:-1] + f[1:]))
    u2 = s.uniform(n)
    yield "sample_piecewise_linear", lambda k: k.sample_piecewise_linear(u, u2, cum, f, 0.0, 1e-3)

    innov = s.standard_normal((10, n // 10))
    yield "ou_filter", lambda k: k.ou_filter(np.zeros(10), 0.9, innov)


def _median_time(fn, repeat: int) -> float:
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=50_000)
    ap.add_argument("--repeat", type=int, default=7)
    a = ap.parse_args(argv)
    backends = _kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernels are not built; only the numpy backend is available")
    mods = {b: _kernels.get_backend(b) for b in backends}
    print(f"n={a.size}, median of {a.repeat} calls")
    print(f"{'kernel':<26}" + "".join(f"{b:>12}" for b in backends) + f"{'speed-up':>10}")
    for name, call in _cases(a.size):
        t = {b: _median_time(lambda: call(m), a.repeat) for b, m in mods.items()}
        ratio = t["python"] / t["compiled"] if "compiled" in t else float("nan")
        print(f"{name:<26}" + "".join(f"{t[b] * 1e3:>10.3f}ms" for b in backends)
              + f"{ratio:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
