"""Wall-clock comparison of sampling methods."""
from __future__ import annotations

import platform
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .. import _kernels
from ..rand_core import RandomStream
from .validate import build_id

DEFAULT_SIZES = (1_000, 10_000, 20_000, 50_000)


def machine_descriptor() -> str:
    return (f"{platform.machine()} {platform.processor() or 'cpu'} | {platform.system()} "
            f"{platform.release()} | Python {platform.python_version()} | numpy {np.__version__} "
            f"| kernels {_kernels.BACKEND}")


@dataclass
class BenchReport:
    """Median wall-clock seconds per ``(method, n)`` and factors relative to ``baseline``."""

    distribution: str
    params: dict
    methods: list
    sizes: list
    repetitions: int
    baseline: str
    seconds: dict = field(default_factory=dict)
    seed: int = 0
    machine: str = ""
    build_id: str = ""

    @property
    def factors(self) -> dict:
        return {m: {n: self.seconds[m][n] / self.seconds[self.baseline][n] for n in self.sizes}
                for m in self.methods}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seconds"] = {m: {str(n): v for n, v in row.items()} for m, row in self.seconds.items()}
        d["factors"] = {m: {str(n): v for n, v in row.items()} for m, row in self.factors.items()}
        return d


def time_call(fn: Callable[[RandomStream, int], object], n: int, repetitions: int, seed: int):
    """Median of ``repetitions`` timed calls, each with its own substream."""
    times = []
    for r in range(repetitions):
        s = RandomStream(seed, (r,))
        t0 = time.perf_counter()
        fn(s, n)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def bench(samplers: Mapping[str, Callable[[RandomStream, int], object]],
          sizes: Sequence[int] = DEFAULT_SIZES, repetitions: int = 5, baseline: str | None = None,
          seed: int = 0, distribution: str = "", params: dict | None = None) -> BenchReport:
    """Time each sampler at each size.

    ``samplers`` maps method names to callables ``(stream, n) -> draws`` whose
    tables are already built, so only sampling is timed.  One warm-up call per
    method is discarded.
    """
    if repetitions < 3:
        raise ValueError(f"need at least 3 repetitions, got {repetitions}")
    methods = list(samplers)
    baseline = baseline or methods[0]
    if baseline not in samplers:
        raise ValueError(f"baseline {baseline!r} is not among the methods")
    rep = BenchReport(distribution, params or {}, methods, [int(n) for n in sizes], repetitions,
                      baseline, seed=seed, machine=machine_descriptor(), build_id=build_id())
    for m, fn in samplers.items():
        fn(RandomStream(seed, (10**6,)), min(sizes))
        rep.seconds[m] = {int(n): time_call(fn, int(n), repetitions, seed) for n in sizes}
    return rep


def format_bench(rep: BenchReport) -> str:
    head = f"{rep.distribution} {rep.params} seed={rep.seed} reps={rep.repetitions}"
    lines = [head, rep.machine, f"{'method':<10}" + "".join(f"{n:>12}" for n in rep.sizes)]
    for m in rep.methods:
        if m == rep.baseline:
            cells = "".join(f"{rep.seconds[m][n]:>11.4g}s" for n in rep.sizes)
        else:
            cells = "".join(f"{rep.factors[m][n]:>11.3g}x" for n in rep.sizes)
        lines.append(f"{m:<10}{cells}")
    return "\n".join(lines)
