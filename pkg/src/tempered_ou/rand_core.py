"""Deterministic random substrate.

Every sampler in the package draws through a :class:`RandomStream`.  A stream
wraps numpy's counter-based Philox generator keyed by ``SeedSequence(seed,
spawn_key=path)``, so deriving the stream for path ``i`` is O(1) and the
result depends only on ``(seed, path)``.
"""
from __future__ import annotations

import numpy as np

from .errors import ParameterError

DEFAULT_SEED = 0
_U64 = 1 << 64


class RandomStream:
    """Seeded, single-owner source of uniform, gamma and Poisson variates.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit seed.  Defaults to :data:`DEFAULT_SEED` (never the
        wall clock).
    path : tuple of int, optional
        Substream coordinates; normally set by :meth:`substream`.

    Notes
    -----
    Streams are not thread safe.  Hand each worker its own substream.
    """

    __slots__ = ("seed", "path", "_gen")

    def __init__(self, seed: int = DEFAULT_SEED, path: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < _U64:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.path = tuple(int(i) for i in path)
        ss = np.random.SeedSequence(seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, path={self.path})"

    def substream(self, index: int) -> "RandomStream":
        index = int(index)
        if index < 0:
            raise ParameterError(f"substream index must be >= 0, got {index}")
        return RandomStream(self.seed, self.path + (index,))

    def uniform(self, size=None):
        """Uniform variates on the open interval (0, 1)."""
        u = self._gen.random(size)
        if size is None:
            while u == 0.0:
                u = self._gen.random()
            return u
        zero = u == 0.0
        while zero.any():
            u[zero] = self._gen.random(int(zero.sum()))
            zero = u == 0.0
        return u

    def exponential(self, size=None):
        return -np.log(self.uniform(size))

    def standard_gamma(self, shape, size=None):
        """Ga(shape, 1) variates (Marsaglia-Tsang with boosting for shape < 1)."""
        g = self._gen.standard_gamma(shape, size)
        # shape << 1 can underflow to exactly zero; the laws built on top need > 0.
        if size is None:
            while g == 0.0:
                g = self._gen.standard_gamma(shape)
            return g
        zero = g == 0.0
        while zero.any():
            g[zero] = self._gen.standard_gamma(shape, int(zero.sum()))
            zero = g == 0.0
        return g

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)

    def gamma(self, shape, rate=1.0, size=None):
        return self.standard_gamma(shape, size) / rate

    def poisson(self, mean, size=None):
        return self._gen.poisson(mean, size)

    def integers(self, high, size=None):
        return self._gen.integers(0, high, size)


def make_stream(seed: int | None = None) -> RandomStream:
    return RandomStream(DEFAULT_SEED if seed is None else seed)


def next_uniform(s: RandomStream) -> float:
    """One U(0,1) draw, never 0 or 1."""
    return float(s.uniform())


def draw_gamma(s: RandomStream, shape: float, rate: float = 1.0, size=None):
    """Ga(shape, rate) draw(s); rate is the inverse scale."""
    if not (np.isfinite(shape) and shape > 0):
        raise ParameterError(f"gamma shape must be > 0, got {shape}")
    if not (np.isfinite(rate) and rate > 0):
        raise ParameterError(f"gamma rate must be > 0, got {rate}")
    return s.gamma(shape, rate, size)


def draw_poisson(s: RandomStream, mean: float, size=None):
    if not (np.isfinite(mean) and mean >= 0):
        raise ParameterError(f"Poisson mean must be finite and >= 0, got {mean}")
    if mean == 0:
        return 0 if size is None else np.zeros(size, dtype=np.int64)
    return s.poisson(mean, size)


def derive_substream(s: RandomStream, index: int) -> RandomStream:
    """Independent child stream, a pure function of ``(s.seed, s.path, index)``."""
    return s.substream(index)
