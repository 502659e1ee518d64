"""Deterministic random streams for reproducible experiments.

Every random draw in the library comes from a named stream derived from a
single user-visible seed.  The splitting scheme is:

    stream(seed, *tags) -> Philox keyed by SeedSequence([seed, crc32(tag0), ...])

Philox is a 64-bit counter-based generator with a stable cross-platform
bit stream; we consume its raw output directly (uniforms via the top 53
bits, normals via Box-Muller) so results do not depend on numpy's
higher-level distribution algorithms.
"""

from __future__ import annotations

import zlib

import numpy as np


def _entropy(seed: int, tags: tuple) -> list[int]:
    ints = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for tag in tags:
        ints.append(zlib.crc32(str(tag).encode("utf-8")))
    return ints


class Stream:
    """A named deterministic random stream."""

    def __init__(self, seed: int, *tags):
        self._bitgen = np.random.Philox(np.random.SeedSequence(_entropy(seed, tags)))

    def raw(self, n: int) -> np.ndarray:
        return self._bitgen.random_raw(n)

    def uniform(self, n: int) -> np.ndarray:
        """n doubles uniform on (0, 1]; never 0, so safe under log."""
        return ((self.raw(n) >> 11) + 1.0) * 2.0**-53

    def normal(self, shape) -> np.ndarray:
        """Standard normals via Box-Muller on consecutive uniform pairs."""
        n = int(np.prod(shape)) if not isinstance(shape, int) else shape
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs)
        u1, u2 = u[:pairs], u[pairs:]
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.concatenate([r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)])
        return z[:n].reshape(shape)

    def bernoulli(self, p) -> np.ndarray:
        """One draw per entry of p (array or scalar broadcast to n)."""
        p = np.atleast_1d(np.asarray(p, dtype=np.float64))
        return (self.uniform(p.shape[0]) < p).astype(np.float64)

    def permutation(self, n: int) -> np.ndarray:
        """Deterministic permutation of range(n) via argsort of uniforms."""
        return np.argsort(self.uniform(n), kind="stable")

    def uniform_range(self, low: float, high: float, shape) -> np.ndarray:
        n = int(np.prod(shape))
        return (low + (high - low) * self.uniform(n)).reshape(shape)
