"""Temporal embedding: fixed Fourier features over calendar periods plus a
normalized linear trend, followed by a learned linear projection.

The raw featurizer is parameter-free; only the projection is trained.
Raw layout: periods in order year, month, day, hour, each contributing
interleaved (sin_k, cos_k) for k = 1..order, then the trend scalar last.
Phases are anchored at epoch 0 and computed from fmod(t, period), which
keeps the arguments small and makes t -> t + period an exact symmetry for
the integer-valued periods used here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .nn import LinearLayer, ShapeError, linear_backward, linear_forward

SECONDS_PER_HOUR = 3600.0
SECONDS_PER_DAY = 86400.0
SECONDS_PER_YEAR = 365.2425 * 86400.0  # 31_556_952, exact in float64
SECONDS_PER_MONTH = SECONDS_PER_YEAR / 12.0  # 2_629_746

_PERIOD_TABLE = {
    "year": SECONDS_PER_YEAR,
    "month": SECONDS_PER_MONTH,
    "day": SECONDS_PER_DAY,
    "hour": SECONDS_PER_HOUR,
}


@dataclass(frozen=True)
class PeriodSpec:
    name: str
    period_seconds: float
    order: int = 128

    def __post_init__(self):
        if self.name not in _PERIOD_TABLE:
            raise ValueError(f"unknown period name {self.name!r}")
        if self.period_seconds <= 0 or self.order < 1:
            raise ValueError("period_seconds must be positive and order >= 1")

    @classmethod
    def named(cls, name: str, order: int = 128) -> "PeriodSpec":
        return cls(name=name, period_seconds=_PERIOD_TABLE[name], order=order)


def default_periods(order: int = 128) -> tuple[PeriodSpec, ...]:
    return tuple(PeriodSpec.named(n, order) for n in ("year", "month", "day", "hour"))


@dataclass(frozen=True)
class EmbeddingConfig:
    periods: tuple[PeriodSpec, ...] = field(default_factory=default_periods)
    trend: bool = True
    d_embedding: int = 128

    def __post_init__(self):
        d = self.d_embedding
        if d < 0 or (d > 0 and (d & (d - 1)) != 0):
            raise ValueError(f"d_embedding must be 0 or a power of two, got {d}")
        if d > 0 and not self.periods and not self.trend:
            raise ValueError("embedding enabled but no active components")

    @property
    def raw_width(self) -> int:
        return sum(2 * p.order for p in self.periods) + (1 if self.trend else 0)

    @property
    def enabled(self) -> bool:
        return self.d_embedding > 0


@dataclass(frozen=True)
class TrendNormalizer:
    """Maps epoch seconds affinely so the training range covers [0, 1].

    Not clipped: timestamps after the training window map above 1, which is
    what lets the trend component extrapolate.
    """

    t_min: float
    t_max: float

    def __post_init__(self):
        if not self.t_max > self.t_min:
            raise ValueError(f"t_max ({self.t_max}) must exceed t_min ({self.t_min})")

    @classmethod
    def from_train_times(cls, t: np.ndarray) -> "TrendNormalizer":
        return cls(t_min=float(np.min(t)), t_max=float(np.max(t)))

    def value(self, t: np.ndarray) -> np.ndarray:
        return (np.asarray(t, dtype=np.float64) - self.t_min) / (self.t_max - self.t_min)


def raw_features(
    t, config: EmbeddingConfig, normalizer: TrendNormalizer | None
) -> np.ndarray:
    """Featurize timestamps into shape (n, raw_width)."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    blocks = []
    for p in config.periods:
        phase = 2.0 * np.pi * (np.fmod(t, p.period_seconds) / p.period_seconds)
        k = np.arange(1, p.order + 1, dtype=np.float64)
        angles = phase[:, None] * k[None, :]
        block = np.empty((t.shape[0], 2 * p.order))
        block[:, 0::2] = np.sin(angles)
        block[:, 1::2] = np.cos(angles)
        blocks.append(block)
    if config.trend:
        if normalizer is None:
            raise ValueError("trend enabled but no normalizer provided")
        blocks.append(normalizer.value(t)[:, None])
    return np.concatenate(blocks, axis=1)


SPECTRAL_DECAY_POWER = 3.0
SPECTRAL_SCALE_FLOOR = 1e-4


def frequency_scales(config: EmbeddingConfig) -> np.ndarray:
    """Smoothness prior over raw columns: scale (1/f)^3 with f in cycles/year.

    The projection consumes scaled features, so under a per-coordinate
    optimizer the rate at which a harmonic can enter psi falls off with its
    absolute frequency k * (year / P); the trend column scales as 1.  Slowly
    varying components therefore dominate what the embedding can learn
    quickly, favoring temporal patterns that extrapolate over high-frequency
    memorization of the training window.  The floor keeps every projection
    weight's loss sensitivity far enough above float rounding noise for
    finite-difference verification.
    """
    scales = []
    for p in config.periods:
        cycles = SECONDS_PER_YEAR / p.period_seconds
        for k in range(1, p.order + 1):
            s = max((1.0 / (k * cycles)) ** SPECTRAL_DECAY_POWER, SPECTRAL_SCALE_FLOOR)
            scales.extend([s, s])  # sin and cos
    if config.trend:
        scales.append(1.0)
    return np.asarray(scales)


def spectral_projection(config: EmbeddingConfig, stream: Stream) -> LinearLayer:
    """Seeded projection calibrated so psi has roughly unit variance given
    the frequency-scaled inputs it will consume."""
    scales = frequency_scales(config)
    gain = np.sqrt(6.0 / np.sum(scales**2))
    w = stream.uniform_range(-gain, gain, (config.d_embedding, config.raw_width))
    return LinearLayer(w, np.zeros(config.d_embedding))


class TemporalEmbedding:
    """psi(t): raw featurizer, fixed 1/f^3 column scaling, learned projection."""

    def __init__(
        self,
        config: EmbeddingConfig,
        normalizer: TrendNormalizer | None,
        projection: LinearLayer,
    ):
        if projection.in_dim != config.raw_width:
            raise ShapeError(
                f"projection input {projection.in_dim} != raw width {config.raw_width}"
            )
        if projection.out_dim != config.d_embedding:
            raise ShapeError(
                f"projection output {projection.out_dim} != d_embedding "
                f"{config.d_embedding}"
            )
        self.config = config
        self.normalizer = normalizer
        self.projection = projection
        self.scales = frequency_scales(config)
        self._cached_raw: np.ndarray | None = None

    def embed(self, t, raw: np.ndarray | None = None) -> np.ndarray:
        """Compute psi(t) for a vector of timestamps, caching for backward.

        ``raw`` lets callers reuse precomputed raw features (they depend only
        on t, never on parameters).
        """
        if raw is None:
            raw = raw_features(t, self.config, self.normalizer)
        self._cached_raw = raw * self.scales
        return linear_forward(self.projection, self._cached_raw)

    def embed_backward(self, upstream: np.ndarray) -> None:
        """Accumulate projection grads; raw features are constants of t."""
        if self._cached_raw is None:
            raise RuntimeError("embed_backward called before embed")
        linear_backward(self.projection, self._cached_raw, upstream)

    def parameters(self):
        return self.projection.parameters()
