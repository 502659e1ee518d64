"""What the temporal embedding psi(t) is made of.

Timestamps become Fourier features over calendar periods (year, month,
day, hour) plus a linear trend normalized on the training range, then a
learned projection mixes them down to d_embedding.  A fixed 1/f^3 scaling
between the featurizer and the projection means slow components dominate
what the embedding can express early in training.
"""

import numpy as np

from ttm import EmbeddingConfig, Stream, TrendNormalizer, raw_features
from ttm.temporal import (
    SECONDS_PER_DAY,
    SECONDS_PER_YEAR,
    frequency_scales,
    spectral_projection,
    TemporalEmbedding,
)

config = EmbeddingConfig()  # year/month/day/hour at order 128 + trend -> 1025
print(f"raw feature width: {config.raw_width}")

train_start, train_end = 1704067200.0, 1704067200.0 + 0.7 * SECONDS_PER_YEAR
norm = TrendNormalizer(train_start, train_end)

t = np.array([train_start, train_start + SECONDS_PER_DAY * 100, train_end])
feats = raw_features(t, config, norm)
print("periodic features live in [-1, 1]:", feats[:, :-1].min(), feats[:, :-1].max())
print("trend column over (start, +100d, end):", np.round(feats[:, -1], 4))

later = raw_features(np.array([train_end + SECONDS_PER_DAY * 30]), config, norm)
print("trend extrapolates past 1 for future timestamps:", round(later[0, -1], 4))

print("\nperiodicity: hour block is invariant under t -> t + 3600")
a = raw_features(np.array([train_start + 1234.0]), config, norm)
b = raw_features(np.array([train_start + 1234.0 + 3600.0]), config, norm)
hour_cols = slice(2 * 128 * 3, 2 * 128 * 4)
print("  max |diff| over hour block:", np.abs(a[:, hour_cols] - b[:, hour_cols]).max())

scales = frequency_scales(config)
print("\nspectral scaling (1/f^3, f in cycles/year):")
print(f"  year k=1:  {scales[0]:.2e}      year k=2:  {scales[2]:.2e}")
print(f"  month k=1: {scales[2 * 128]:.2e}   day k=1:   {scales[4 * 128]:.2e}")
print(f"  trend:     {scales[-1]:.2e}")

proj = spectral_projection(config, Stream(0, "projection"))
emb = TemporalEmbedding(config, norm, proj)
psi = emb.embed(np.linspace(train_start, train_end, 1000))
print(f"\npsi(t) shape {psi.shape}; per-coordinate std ~ {psi.std(axis=0).mean():.2f}")
