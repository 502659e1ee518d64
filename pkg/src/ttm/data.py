"""Datasets: CSV ingestion, splits, standardization, synthetic temporal-shift
generators, and per-window distribution diagnostics.

Generated datasets index rows by a progress variable u = i/n over a one-year
span; the four shift kinds move the class geometry, the covariate mean, the
label prior, or nothing at all.  All sampling is driven by named Philox
streams, so a (spec, seed) pair fully determines every byte.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .nn import InputError, ShapeError, check_matrix
from .rng import Stream
from .temporal import SECONDS_PER_YEAR

EPOCH0 = 1704067200.0  # 2024-01-01T00:00:00Z, origin for generated data
SHIFT_KINDS = ("concept", "covariate", "label", "none")


class SchemaError(ValueError):
    """CSV file does not match the expected schema."""


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    t: np.ndarray
    feature_names: list[str]
    task: str = "binary"
    vocab: dict[str, list[str]] | None = None  # one-hot categories, if any

    def __post_init__(self):
        self.X = check_matrix(self.X, "X")
        self.y = np.asarray(self.y, dtype=np.float64).reshape(-1)
        self.t = np.asarray(self.t, dtype=np.float64).reshape(-1)
        n = self.X.shape[0]
        if self.y.shape[0] != n or self.t.shape[0] != n:
            raise ShapeError("X, y and t must have equal row counts")
        if len(self.feature_names) != self.X.shape[1]:
            raise ShapeError("feature_names length must equal feature count")
        if not np.all(np.isfinite(self.t)):
            raise InputError("timestamps must be finite")
        if self.task == "binary" and not np.all((self.y == 0) | (self.y == 1)):
            raise InputError("classification labels must be 0 or 1")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]


@dataclass
class SplitAssignment:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        parts = [np.asarray(s, dtype=np.int64) for s in (self.train, self.val, self.test)]
        self.train, self.val, self.test = parts
        merged = np.concatenate(parts)
        if len(np.unique(merged)) != merged.shape[0]:
            raise ValueError("split index sets overlap")

    def check_covers(self, n: int) -> None:
        total = self.train.shape[0] + self.val.shape[0] + self.test.shape[0]
        if total != n:
            raise ValueError(f"splits cover {total} of {n} rows")


def _validate_ratios(ratios) -> tuple[float, float, float]:
    if len(ratios) != 3:
        raise ValueError("ratios must have exactly three entries")
    r = tuple(float(v) for v in ratios)
    if any(v <= 0 for v in r):
        raise ValueError(f"split ratios must all be positive, got {r}")
    if abs(sum(r) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {r}")
    return r


def _cut(order: np.ndarray, ratios) -> SplitAssignment:
    n = order.shape[0]
    r = _validate_ratios(ratios)
    if n < 3:
        raise ValueError("need at least 3 rows to split")
    n_train = int(math.floor(n * r[0]))
    n_val = int(math.floor(n * r[1]))
    n_train = max(n_train, 1)
    n_val = max(n_val, 1)
    if n_train + n_val >= n:
        raise ValueError("ratios leave no test rows")
    return SplitAssignment(
        train=order[:n_train],
        val=order[n_train : n_train + n_val],
        test=order[n_train + n_val :],
    )


def temporal_split(ds: Dataset, ratios=(0.7, 0.15, 0.15)) -> SplitAssignment:
    """Chronological split: earliest fraction trains, latest tests.

    Rows are ordered by (t, original index) so equal timestamps break ties
    stably.  Sizes follow the floor rule: floor(n*r) for train and val, the
    remainder goes to test.
    """
    order = np.lexsort((np.arange(ds.n), ds.t))
    return _cut(order, ratios)


def random_split(ds: Dataset, ratios, seed: int) -> SplitAssignment:
    """Seeded shuffle followed by the same floor-rule cut."""
    perm = Stream(seed, "random_split").permutation(ds.n)
    return _cut(perm, ratios)


@dataclass
class Standardizer:
    """Per-feature (x - mean) / std with population std from the train split.

    Zero-variance features keep divisor 1 so constants map to exactly 0.
    """

    mean: np.ndarray
    std: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std


def fit_standardizer(ds: Dataset, train_idx: np.ndarray) -> Standardizer:
    if len(train_idx) == 0:
        raise ValueError("cannot fit standardizer on an empty train split")
    Xt = ds.X[train_idx]
    mean = Xt.mean(axis=0)
    std = Xt.std(axis=0)  # population std (ddof=0)
    std = np.where(std == 0.0, 1.0, std)
    return Standardizer(mean=mean, std=std)


# --------------------------------------------------------------- generators


@dataclass(frozen=True)
class ShiftGeneratorSpec:
    kind: str
    n: int
    seed: int
    segments: int = 5
    radius: float = 2.0
    noise: float = 0.5

    def __post_init__(self):
        if self.kind not in SHIFT_KINDS:
            raise ValueError(f"unknown shift kind {self.kind!r}; choose from {SHIFT_KINDS}")
        if self.n <= 0:
            raise ValueError("n must be positive")
        if self.segments < 1:
            raise ValueError("segments must be >= 1")
        if self.radius <= 0 or self.noise <= 0:
            raise ValueError("radius and noise must be positive")


def generate(spec: ShiftGeneratorSpec) -> Dataset:
    """Two-feature binary dataset over one year of integer timestamps.

    concept    class means rotate a full turn: +/- r(cos 2*pi*u, sin 2*pi*u).
               Aggregated over u the two class-conditionals are the same ring
               mixture, so no static classifier beats chance, while the
               per-time Bayes accuracy is Phi(2r/(2*noise)).
    covariate  both class means +/-(r, 0) drift by (4u, 0); p(y|x-drift) fixed.
    label      fixed means +/-(r, 0); class prior pi(u) = 0.2 + 0.6u.
    none       stationary means +/-(r, 0), pi = 0.5.
    """
    n, r, sigma = spec.n, spec.radius, spec.noise
    u = np.arange(n, dtype=np.float64) / n
    t = EPOCH0 + np.floor(u * SECONDS_PER_YEAR)

    label_stream = Stream(spec.seed, "labels", spec.kind)
    noise_stream = Stream(spec.seed, "noise", spec.kind)

    if spec.kind == "label":
        y = label_stream.bernoulli(0.2 + 0.6 * u)
    else:
        y = label_stream.bernoulli(np.full(n, 0.5))
    sign = 2.0 * y - 1.0

    if spec.kind == "concept":
        theta = 2.0 * np.pi * u
        means = np.stack([np.cos(theta), np.sin(theta)], axis=1) * r * sign[:, None]
    else:
        means = np.stack([np.full(n, r), np.zeros(n)], axis=1) * sign[:, None]
        if spec.kind == "covariate":
            means[:, 0] += 4.0 * u

    X = means + sigma * noise_stream.normal((n, 2))
    return Dataset(X=X, y=y, t=t, feature_names=["x0", "x1"], task="binary")


# ---------------------------------------------------------------- statistics


@dataclass
class WindowStats:
    window: int
    t_start: float
    t_end: float
    feature: str
    mean: float
    std: float
    skewness: float | None


def _moment_stats(values: np.ndarray):
    mean = float(values.mean())
    centered = values - mean
    m2 = float(np.mean(centered**2))
    std = math.sqrt(m2)
    if values.shape[0] < 3 or m2 == 0.0:
        return mean, std, None
    m3 = float(np.mean(centered**3))
    return mean, std, m3 / m2**1.5


def temporal_stats(ds: Dataset, n_windows: int) -> list[WindowStats]:
    """Chronological equal-count windows; per-feature mean/std/skewness.

    std is population std; skewness is g1 = m3 / m2^(3/2) and is reported as
    missing (None) for windows with fewer than 3 rows or zero variance.
    """
    if n_windows < 1 or n_windows > ds.n:
        raise ValueError(f"n_windows must be in [1, {ds.n}]")
    order = np.lexsort((np.arange(ds.n), ds.t))
    bounds = [round(w * ds.n / n_windows) for w in range(n_windows + 1)]
    rows = []
    for w in range(n_windows):
        idx = order[bounds[w] : bounds[w + 1]]
        if len(idx) == 0:
            raise ValueError(f"window {w} is empty; reduce n_windows")
        tw = ds.t[idx]
        for j, name in enumerate(ds.feature_names):
            mean, std, skew = _moment_stats(ds.X[idx, j])
            rows.append(
                WindowStats(
                    window=w,
                    t_start=float(tw.min()),
                    t_end=float(tw.max()),
                    feature=name,
                    mean=mean,
                    std=std,
                    skewness=skew,
                )
            )
    return rows


def write_stats_csv(rows: list[WindowStats], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("window,t_start,t_end,feature,mean,std,skewness\n")
        for s in rows:
            skew = "" if s.skewness is None else repr(s.skewness)
            f.write(
                f"{s.window},{_num(s.t_start)},{_num(s.t_end)},{s.feature},"
                f"{repr(s.mean)},{repr(s.std)},{skew}\n"
            )


# ------------------------------------------------------------------ CSV I/O


def _num(v: float) -> str:
    """Integer-valued floats print as integers (timestamps in particular)."""
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def save_csv(ds: Dataset, path) -> None:
    """Write features, label column 'y' and integer epoch column 't'."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join([*ds.feature_names, "y", "t"]) + "\n")
        label_int = ds.task == "binary"
        for i in range(ds.n):
            feats = ",".join(repr(float(v)) for v in ds.X[i])
            y = str(int(ds.y[i])) if label_int else repr(float(ds.y[i]))
            f.write(f"{feats},{y},{_num(ds.t[i])}\n")


def _parse_time(cell: str, row: int):
    try:
        return float(cell)
    except ValueError:
        pass
    try:
        iso = cell.replace("Z", "+00:00")
        dt = datetime.fromisoformat(iso)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.timestamp()
    except ValueError:
        raise SchemaError(f"row {row}: cannot parse timestamp {cell!r}") from None


def load_csv(
    path,
    label_col: str = "y",
    time_col: str = "t",
    categorical_cols: tuple[str, ...] = (),
    task: str = "binary",
    vocab: dict[str, list[str]] | None = None,
) -> Dataset:
    """Load a dataset from a headered CSV.

    Non-label, non-time columns become features.  Categorical columns are
    one-hot encoded with category order equal to first appearance; pass
    ``vocab`` (from a previous load) to reuse an encoding, in which case
    unseen categories encode as all-zeros.  Missing or unparseable cells are
    errors (the row index is reported).
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        records = list(reader)
    if not records:
        raise SchemaError(f"{path}: no data rows")
    for col in (label_col, time_col, *categorical_cols):
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")
    col_idx = {name: i for i, name in enumerate(header)}
    feat_cols = [c for c in header if c not in (label_col, time_col)]
    cat_set = set(categorical_cols)

    vocab = {c: list(vocab.get(c, [])) for c in categorical_cols} if vocab else {
        c: [] for c in categorical_cols
    }
    extend_vocab = all(len(v) == 0 for v in vocab.values())
    for rec in records:
        for c in categorical_cols:
            cell = rec[col_idx[c]]
            if extend_vocab and cell not in vocab[c]:
                vocab[c].append(cell)

    names: list[str] = []
    for c in feat_cols:
        if c in cat_set:
            names.extend(f"{c}={v}" for v in vocab[c])
        else:
            names.append(c)

    X = np.zeros((len(records), len(names)))
    y = np.empty(len(records))
    t = np.empty(len(records))
    for i, rec in enumerate(records):
        if len(rec) != len(header):
            raise SchemaError(f"row {i}: expected {len(header)} cells, got {len(rec)}")
        j = 0
        for c in feat_cols:
            cell = rec[col_idx[c]]
            if c in cat_set:
                width = len(vocab[c])
                if cell in vocab[c]:
                    X[i, j + vocab[c].index(cell)] = 1.0
                j += width
            else:
                try:
                    X[i, j] = float(cell)
                except ValueError:
                    raise SchemaError(
                        f"row {i}: cannot parse numeric cell {cell!r} in column {c!r}"
                    ) from None
                j += 1
        try:
            y[i] = float(rec[col_idx[label_col]])
        except ValueError:
            raise SchemaError(
                f"row {i}: cannot parse label {rec[col_idx[label_col]]!r}"
            ) from None
        t[i] = _parse_time(rec[col_idx[time_col]], i)
    return Dataset(X=X, y=y, t=t, feature_names=names, task=task, vocab=vocab)
