"""Training loop with validation-driven early stopping.

Model selection tracks the validation metric (AUC up for classification,
RMSE down for regression); an epoch counts as an improvement only when it
beats the best value by more than the configured tolerance.  Training stops
after `patience` consecutive non-improving epochs.  For a fixed (dataset,
splits, config) the run is bit-deterministic, including the final
parameters.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, SplitAssignment, fit_standardizer
from .metrics import accuracy, auc, rmse
from .models import Model, ModelSpec
from .nn import InputError, sigmoid
from .optim import AdamW, AdamWConfig
from .rng import Stream
from .temporal import TrendNormalizer, raw_features


class TrainingDiverged(RuntimeError):
    """Loss became NaN; message names the offending epoch and batch."""


@dataclass
class TrainConfig:
    batch_size: int = 1024
    max_epochs: int = 1000
    patience: int = 16
    adamw: AdamWConfig = field(default_factory=AdamWConfig)
    seed: int = 0
    shuffle: bool = True
    # Minimum val-metric gain that counts as an improvement.  AUC on a
    # validation split moves in discrete jumps, so a near-zero tolerance
    # lets late-training jitter reset the patience counter for hundreds of
    # epochs without measurable test gains.
    min_improvement: float = 1e-4

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.min_improvement < 0:
            raise ValueError("min_improvement must be >= 0")


@dataclass
class RunResult:
    best_epoch: int
    history: dict
    test_metrics: dict
    seed: int
    wall_clock_seconds: float
    config: dict

    def to_json_dict(self) -> dict:
        """Documented result schema; wall clock is intentionally omitted so
        reruns with the same seed produce byte-identical files."""
        return {
            "best_epoch": self.best_epoch,
            "history": self.history,
            "test_metrics": self.test_metrics,
            "seed": self.seed,
            "config": self.config,
        }


def _metric_direction(task: str):
    # (name, higher_is_better)
    return ("auc", True) if task == "binary" else ("rmse", False)


class _Evaluator:
    """Batched scoring over a fixed index set with cached time features."""

    def __init__(self, model: Model, ds: Dataset, idx: np.ndarray, batch_size: int):
        self.model = model
        self.x = ds.X[idx]
        self.y = ds.y[idx]
        self.t = ds.t[idx]
        self.batch = batch_size
        self.raw = _cache_raw_features(model, self.t)

    def scores(self) -> np.ndarray:
        out = np.empty(self.x.shape[0])
        for lo in range(0, self.x.shape[0], self.batch):
            hi = lo + self.batch
            raw = None if self.raw is None else self.raw[lo:hi]
            out[lo:hi] = self.model.logits(
                self.x[lo:hi], self.t[lo:hi], raw_time_features=raw
            ).reshape(-1)
        return out

    def metrics(self) -> dict:
        z = self.scores()
        if self.model.spec.task == "binary":
            p = sigmoid(z)
            return {"auc": auc(p, self.y), "accuracy": accuracy(p, self.y)}
        pred = z
        if self.model.y_mean is not None:
            pred = pred * self.model.y_std + self.model.y_mean
        return {"rmse": rmse(pred, self.y)}


def _cache_raw_features(model: Model, t: np.ndarray):
    if model.spec.uses_embedding() and model.embedding is not None:
        return raw_features(t, model.embedding.config, model.embedding.normalizer)
    return None


def train(
    spec: ModelSpec,
    ds: Dataset,
    splits: SplitAssignment,
    config: TrainConfig,
) -> tuple[Model, RunResult]:
    """Train a freshly initialized model; returns it with best-epoch weights."""
    for name, idx in (("train", splits.train), ("val", splits.val), ("test", splits.test)):
        if len(idx) == 0:
            raise InputError(f"empty {name} split")
    splits.check_covers(ds.n)
    if spec.backbone.input_width != ds.m:
        raise InputError(
            f"model input width {spec.backbone.input_width} != dataset features {ds.m}"
        )

    started = time.perf_counter()
    trend = TrendNormalizer.from_train_times(ds.t[splits.train])
    model = Model.init(spec, seed=config.seed, trend_normalizer=trend)

    std = fit_standardizer(ds, splits.train)
    model.set_x_standardizer(std.mean, std.std)
    if spec.task == "regression":
        y_train = ds.y[splits.train]
        y_std = float(y_train.std())
        model.set_y_standardizer(float(y_train.mean()), y_std if y_std > 0 else 1.0)

    x_train = ds.X[splits.train]
    y_train = ds.y[splits.train]
    t_train = ds.t[splits.train]
    raw_train = _cache_raw_features(model, t_train)

    optimizer = AdamW(model.parameters(), config.adamw)
    val_eval = _Evaluator(model, ds, splits.val, config.batch_size)

    metric_name, higher_better = _metric_direction(spec.task)
    best_metric = -np.inf if higher_better else np.inf
    best_epoch = 0
    best_state = model.state()
    bad_epochs = 0
    train_losses: list[float] = []
    val_history: list[float] = []

    n_train = x_train.shape[0]
    for epoch in range(1, config.max_epochs + 1):
        if config.shuffle:
            perm = Stream(config.seed, "shuffle", epoch).permutation(n_train)
        else:
            perm = np.arange(n_train)
        epoch_loss = 0.0
        for bi, lo in enumerate(range(0, n_train, config.batch_size)):
            sel = perm[lo : lo + config.batch_size]
            model.zero_grad()
            raw = None if raw_train is None else raw_train[sel]
            loss = model.loss_and_grad(
                x_train[sel], y_train[sel], t_train[sel], raw_time_features=raw
            )
            if not np.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch}, batch {bi}"
                )
            optimizer.step()
            epoch_loss += loss * sel.shape[0]
        train_losses.append(epoch_loss / n_train)

        val_metric = val_eval.metrics()[metric_name]
        val_history.append(val_metric)
        improved = (
            val_metric > best_metric + config.min_improvement
            if higher_better
            else val_metric < best_metric - config.min_improvement
        )
        if improved:
            best_metric = val_metric
            best_epoch = epoch
            best_state = model.state()
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= config.patience:
                break

    model.load_state(best_state)
    test_metrics = _Evaluator(model, ds, splits.test, config.batch_size).metrics()

    result = RunResult(
        best_epoch=best_epoch,
        history={
            "train_loss": train_losses,
            f"val_{metric_name}": val_history,
        },
        test_metrics=test_metrics,
        seed=config.seed,
        wall_clock_seconds=time.perf_counter() - started,
        config={
            "batch_size": config.batch_size,
            "max_epochs": config.max_epochs,
            "patience": config.patience,
            "lr": config.adamw.lr,
            "weight_decay": config.adamw.weight_decay,
            "shuffle": config.shuffle,
        },
    )
    return model, result
