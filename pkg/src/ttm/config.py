"""Experiment configuration files (JSON) with strict validation.

A run config has three sections: ``data`` (a CSV path or a generator spec
plus the split protocol), ``model`` (variant, widths, embedding dimension,
placements) and ``train`` (optimizer and loop settings).  Unknown keys are
rejected anywhere in the document; every field has a default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .data import (
    Dataset,
    ShiftGeneratorSpec,
    SplitAssignment,
    generate,
    load_csv,
    random_split,
    temporal_split,
)
from .harness import placements_for
from .models import BackboneSpec, ModelSpec
from .optim import AdamWConfig
from .temporal import EmbeddingConfig
from .train import TrainConfig


class ConfigError(ValueError):
    """Invalid run configuration; message carries the offending key path."""


def _check_keys(section: dict, allowed: set[str], path: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")


def _get(section: dict, key: str, default, path: str, types) -> object:
    value = section.get(key, default)
    if value is not None and not isinstance(value, types):
        raise ConfigError(f"{path}.{key}: expected {types}, got {type(value).__name__}")
    return value


@dataclass
class RunConfig:
    data: dict
    model: dict
    train: dict
    source: str = "<memory>"

    def build_dataset(self) -> Dataset:
        d = self.data
        if d["path"] is not None:
            return load_csv(
                d["path"],
                label_col=d["label_col"],
                time_col=d["time_col"],
                categorical_cols=tuple(d["categorical_cols"]),
                task=d["task"],
            )
        g = d["generator"]
        return generate(
            ShiftGeneratorSpec(
                kind=g["kind"],
                n=g["n"],
                seed=g["seed"],
                segments=g["segments"],
                radius=g["radius"],
                noise=g["noise"],
            )
        )

    def build_splits(self, ds: Dataset) -> SplitAssignment:
        s = self.data["split"]
        if s["kind"] == "temporal":
            return temporal_split(ds, tuple(s["ratios"]))
        return random_split(ds, tuple(s["ratios"]), seed=s["seed"])

    def build_model_spec(self, ds: Dataset) -> ModelSpec:
        m = self.model
        backbone = BackboneSpec(input_width=ds.m, hidden=tuple(m["hidden"]))
        variant = m["variant"]
        embedding = None
        placements = ()
        if variant in ("embedding", "modulated"):
            embedding = EmbeddingConfig(d_embedding=m["d_embedding"])
        if variant == "modulated":
            p = m["placements"]
            rep_layers = p["representation_layers"]
            placements = placements_for(
                p["input"],
                p["representation"],
                p["output"],
                n_hidden=len(backbone.hidden),
                rep_layers=None if rep_layers is None else tuple(rep_layers),
            )
        return ModelSpec(
            backbone=backbone,
            variant=variant,
            task=self.data["task"],
            embedding=embedding,
            placements=placements,
            h_mod=m["h_mod"],
        )

    def build_train_config(self) -> TrainConfig:
        t = self.train
        return TrainConfig(
            batch_size=t["batch_size"],
            max_epochs=t["max_epochs"],
            patience=t["patience"],
            adamw=AdamWConfig(lr=t["lr"], weight_decay=t["weight_decay"]),
            seed=t["seed"],
            shuffle=t["shuffle"],
            min_improvement=t["min_improvement"],
        )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"{path}: config file not found") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from None
    try:
        return parse_config(doc, source=str(path))
    except ConfigError as e:
        raise ConfigError(f"{path}: {e}") from None


def parse_config(doc: dict, source: str = "<memory>") -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a JSON object")
    _check_keys(doc, {"data", "model", "train"}, "config")
    data = _parse_data(doc.get("data", {}))
    model = _parse_model(doc.get("model", {}))
    train = _parse_train(doc.get("train", {}))
    return RunConfig(data=data, model=model, train=train, source=source)


def _parse_data(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("data: must be an object")
    _check_keys(
        section,
        {"path", "generator", "label_col", "time_col", "categorical_cols", "task", "split"},
        "data",
    )
    path = _get(section, "path", None, "data", str)
    generator = section.get("generator")
    if (path is None) == (generator is None):
        raise ConfigError("data: exactly one of 'path' or 'generator' is required")
    if generator is not None:
        if not isinstance(generator, dict):
            raise ConfigError("data.generator: must be an object")
        _check_keys(
            generator, {"kind", "n", "seed", "segments", "radius", "noise"}, "data.generator"
        )
        generator = {
            "kind": _get(generator, "kind", "concept", "data.generator", str),
            "n": _get(generator, "n", 10000, "data.generator", int),
            "seed": _get(generator, "seed", 0, "data.generator", int),
            "segments": _get(generator, "segments", 5, "data.generator", int),
            "radius": float(_get(generator, "radius", 2.0, "data.generator", (int, float))),
            "noise": float(_get(generator, "noise", 0.5, "data.generator", (int, float))),
        }
    split = section.get("split", {})
    if not isinstance(split, dict):
        raise ConfigError("data.split: must be an object")
    _check_keys(split, {"kind", "ratios", "seed"}, "data.split")
    kind = _get(split, "kind", "temporal", "data.split", str)
    if kind not in ("temporal", "random"):
        raise ConfigError(f"data.split.kind: must be 'temporal' or 'random', got {kind!r}")
    ratios = _get(split, "ratios", [0.7, 0.15, 0.15], "data.split", list)
    task = _get(section, "task", "binary", "data", str)
    if task not in ("binary", "regression"):
        raise ConfigError(f"data.task: must be 'binary' or 'regression', got {task!r}")
    return {
        "path": path,
        "generator": generator,
        "label_col": _get(section, "label_col", "y", "data", str),
        "time_col": _get(section, "time_col", "t", "data", str),
        "categorical_cols": _get(section, "categorical_cols", [], "data", list),
        "task": task,
        "split": {
            "kind": kind,
            "ratios": [float(r) for r in ratios],
            "seed": _get(split, "seed", 0, "data.split", int),
        },
    }


def _parse_model(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("model: must be an object")
    _check_keys(
        section, {"variant", "hidden", "d_embedding", "placements", "h_mod"}, "model"
    )
    variant = _get(section, "variant", "static", "model", str)
    if variant not in ("static", "embedding", "modulated"):
        raise ConfigError(f"model.variant: unknown variant {variant!r}")
    placements = section.get("placements", {})
    if not isinstance(placements, dict):
        raise ConfigError("model.placements: must be an object")
    _check_keys(
        placements,
        {"input", "representation", "output", "representation_layers"},
        "model.placements",
    )
    parsed_placements = {
        "input": bool(_get(placements, "input", False, "model.placements", bool)),
        "representation": bool(
            _get(placements, "representation", False, "model.placements", bool)
        ),
        "output": bool(_get(placements, "output", False, "model.placements", bool)),
        "representation_layers": _get(
            placements, "representation_layers", None, "model.placements", list
        ),
    }
    if variant != "modulated" and any(
        parsed_placements[k] for k in ("input", "representation", "output")
    ):
        raise ConfigError(f"model.placements: placements require variant 'modulated'")
    return {
        "variant": variant,
        "hidden": _get(section, "hidden", [256, 256], "model", list),
        "d_embedding": _get(section, "d_embedding", 128, "model", int),
        "placements": parsed_placements,
        "h_mod": _get(section, "h_mod", 64, "model", int),
    }


def _parse_train(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("train: must be an object")
    _check_keys(
        section,
        {
            "batch_size",
            "lr",
            "weight_decay",
            "max_epochs",
            "patience",
            "seed",
            "shuffle",
            "min_improvement",
        },
        "train",
    )
    return {
        "batch_size": _get(section, "batch_size", 1024, "train", int),
        "lr": float(_get(section, "lr", 1e-3, "train", (int, float))),
        "weight_decay": float(_get(section, "weight_decay", 0.0, "train", (int, float))),
        "max_epochs": _get(section, "max_epochs", 1000, "train", int),
        "patience": _get(section, "patience", 16, "train", int),
        "seed": _get(section, "seed", 0, "train", int),
        "shuffle": bool(_get(section, "shuffle", True, "train", bool)),
        "min_improvement": float(
            _get(section, "min_improvement", 1e-4, "train", (int, float))
        ),
    }
