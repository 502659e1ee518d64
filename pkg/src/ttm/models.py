"""Model zoo: one MLP backbone under three temporal regimes.

* static      f(x)            ignores timestamps entirely
* embedding   f(x, psi(t))    concatenates the temporal embedding to x
* modulated   f(mod(x, t))    applies time-conditioned modulation at the
                              configured placements (input, hidden
                              pre-activations, output logits)

All variants share the same hand-written forward/backward machinery; a
freshly initialized modulated model is numerically identical to the static
one with the same backbone weights because modulator heads start at zero.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field

import numpy as np

from .modulation import (
    ModulateCache,
    ModulationParams,
    Modulator,
    ModulatorCache,
    Placement,
    modulate,
    modulate_backward,
)
from .nn import (
    InputError,
    LinearLayer,
    Parameter,
    ShapeError,
    bce_with_logits,
    linear_backward,
    linear_forward,
    mse_loss,
    relu_backward,
    relu_forward,
    sigmoid,
)
from .rng import Stream
from .temporal import (
    EmbeddingConfig,
    PeriodSpec,
    TemporalEmbedding,
    TrendNormalizer,
    spectral_projection,
)

VARIANTS = ("static", "embedding", "modulated")
TASKS = ("binary", "regression")

_PLACEMENT_ORDER = {"input": 0, "representation": 1, "output": 2}


def placement_sort_key(p: Placement):
    return (_PLACEMENT_ORDER[p.kind], p.layer)


@dataclass(frozen=True)
class BackboneSpec:
    input_width: int
    hidden: tuple[int, ...] = (256, 256)
    output_width: int = 1

    def __post_init__(self):
        if self.input_width < 1 or self.output_width < 1:
            raise ValueError("backbone widths must be positive")
        if len(self.hidden) < 1 or any(h < 1 for h in self.hidden):
            raise ValueError("backbone needs at least one positive hidden width")


@dataclass(frozen=True)
class ModelSpec:
    backbone: BackboneSpec
    variant: str = "static"
    task: str = "binary"
    embedding: EmbeddingConfig | None = None
    placements: tuple[Placement, ...] = ()
    h_mod: int = 64

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.variant == "static" and self.placements:
            raise ValueError("static models take no placements")
        if self.variant in ("embedding", "modulated") and self.embedding is None:
            raise ValueError(f"{self.variant} variant requires an embedding config")
        if self.variant == "modulated" and self.placements:
            if not self.embedding.enabled:
                raise ValueError("modulation requires d_embedding >= 1")
            seen = set()
            for p in self.placements:
                if p in seen:
                    raise ValueError(f"duplicate placement {p}")
                seen.add(p)
                if p.kind == "representation" and p.layer >= len(self.backbone.hidden):
                    raise ValueError(
                        f"representation placement index {p.layer} out of range "
                        f"for {len(self.backbone.hidden)} hidden layers"
                    )
        if self.h_mod < 1:
            raise ValueError("h_mod must be positive")
        object.__setattr__(
            self, "placements", tuple(sorted(self.placements, key=placement_sort_key))
        )

    def placement_width(self, p: Placement) -> int:
        if p.kind == "input":
            return self.backbone.input_width
        if p.kind == "representation":
            return self.backbone.hidden[p.layer]
        return self.backbone.output_width

    def uses_embedding(self) -> bool:
        if self.embedding is None or not self.embedding.enabled:
            return False
        if self.variant == "embedding":
            return True
        return self.variant == "modulated" and bool(self.placements)


@dataclass
class ForwardCache:
    x: np.ndarray
    layer_inputs: list[np.ndarray] = field(default_factory=list)
    pre_acts: list[np.ndarray] = field(default_factory=list)
    psi: np.ndarray | None = None
    params: dict[Placement, ModulationParams] = field(default_factory=dict)
    mod_caches: dict[Placement, ModulateCache] = field(default_factory=dict)
    modulator_caches: dict[Placement, ModulatorCache] = field(default_factory=dict)


class Model:
    """A trainable model plus its training-split normalizer state."""

    def __init__(
        self,
        spec: ModelSpec,
        layers: list[LinearLayer],
        embedding: TemporalEmbedding | None,
        modulators: dict[Placement, Modulator],
    ):
        self.spec = spec
        self.layers = layers
        self.embedding = embedding
        self.modulators = modulators
        self.x_mean: np.ndarray | None = None
        self.x_std: np.ndarray | None = None
        self.y_mean: float | None = None
        self.y_std: float | None = None

    # ------------------------------------------------------------------ build

    @classmethod
    def init(
        cls,
        spec: ModelSpec,
        seed: int,
        trend_normalizer: TrendNormalizer | None = None,
    ) -> "Model":
        """Seeded construction.

        Each component draws from its own named stream, so e.g. the backbone
        init for a given seed is identical whether or not modulators exist.
        """
        in_width = spec.backbone.input_width
        if spec.variant == "embedding" and spec.embedding.enabled:
            in_width += spec.embedding.d_embedding
        widths = [in_width, *spec.backbone.hidden, spec.backbone.output_width]
        layers = [
            LinearLayer.seeded(widths[i], widths[i + 1], Stream(seed, "backbone", i))
            for i in range(len(widths) - 1)
        ]
        embedding = None
        if spec.uses_embedding():
            proj = spectral_projection(spec.embedding, Stream(seed, "projection"))
            embedding = TemporalEmbedding(spec.embedding, trend_normalizer, proj)
        modulators = {}
        if spec.variant == "modulated":
            for p in spec.placements:
                modulators[p] = Modulator.seeded(
                    spec.embedding.d_embedding,
                    spec.h_mod,
                    spec.placement_width(p),
                    Stream(seed, "modulator", p.label()),
                )
        return cls(spec, layers, embedding, modulators)

    def set_trend_normalizer(self, normalizer: TrendNormalizer) -> None:
        if self.embedding is not None:
            self.embedding.normalizer = normalizer

    # ------------------------------------------------------------- parameters

    def named_parameters(self) -> list[tuple[str, Parameter]]:
        out = []
        for i, layer in enumerate(self.layers):
            out.append((f"backbone.{i}.weight", layer.weight))
            out.append((f"backbone.{i}.bias", layer.bias))
        if self.embedding is not None:
            out.append(("projection.weight", self.embedding.projection.weight))
            out.append(("projection.bias", self.embedding.projection.bias))
        for p in sorted(self.modulators, key=placement_sort_key):
            mod = self.modulators[p]
            tag = f"modulator.{p.label()}"
            out.append((f"{tag}.hidden.weight", mod.hidden.weight))
            out.append((f"{tag}.hidden.bias", mod.hidden.bias))
            out.append((f"{tag}.head.weight", mod.head.weight))
            out.append((f"{tag}.head.bias", mod.head.bias))
        return out

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def state(self) -> list[np.ndarray]:
        return [p.value.copy() for p in self.parameters()]

    def load_state(self, state: list[np.ndarray]) -> None:
        for p, v in zip(self.parameters(), state):
            p.value[...] = v

    # ---------------------------------------------------------- normalization

    def set_x_standardizer(self, mean: np.ndarray, std: np.ndarray) -> None:
        self.x_mean = np.asarray(mean, dtype=np.float64)
        self.x_std = np.asarray(std, dtype=np.float64)

    def set_y_standardizer(self, mean: float, std: float) -> None:
        self.y_mean = float(mean)
        self.y_std = float(std)

    def standardize_x(self, x: np.ndarray) -> np.ndarray:
        if self.x_mean is None:
            return x
        return (x - self.x_mean) / self.x_std

    # ---------------------------------------------------------------- forward

    def _require_times(self, t) -> np.ndarray:
        if t is None:
            raise InputError(f"{self.spec.variant} model requires timestamps")
        return np.asarray(t, dtype=np.float64).reshape(-1)

    def forward(self, x: np.ndarray, t=None, raw_time_features=None):
        """Logits for standardized input x; returns (logits, cache).

        ``raw_time_features`` optionally bypasses the raw featurizer with a
        precomputed (n, raw_width) block (it depends only on t).
        """
        if x.ndim != 2 or x.shape[1] != self.spec.backbone.input_width:
            raise ShapeError(
                f"forward: x {x.shape} does not match input width "
                f"{self.spec.backbone.input_width}"
            )
        cache = ForwardCache(x=x)
        spec = self.spec
        h = x

        if spec.variant == "embedding":
            if spec.embedding.enabled:
                tv = self._require_times(t)
                if tv.shape[0] != x.shape[0]:
                    raise ShapeError("forward: timestamp count != batch size")
                cache.psi = self.embedding.embed(tv, raw=raw_time_features)
                h = np.concatenate([x, cache.psi], axis=1)
        elif spec.variant == "modulated" and self.modulators:
            tv = self._require_times(t)
            if tv.shape[0] != x.shape[0]:
                raise ShapeError("forward: timestamp count != batch size")
            cache.psi = self.embedding.embed(tv, raw=raw_time_features)
            for p in sorted(self.modulators, key=placement_sort_key):
                prm, mc = self.modulators[p].forward(cache.psi)
                cache.params[p] = prm
                cache.modulator_caches[p] = mc
            inp = Placement.input()
            if inp in cache.params:
                h, cache.mod_caches[inp] = modulate(h, cache.params[inp])

        rep_params = cache.params
        for i, layer in enumerate(self.layers[:-1]):
            cache.layer_inputs.append(h)
            z = linear_forward(layer, h)
            rp = Placement.representation(i)
            if rp in rep_params:
                z, cache.mod_caches[rp] = modulate(z, rep_params[rp])
            cache.pre_acts.append(z)
            h = relu_forward(z)

        cache.layer_inputs.append(h)
        logits = linear_forward(self.layers[-1], h)
        outp = Placement.output()
        if outp in rep_params:
            logits, cache.mod_caches[outp] = modulate(logits, rep_params[outp])
        return logits, cache

    def backward(self, cache: ForwardCache, d_logits: np.ndarray) -> np.ndarray:
        """Accumulate gradients for all trainable parameters; returns d_x."""
        spec = self.spec
        mod_grads: dict[Placement, tuple] = {}

        d = d_logits
        outp = Placement.output()
        if outp in cache.mod_caches:
            d, dg, db, dl = modulate_backward(cache.mod_caches[outp], d)
            mod_grads[outp] = (dg, db, dl)

        d = linear_backward(self.layers[-1], cache.layer_inputs[-1], d)
        for i in range(len(self.layers) - 2, -1, -1):
            d = relu_backward(cache.pre_acts[i], d)
            rp = Placement.representation(i)
            if rp in cache.mod_caches:
                d, dg, db, dl = modulate_backward(cache.mod_caches[rp], d)
                mod_grads[rp] = (dg, db, dl)
            d = linear_backward(self.layers[i], cache.layer_inputs[i], d)

        inp = Placement.input()
        if inp in cache.mod_caches:
            d, dg, db, dl = modulate_backward(cache.mod_caches[inp], d)
            mod_grads[inp] = (dg, db, dl)

        if spec.variant == "embedding" and cache.psi is not None:
            m = spec.backbone.input_width
            d_x, d_psi = d[:, :m], d[:, m:]
            self.embedding.embed_backward(d_psi)
            return d_x

        if mod_grads:
            d_psi = np.zeros_like(cache.psi)
            for p in sorted(mod_grads, key=placement_sort_key):
                dg, db, dl = mod_grads[p]
                d_psi += self.modulators[p].backward(cache.modulator_caches[p], dg, db, dl)
            self.embedding.embed_backward(d_psi)
        return d

    # ------------------------------------------------------------------- loss

    def loss_and_grad(self, x: np.ndarray, y: np.ndarray, t=None, raw_time_features=None) -> float:
        """Task loss on a raw batch; accumulates grads into all parameters."""
        if x.shape[0] == 0:
            raise InputError("loss_and_grad: empty batch")
        xs = self.standardize_x(x)
        logits, cache = self.forward(xs, t, raw_time_features=raw_time_features)
        if self.spec.task == "binary":
            loss, d_logits = bce_with_logits(logits, y)
        else:
            target = np.asarray(y, dtype=np.float64).reshape(-1, 1)
            if self.y_mean is not None:
                target = (target - self.y_mean) / self.y_std
            loss, d_logits = mse_loss(logits, target)
        self.backward(cache, d_logits)
        return loss

    def loss_only(self, x: np.ndarray, y: np.ndarray, t=None, raw_time_features=None) -> float:
        """Task loss without touching any gradient (for finite differences)."""
        if x.shape[0] == 0:
            raise InputError("loss_only: empty batch")
        xs = self.standardize_x(x)
        logits, _ = self.forward(xs, t, raw_time_features=raw_time_features)
        if self.spec.task == "binary":
            loss, _ = bce_with_logits(logits, y)
        else:
            target = np.asarray(y, dtype=np.float64).reshape(-1, 1)
            if self.y_mean is not None:
                target = (target - self.y_mean) / self.y_std
            loss, _ = mse_loss(logits, target)
        return loss

    # -------------------------------------------------------------- inference

    def logits(self, x: np.ndarray, t=None, raw_time_features=None) -> np.ndarray:
        out, _ = self.forward(self.standardize_x(x), t, raw_time_features=raw_time_features)
        return out

    def predict_proba(self, x: np.ndarray, t=None) -> np.ndarray:
        if self.spec.task != "binary":
            raise InputError("predict_proba is for binary classification models")
        return sigmoid(self.logits(x, t).reshape(-1))

    def predict(self, x: np.ndarray, t=None) -> np.ndarray:
        if self.spec.task == "binary":
            return (self.predict_proba(x, t) > 0.5).astype(np.float64)
        out = self.logits(x, t).reshape(-1)
        if self.y_mean is not None:
            out = out * self.y_std + self.y_mean
        return out

    # ---------------------------------------------------------- serialization

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, sort_keys=True, indent=1)
            f.write("\n")

    @classmethod
    def load(cls, path) -> "Model":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def to_dict(self) -> dict:
        spec = self.spec
        emb = None
        if spec.embedding is not None:
            emb = {
                "periods": [{"name": p.name, "order": p.order} for p in spec.embedding.periods],
                "trend": spec.embedding.trend,
                "d_embedding": spec.embedding.d_embedding,
            }
        trend = None
        if self.embedding is not None and self.embedding.normalizer is not None:
            trend = {
                "t_min": self.embedding.normalizer.t_min,
                "t_max": self.embedding.normalizer.t_max,
            }
        params = {
            name: {
                "shape": list(p.value.shape),
                "data": base64.b64encode(
                    np.ascontiguousarray(p.value, dtype="<f8").tobytes()
                ).decode("ascii"),
            }
            for name, p in self.named_parameters()
        }
        return {
            "format": "ttm-model",
            "version": 1,
            "spec": {
                "variant": spec.variant,
                "task": spec.task,
                "backbone": {
                    "input_width": spec.backbone.input_width,
                    "hidden": list(spec.backbone.hidden),
                    "output_width": spec.backbone.output_width,
                },
                "embedding": emb,
                "placements": [p.label() for p in spec.placements],
                "h_mod": spec.h_mod,
            },
            "normalizers": {
                "x_mean": None if self.x_mean is None else self.x_mean.tolist(),
                "x_std": None if self.x_std is None else self.x_std.tolist(),
                "y_mean": self.y_mean,
                "y_std": self.y_std,
                "trend": trend,
            },
            "params": params,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Model":
        if doc.get("format") != "ttm-model" or doc.get("version") != 1:
            raise InputError("unrecognized model file format")
        s = doc["spec"]
        emb = None
        if s["embedding"] is not None:
            emb = EmbeddingConfig(
                periods=tuple(
                    PeriodSpec.named(p["name"], p["order"]) for p in s["embedding"]["periods"]
                ),
                trend=s["embedding"]["trend"],
                d_embedding=s["embedding"]["d_embedding"],
            )
        spec = ModelSpec(
            backbone=BackboneSpec(
                input_width=s["backbone"]["input_width"],
                hidden=tuple(s["backbone"]["hidden"]),
                output_width=s["backbone"]["output_width"],
            ),
            variant=s["variant"],
            task=s["task"],
            embedding=emb,
            placements=tuple(parse_placement(lbl) for lbl in s["placements"]),
            h_mod=s["h_mod"],
        )
        norm = doc["normalizers"]
        trend = None
        if norm["trend"] is not None:
            trend = TrendNormalizer(norm["trend"]["t_min"], norm["trend"]["t_max"])
        model = cls.init(spec, seed=0, trend_normalizer=trend)
        for name, p in model.named_parameters():
            entry = doc["params"][name]
            arr = np.frombuffer(
                base64.b64decode(entry["data"]), dtype="<f8"
            ).reshape(entry["shape"])
            p.value[...] = arr
        if norm["x_mean"] is not None:
            model.set_x_standardizer(np.array(norm["x_mean"]), np.array(norm["x_std"]))
        if norm["y_mean"] is not None:
            model.set_y_standardizer(norm["y_mean"], norm["y_std"])
        return model


def parse_placement(label: str) -> Placement:
    if label == "input":
        return Placement.input()
    if label == "output":
        return Placement.output()
    if label.startswith("representation"):
        return Placement.representation(int(label[len("representation"):]))
    raise ValueError(f"bad placement label {label!r}")


def apply_placements(model: Model, x: np.ndarray, t) -> np.ndarray:
    """Modulated forward pass (standardized x in, logits out)."""
    logits, _ = model.forward(x, t)
    return logits
