"""Static vs input-modulated MLP on the rotating concept-shift task.

A reduced-size version of the pilot: the static model cannot track the
rotating class geometry, while the modulated model conditions its input
transform on time and keeps separating the classes on future data.
Takes a minute or two on a laptop core.
"""

import numpy as np

from ttm import (
    BackboneSpec,
    EmbeddingConfig,
    ModelSpec,
    Placement,
    ShiftGeneratorSpec,
    TrainConfig,
    generate,
    temporal_split,
    train,
)

ds = generate(ShiftGeneratorSpec(kind="concept", n=3000, seed=0))
splits = temporal_split(ds)
backbone = BackboneSpec(input_width=2, hidden=(32, 32))

static_spec = ModelSpec(backbone=backbone, variant="static")
modulated_spec = ModelSpec(
    backbone=backbone,
    variant="modulated",
    embedding=EmbeddingConfig(d_embedding=32),
    placements=(Placement.input(),),
)

config = TrainConfig(batch_size=512, max_epochs=120, patience=16, seed=0)

for name, spec in (("static", static_spec), ("modulated", modulated_spec)):
    model, result = train(spec, ds, splits, config)
    epochs = len(result.history["train_loss"])
    print(
        f"{name:9s}: {epochs:3d} epochs, best @{result.best_epoch:3d}, "
        f"test acc {result.test_metrics['accuracy']:.3f}, "
        f"test auc {result.test_metrics['auc']:.3f}"
    )

print("\nthe static model is not merely at chance on the future arc: the")
print("same locations carried the opposite label during training, so its")
print("accuracy collapses below 0.5 while the modulated model keeps tracking.")
print("(the full-scale pilot -- n=10000, default widths -- separates further;")
print("run `ttm pilot --out-dir pilot/` for the complete artifact set)")
