"""Feature-aware temporal modulation for tabular learning under temporal
distribution shift.

The library provides a small float64 neural-network core with hand-written
backward passes, a numerically stable Yeo-Johnson transform, Fourier/trend
temporal embeddings, time-conditioned feature modulation, synthetic
shift generators and a reproducible training/ablation/pilot harness.
"""

__version__ = "0.1.0"

from .data import (
    Dataset,
    ShiftGeneratorSpec,
    SplitAssignment,
    Standardizer,
    fit_standardizer,
    generate,
    load_csv,
    random_split,
    save_csv,
    temporal_split,
    temporal_stats,
)
from .gradcheck import finite_diff_check
from .harness import (
    AblationRow,
    ablate_placements,
    decision_grid,
    pilot,
    placements_for,
    sweep_embedding_dim,
)
from .metrics import accuracy, auc, auc_pairwise, rmse
from .models import BackboneSpec, Model, ModelSpec, apply_placements
from .modulation import (
    ModulationParams,
    Modulator,
    Placement,
    modulate,
    modulate_backward,
    modulator_forward,
)
from .nn import (
    LinearLayer,
    Parameter,
    bce_with_logits,
    linear_backward,
    linear_forward,
    mse_loss,
    relu_backward,
    relu_forward,
)
from .optim import AdamW, AdamWConfig, AdamWState, adamw_step
from .power import yj_batch, yj_dlambda, yj_dx, yj_forward
from .rng import Stream
from .temporal import (
    EmbeddingConfig,
    PeriodSpec,
    TemporalEmbedding,
    TrendNormalizer,
    default_periods,
    raw_features,
)
from .train import RunResult, TrainConfig, TrainingDiverged, train

__all__ = [
    "AblationRow",
    "AdamW",
    "AdamWConfig",
    "AdamWState",
    "BackboneSpec",
    "Dataset",
    "EmbeddingConfig",
    "LinearLayer",
    "Model",
    "ModelSpec",
    "ModulationParams",
    "Modulator",
    "Parameter",
    "PeriodSpec",
    "Placement",
    "RunResult",
    "ShiftGeneratorSpec",
    "SplitAssignment",
    "Standardizer",
    "Stream",
    "TemporalEmbedding",
    "TrainConfig",
    "TrainingDiverged",
    "TrendNormalizer",
    "ablate_placements",
    "accuracy",
    "adamw_step",
    "apply_placements",
    "auc",
    "auc_pairwise",
    "bce_with_logits",
    "decision_grid",
    "default_periods",
    "finite_diff_check",
    "fit_standardizer",
    "generate",
    "linear_backward",
    "linear_forward",
    "load_csv",
    "modulate",
    "modulate_backward",
    "modulator_forward",
    "mse_loss",
    "pilot",
    "placements_for",
    "random_split",
    "raw_features",
    "relu_backward",
    "relu_forward",
    "rmse",
    "save_csv",
    "sweep_embedding_dim",
    "temporal_split",
    "temporal_stats",
    "train",
    "yj_batch",
    "yj_dlambda",
    "yj_dx",
    "yj_forward",
]
