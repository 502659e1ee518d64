"""Experiment harnesses: placement ablation, embedding-dimension sweep, and
the synthetic-shift pilot with decision-boundary and histogram artifacts.

Independent runs may execute concurrently (capped by the TTM_THREADS
environment variable, default 1); emitted results are always ordered by
configuration, never by completion time.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .data import (
    Dataset,
    ShiftGeneratorSpec,
    SplitAssignment,
    generate,
    temporal_split,
)
from .models import BackboneSpec, Model, ModelSpec
from .modulation import Placement, modulate
from .nn import sigmoid
from .svg import svg_heatmap
from .temporal import EmbeddingConfig, default_periods, raw_features
from .train import RunResult, TrainConfig, train

PLACEMENT_GRID = [
    (False, False, False),
    (False, False, True),
    (False, True, False),
    (False, True, True),
    (True, False, False),
    (True, False, True),
    (True, True, False),
    (True, True, True),
]


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("TTM_THREADS", "1")))
    except ValueError:
        return 1


def _run_all(jobs):
    """Execute zero-arg callables, preserving submission order of results."""
    cap = _thread_cap()
    if cap == 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [f.result() for f in futures]


def placements_for(
    use_input: bool, use_rep: bool, use_output: bool, n_hidden: int,
    rep_layers: tuple[int, ...] | None = None,
) -> tuple[Placement, ...]:
    """The representation flag enables a modulator on every hidden layer
    unless explicit layer indices are given."""
    out: list[Placement] = []
    if use_input:
        out.append(Placement.input())
    if use_rep:
        layers = rep_layers if rep_layers is not None else tuple(range(n_hidden))
        out.extend(Placement.representation(i) for i in layers)
    if use_output:
        out.append(Placement.output())
    return tuple(out)


@dataclass
class AblationRow:
    seed: int | None  # None marks an aggregate (mean over seeds) row
    use_input: bool
    use_rep: bool
    use_output: bool
    metrics: dict
    improvement_pct: float
    rank: float | None = None
    wall_clock_seconds: float = 0.0


def _improvement_pct(metric: float, base: float, higher_better: bool) -> float:
    if base == 0.0:
        return 0.0
    delta = (metric - base) if higher_better else (base - metric)
    return 100.0 * delta / abs(base)


def ablate_placements(
    ds: Dataset,
    splits: SplitAssignment,
    model_spec: ModelSpec,
    config: TrainConfig,
    seeds: tuple[int, ...],
) -> list[AblationRow]:
    """Train all 8 placement subsets per seed on a shared backbone spec.

    The all-off subset is exactly the static baseline (identical init
    streams, no modulator parameters), so its run matches a static model
    trained with the same seed bit for bit.
    """
    if len(seeds) == 0:
        raise ValueError("need at least one seed")
    n_hidden = len(model_spec.backbone.hidden)

    def make_job(seed, flags):
        spec = replace(
            model_spec,
            variant="modulated",
            placements=placements_for(*flags, n_hidden=n_hidden),
        )
        cfg = replace(config, seed=seed)
        return lambda: train(spec, ds, splits, cfg)

    jobs = [make_job(seed, flags) for seed in seeds for flags in PLACEMENT_GRID]
    results = _run_all(jobs)

    metric_name = "auc" if model_spec.task == "binary" else "rmse"
    higher = model_spec.task == "binary"
    rows: list[AblationRow] = []
    for si, seed in enumerate(seeds):
        block = results[si * 8 : (si + 1) * 8]
        base = block[0][1].test_metrics[metric_name]
        for flags, (_, run) in zip(PLACEMENT_GRID, block):
            rows.append(
                AblationRow(
                    seed=seed,
                    use_input=flags[0],
                    use_rep=flags[1],
                    use_output=flags[2],
                    metrics=dict(run.test_metrics),
                    improvement_pct=_improvement_pct(
                        run.test_metrics[metric_name], base, higher
                    ),
                    wall_clock_seconds=run.wall_clock_seconds,
                )
            )

    # aggregate rows: mean over seeds per configuration, ranked by the mean metric
    agg: list[AblationRow] = []
    for ci, flags in enumerate(PLACEMENT_GRID):
        per_seed = [rows[si * 8 + ci] for si in range(len(seeds))]
        keys = per_seed[0].metrics.keys()
        mean_metrics = {k: float(np.mean([r.metrics[k] for r in per_seed])) for k in keys}
        agg.append(
            AblationRow(
                seed=None,
                use_input=flags[0],
                use_rep=flags[1],
                use_output=flags[2],
                metrics=mean_metrics,
                improvement_pct=float(np.mean([r.improvement_pct for r in per_seed])),
            )
        )
    order = sorted(
        range(8),
        key=lambda i: -agg[i].metrics[metric_name] if higher else agg[i].metrics[metric_name],
    )
    for rank, i in enumerate(order, start=1):
        agg[i].rank = float(rank)
    return rows + agg


def write_ablation_csv(rows: list[AblationRow], path, metric_name: str) -> None:
    """Fixed-header CSV: per-seed rows first, aggregate rows last."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("in,rep,out,metric,improvement_pct\n")
        for r in rows:
            f.write(
                f"{int(r.use_input)},{int(r.use_rep)},{int(r.use_output)},"
                f"{repr(r.metrics[metric_name])},{repr(r.improvement_pct)}\n"
            )


def sweep_embedding_dim(
    ds: Dataset,
    splits: SplitAssignment,
    model_spec: ModelSpec,
    config: TrainConfig,
    dims: tuple[int, ...],
    variants: tuple[str, ...] = ("embedding", "modulated"),
) -> list[dict]:
    """Metric as a function of d_embedding for the time-aware variants.

    The modulated variant uses full placement coverage (input, every hidden
    layer, output).  d_embedding = 0 is only meaningful for the embedding
    variant, where it reduces to the static model.
    """
    if len(dims) == 0:
        raise ValueError("need at least one embedding dimension")
    n_hidden = len(model_spec.backbone.hidden)

    def make_job(variant, dim):
        emb = EmbeddingConfig(
            periods=model_spec.embedding.periods if model_spec.embedding else default_periods(),
            trend=model_spec.embedding.trend if model_spec.embedding else True,
            d_embedding=dim,
        )
        placements = ()
        if variant == "modulated":
            placements = placements_for(True, True, True, n_hidden=n_hidden)
        spec = replace(model_spec, variant=variant, embedding=emb, placements=placements)
        return lambda: train(spec, ds, splits, config)

    jobs = [make_job(v, d) for v in variants for d in dims]
    results = _run_all(jobs)
    rows = []
    i = 0
    for v in variants:
        for d in dims:
            _, run = results[i]
            rows.append({"variant": v, "d_embedding": d, **run.test_metrics})
            i += 1
    return rows


# -------------------------------------------------------------------- pilot

PILOT_GRID_RES = 201
PILOT_GRID_LIM = 4.0
PILOT_HIST_BINS = 40
PILOT_HIST_RANGE = (-6.0, 6.0)


def _segment_indices(ds: Dataset, segments: int) -> list[np.ndarray]:
    order = np.lexsort((np.arange(ds.n), ds.t))
    bounds = [round(s * ds.n / segments) for s in range(segments + 1)]
    return [order[bounds[s] : bounds[s + 1]] for s in range(segments)]


def _segment_timestamps(ds: Dataset, segments: int) -> list[float]:
    """Representative timestamp per segment: the chronological median row."""
    return [float(ds.t[idx[len(idx) // 2]]) for idx in _segment_indices(ds, segments)]


def decision_grid(model: Model, t_value: float, res: int = PILOT_GRID_RES,
                  lim: float = PILOT_GRID_LIM) -> np.ndarray:
    """Predicted probability on a res x res lattice over [-lim, lim]^2.

    Returns shape (res, res): entry [i, j] is the probability at
    (x0 = grid[j], x1 = grid[i]).
    """
    axis = np.linspace(-lim, lim, res)
    xx, yy = np.meshgrid(axis, axis)
    pts = np.stack([xx.reshape(-1), yy.reshape(-1)], axis=1)
    tvec = np.full(pts.shape[0], t_value)
    raw = None
    if model.spec.uses_embedding():
        one = raw_features(np.array([t_value]), model.embedding.config, model.embedding.normalizer)
        raw = np.repeat(one, pts.shape[0], axis=0)
    xs = model.standardize_x(pts)
    logits, _ = model.forward(xs, tvec, raw_time_features=raw)
    return sigmoid(logits.reshape(-1)).reshape(res, res)


def write_grid_csv(grid: np.ndarray, path, lim: float = PILOT_GRID_LIM) -> None:
    res = grid.shape[0]
    axis = np.linspace(-lim, lim, res)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("x0,x1,p\n")
        for i in range(res):
            for j in range(res):
                f.write(f"{repr(axis[j])},{repr(axis[i])},{repr(float(grid[i, j]))}\n")


def modulated_input_features(model: Model, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Post-modulation features (input placement) for raw inputs x."""
    inp = Placement.input()
    if inp not in model.modulators:
        raise ValueError("model has no input-placement modulator")
    xs = model.standardize_x(x)
    psi = model.embedding.embed(t)
    params, _ = model.modulators[inp].forward(psi)
    out, _ = modulate(xs, params)
    return out


def _histogram_rows(ds: Dataset, model: Model, segments: int):
    """(segment, feature, stage, bin_lo, bin_hi, count) rows, pre vs post."""
    edges = np.linspace(*PILOT_HIST_RANGE, PILOT_HIST_BINS + 1)
    rows = []
    for s, idx in enumerate(_segment_indices(ds, segments)):
        pre = model.standardize_x(ds.X[idx])
        post = modulated_input_features(model, ds.X[idx], ds.t[idx])
        for stage, block in (("pre", pre), ("post", post)):
            for j, name in enumerate(ds.feature_names):
                counts, _ = np.histogram(block[:, j], bins=edges)
                for b in range(PILOT_HIST_BINS):
                    rows.append((s, name, stage, edges[b], edges[b + 1], int(counts[b])))
    return rows


def _mean_std(values: list[float]) -> dict:
    return {"mean": float(np.mean(values)), "std": float(np.std(values))}


def pilot(
    out_dir,
    kinds: tuple[str, ...] = ("concept", "covariate", "label", "none"),
    n: int = 10000,
    seeds: tuple[int, ...] = (0, 1, 2),
    data_seed: int = 0,
    segments: int = 5,
    train_config: TrainConfig | None = None,
    svg: bool = False,
) -> dict:
    """Static vs input-modulated comparison on each synthetic shift kind.

    Writes, per kind: decision-boundary grids for both models at one
    representative timestamp per segment (grids/), pre/post modulation
    feature histograms per segment (hist/), and a metrics summary
    (metrics/metrics.json).  Grids and histograms come from the first
    seed's models; metrics cover all seeds.
    """
    out_dir = Path(out_dir)
    base_config = train_config if train_config is not None else TrainConfig()
    summary = {}
    for kind in kinds:
        kind_dir = out_dir / kind
        for sub in ("grids", "hist", "metrics"):
            (kind_dir / sub).mkdir(parents=True, exist_ok=True)

        ds = generate(ShiftGeneratorSpec(kind=kind, n=n, seed=data_seed, segments=segments))
        splits = temporal_split(ds)
        backbone = BackboneSpec(input_width=ds.m)
        static_spec = ModelSpec(backbone=backbone, variant="static", task="binary")
        mod_spec = ModelSpec(
            backbone=backbone,
            variant="modulated",
            task="binary",
            embedding=EmbeddingConfig(),
            placements=(Placement.input(),),
        )

        jobs = []
        for seed in seeds:
            cfg = replace(base_config, seed=seed)
            jobs.append(lambda s=static_spec, c=cfg: train(s, ds, splits, c))
            jobs.append(lambda s=mod_spec, c=cfg: train(s, ds, splits, c))
        results = _run_all(jobs)

        models = {"static": results[0][0], "modulated": results[1][0]}
        runs: dict[str, list[RunResult]] = {"static": [], "modulated": []}
        for i in range(len(seeds)):
            runs["static"].append(results[2 * i][1])
            runs["modulated"].append(results[2 * i + 1][1])

        metrics_doc = {"kind": kind, "n": n, "segments": segments, "seeds": list(seeds)}
        for name, rs in runs.items():
            metrics_doc[name] = {
                "per_seed": [r.to_json_dict()["test_metrics"] for r in rs],
                "accuracy": _mean_std([r.test_metrics["accuracy"] for r in rs]),
                "auc": _mean_std([r.test_metrics["auc"] for r in rs]),
            }
        with open(kind_dir / "metrics" / "metrics.json", "w", encoding="utf-8") as f:
            json.dump(metrics_doc, f, sort_keys=True, indent=1)
            f.write("\n")

        for seg, t_rep in enumerate(_segment_timestamps(ds, segments)):
            for name, model in models.items():
                grid = decision_grid(model, t_rep)
                write_grid_csv(grid, kind_dir / "grids" / f"{name}_seg{seg}.csv")
                if svg:
                    svg_heatmap(grid, kind_dir / "grids" / f"{name}_seg{seg}.svg")

        with open(kind_dir / "hist" / "features.csv", "w", encoding="utf-8", newline="\n") as f:
            f.write("segment,feature,stage,bin_lo,bin_hi,count\n")
            for row in _histogram_rows(ds, models["modulated"], segments):
                s, name, stage, lo, hi, cnt = row
                f.write(f"{s},{name},{stage},{repr(float(lo))},{repr(float(hi))},{cnt}\n")

        summary[kind] = metrics_doc
    return summary
