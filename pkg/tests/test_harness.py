"""Ablation grid, embedding sweep, and pilot artifact structure."""

import json

import numpy as np
import pytest

from ttm.data import ShiftGeneratorSpec, generate, temporal_split
from ttm.harness import (
    PLACEMENT_GRID,
    ablate_placements,
    decision_grid,
    pilot,
    placements_for,
    sweep_embedding_dim,
    write_ablation_csv,
)
from ttm.models import BackboneSpec, Model, ModelSpec
from ttm.modulation import Placement
from ttm.temporal import EmbeddingConfig, PeriodSpec
from ttm.train import TrainConfig, train


def tiny_embedding():
    return EmbeddingConfig(
        periods=(PeriodSpec.named("year", 4),), trend=True, d_embedding=8
    )


def tiny_setup(n=240, kind="none"):
    ds = generate(ShiftGeneratorSpec(kind=kind, n=n, seed=0))
    splits = temporal_split(ds)
    spec = ModelSpec(
        backbone=BackboneSpec(input_width=2, hidden=(8,)),
        variant="modulated",
        task="binary",
        embedding=tiny_embedding(),
        placements=(),
        h_mod=8,
    )
    cfg = TrainConfig(batch_size=64, max_epochs=3, patience=3, seed=0)
    return ds, splits, spec, cfg


class TestPlacementsFor:
    def test_rep_flag_covers_all_hidden_layers(self):
        ps = placements_for(True, True, True, n_hidden=2)
        assert ps == (
            Placement.input(),
            Placement.representation(0),
            Placement.representation(1),
            Placement.output(),
        )

    def test_explicit_rep_layers(self):
        ps = placements_for(False, True, False, n_hidden=3, rep_layers=(2,))
        assert ps == (Placement.representation(2),)

    def test_grid_has_eight_configs(self):
        assert len(PLACEMENT_GRID) == 8
        assert PLACEMENT_GRID[0] == (False, False, False)
        assert PLACEMENT_GRID[-1] == (True, True, True)


class TestAblation:
    @pytest.fixture(scope="class")
    def rows(self):
        ds, splits, spec, cfg = tiny_setup()
        return ablate_placements(ds, splits, spec, cfg, seeds=(0, 1)), ds, splits, spec, cfg

    def test_row_counts(self, rows):
        all_rows = rows[0]
        per_seed = [r for r in all_rows if r.seed is not None]
        agg = [r for r in all_rows if r.seed is None]
        assert len(per_seed) == 16  # 8 per seed
        assert len(agg) == 8

    def test_all_off_row_matches_static_run_bitwise(self, rows):
        all_rows, ds, splits, spec, cfg = rows
        static_spec = ModelSpec(
            backbone=spec.backbone, variant="static", task="binary"
        )
        _, static_run = train(static_spec, ds, splits, cfg)
        first = all_rows[0]
        assert first.seed == 0 and not (first.use_input or first.use_rep or first.use_output)
        assert first.metrics == static_run.test_metrics
        assert first.improvement_pct == 0.0

    def test_aggregate_is_mean_over_seeds(self, rows):
        all_rows = rows[0]
        per_seed = [r for r in all_rows if r.seed is not None]
        agg = [r for r in all_rows if r.seed is None]
        for ci in range(8):
            vals = [per_seed[si * 8 + ci].metrics["auc"] for si in range(2)]
            assert agg[ci].metrics["auc"] == pytest.approx(np.mean(vals), rel=1e-12)

    def test_aggregate_ranks_are_permutation(self, rows):
        agg = [r for r in rows[0] if r.seed is None]
        assert sorted(r.rank for r in agg) == [float(i) for i in range(1, 9)]

    def test_csv_format(self, rows, tmp_path):
        path = tmp_path / "ablation.csv"
        write_ablation_csv(rows[0], path, "auc")
        lines = path.read_text().splitlines()
        assert lines[0] == "in,rep,out,metric,improvement_pct"
        assert len(lines) == 1 + 24
        first = lines[1].split(",")
        assert first[:3] == ["0", "0", "0"]

    def test_needs_a_seed(self):
        ds, splits, spec, cfg = tiny_setup()
        with pytest.raises(ValueError):
            ablate_placements(ds, splits, spec, cfg, seeds=())


class TestSweep:
    def test_grid_shape(self):
        ds, splits, spec, cfg = tiny_setup()
        rows = sweep_embedding_dim(ds, splits, spec, cfg, dims=(4, 8))
        assert len(rows) == 4  # 2 variants x 2 dims
        assert {r["variant"] for r in rows} == {"embedding", "modulated"}
        assert {r["d_embedding"] for r in rows} == {4, 8}

    def test_dim_zero_embedding_reduces_to_static(self):
        ds, splits, spec, cfg = tiny_setup()
        rows = sweep_embedding_dim(
            ds, splits, spec, cfg, dims=(0,), variants=("embedding",)
        )
        static_spec = ModelSpec(backbone=spec.backbone, variant="static", task="binary")
        _, static_run = train(static_spec, ds, splits, cfg)
        assert rows[0]["auc"] == static_run.test_metrics["auc"]

    def test_dim_zero_modulated_rejected(self):
        ds, splits, spec, cfg = tiny_setup()
        with pytest.raises(ValueError):
            sweep_embedding_dim(ds, splits, spec, cfg, dims=(0,), variants=("modulated",))

    def test_deterministic(self):
        ds, splits, spec, cfg = tiny_setup()
        a = sweep_embedding_dim(ds, splits, spec, cfg, dims=(4,), variants=("embedding",))
        b = sweep_embedding_dim(ds, splits, spec, cfg, dims=(4,), variants=("embedding",))
        assert a == b


class TestDecisionGrid:
    def test_static_grid_time_invariant(self):
        spec = ModelSpec(
            backbone=BackboneSpec(input_width=2, hidden=(4,)), variant="static"
        )
        model = Model.init(spec, seed=0)
        a = decision_grid(model, 0.0, res=11)
        b = decision_grid(model, 1e9, res=11)
        assert np.array_equal(a, b)
        assert a.shape == (11, 11)
        assert np.all((a >= 0) & (a <= 1))


class TestPilot:
    @pytest.fixture(scope="class")
    def run(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("pilot")
        cfg = TrainConfig(batch_size=64, max_epochs=2, patience=2)
        summary = pilot(
            out,
            kinds=("none",),
            n=240,
            seeds=(0,),
            segments=3,
            train_config=cfg,
            svg=True,
        )
        return out, summary

    def test_artifact_tree(self, run):
        out, _ = run
        kind = out / "none"
        assert (kind / "grids").is_dir()
        assert (kind / "hist" / "features.csv").is_file()
        assert (kind / "metrics" / "metrics.json").is_file()

    def test_grid_files_per_segment_and_model(self, run):
        out, _ = run
        grids = sorted(p.name for p in (out / "none" / "grids").glob("*.csv"))
        assert grids == [
            "modulated_seg0.csv",
            "modulated_seg1.csv",
            "modulated_seg2.csv",
            "static_seg0.csv",
            "static_seg1.csv",
            "static_seg2.csv",
        ]

    def test_grid_row_count(self, run):
        out, _ = run
        lines = (out / "none" / "grids" / "static_seg0.csv").read_text().splitlines()
        assert lines[0] == "x0,x1,p"
        assert len(lines) == 1 + 201 * 201

    def test_static_grids_identical_across_segments(self, run):
        out, _ = run
        a = (out / "none" / "grids" / "static_seg0.csv").read_bytes()
        b = (out / "none" / "grids" / "static_seg2.csv").read_bytes()
        assert a == b

    def test_metrics_json_structure(self, run):
        out, summary = run
        doc = json.loads((out / "none" / "metrics" / "metrics.json").read_text())
        assert doc["kind"] == "none"
        for model in ("static", "modulated"):
            assert "accuracy" in doc[model] and "mean" in doc[model]["accuracy"]
        assert summary["none"]["n"] == 240

    def test_histogram_stages(self, run):
        out, _ = run
        lines = (out / "none" / "hist" / "features.csv").read_text().splitlines()
        assert lines[0] == "segment,feature,stage,bin_lo,bin_hi,count"
        stages = {line.split(",")[2] for line in lines[1:]}
        assert stages == {"pre", "post"}

    def test_svg_written(self, run):
        out, _ = run
        svgs = list((out / "none" / "grids").glob("*.svg"))
        assert len(svgs) == 6
        head = svgs[0].read_text()[:200]
        assert head.startswith("<svg")
