"""Run-config parsing: defaults, strict keys, builders."""

import json

import numpy as np
import pytest

from ttm.config import ConfigError, load_config, parse_config
from ttm.modulation import Placement


def minimal():
    return {"data": {"generator": {"kind": "none", "n": 50, "seed": 0}}}


class TestParsing:
    def test_defaults_fill_in(self):
        cfg = parse_config(minimal())
        assert cfg.train["batch_size"] == 1024
        assert cfg.train["lr"] == 1e-3
        assert cfg.train["patience"] == 16
        assert cfg.model["hidden"] == [256, 256]
        assert cfg.model["d_embedding"] == 128
        assert cfg.model["h_mod"] == 64
        assert cfg.data["split"]["kind"] == "temporal"
        assert cfg.data["split"]["ratios"] == [0.7, 0.15, 0.15]

    def test_unknown_top_level_key(self):
        doc = minimal()
        doc["extra"] = {}
        with pytest.raises(ConfigError, match="extra"):
            parse_config(doc)

    def test_unknown_nested_key(self):
        doc = minimal()
        doc["train"] = {"learning_rate": 0.1}
        with pytest.raises(ConfigError, match="learning_rate"):
            parse_config(doc)

    def test_path_and_generator_mutually_exclusive(self):
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config({"data": {"path": "x.csv", "generator": {"kind": "none"}}})
        with pytest.raises(ConfigError, match="exactly one"):
            parse_config({"data": {}})

    def test_placements_require_modulated(self):
        doc = minimal()
        doc["model"] = {"variant": "static", "placements": {"input": True}}
        with pytest.raises(ConfigError, match="modulated"):
            parse_config(doc)

    def test_bad_split_kind(self):
        doc = minimal()
        doc["data"]["split"] = {"kind": "stratified"}
        with pytest.raises(ConfigError, match="temporal"):
            parse_config(doc)

    def test_missing_file_reports_path(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "missing.json")

    def test_invalid_json_reported(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{nope")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config(p)


class TestBuilders:
    def test_generator_dataset(self):
        cfg = parse_config(minimal())
        ds = cfg.build_dataset()
        assert ds.n == 50 and ds.m == 2

    def test_csv_dataset(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,b,y,t\n1,2,0,10\n3,4,1,20\n5,6,0,30\n")
        cfg = parse_config({"data": {"path": str(p)}})
        ds = cfg.build_dataset()
        assert ds.n == 3 and list(ds.feature_names) == ["a", "b"]

    def test_split_builders(self):
        cfg = parse_config(minimal())
        ds = cfg.build_dataset()
        s = cfg.build_splits(ds)
        s.check_covers(ds.n)

    def test_random_split_seeded(self):
        doc = minimal()
        doc["data"]["split"] = {"kind": "random", "seed": 3}
        cfg = parse_config(doc)
        ds = cfg.build_dataset()
        a, b = cfg.build_splits(ds), cfg.build_splits(ds)
        assert np.array_equal(a.train, b.train)

    def test_model_spec_placements(self):
        doc = minimal()
        doc["model"] = {
            "variant": "modulated",
            "hidden": [8, 8],
            "d_embedding": 8,
            "placements": {"input": True, "representation": True, "output": False},
        }
        cfg = parse_config(doc)
        spec = cfg.build_model_spec(cfg.build_dataset())
        assert spec.placements == (
            Placement.input(),
            Placement.representation(0),
            Placement.representation(1),
        )

    def test_explicit_representation_layers(self):
        doc = minimal()
        doc["model"] = {
            "variant": "modulated",
            "hidden": [8, 8],
            "d_embedding": 8,
            "placements": {"representation": True, "representation_layers": [1]},
        }
        cfg = parse_config(doc)
        spec = cfg.build_model_spec(cfg.build_dataset())
        assert spec.placements == (Placement.representation(1),)

    def test_train_config_carries_optimizer_fields(self):
        doc = minimal()
        doc["train"] = {"lr": 0.01, "weight_decay": 0.5, "min_improvement": 0.0}
        cfg = parse_config(doc).build_train_config()
        assert cfg.adamw.lr == 0.01
        assert cfg.adamw.weight_decay == 0.5
        assert cfg.min_improvement == 0.0
