"""Command-line front end.

Subcommands: generate, train, ablate, pilot, stats.  Exit codes: 0 on
success, 1 on runtime or I/O failure (including config validation), 2 on
argument errors.  All randomness in a run derives from the seeds visible
in the arguments or config file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config
from .data import (
    SchemaError,
    ShiftGeneratorSpec,
    generate,
    load_csv,
    save_csv,
    temporal_stats,
    write_stats_csv,
)
from .harness import ablate_placements, pilot, write_ablation_csv
from .train import TrainConfig, train

KIND_FLAGS = {
    "concept-shift": "concept",
    "covariate-shift": "covariate",
    "label-shift": "label",
    "no-shift": "none",
}


def _cmd_generate(args) -> int:
    spec = ShiftGeneratorSpec(
        kind=KIND_FLAGS[args.kind],
        n=args.n,
        seed=args.seed,
        segments=args.segments,
        radius=args.radius,
        noise=args.noise,
    )
    ds = generate(spec)
    save_csv(ds, args.out)
    print(f"wrote {ds.n} rows to {args.out}")
    return 0


def _cmd_train(args) -> int:
    cfg = load_config(args.config)
    ds = cfg.build_dataset()
    splits = cfg.build_splits(ds)
    spec = cfg.build_model_spec(ds)
    train_cfg = cfg.build_train_config()
    model, result = train(spec, ds, splits, train_cfg)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save(out_dir / "model.json")
    with open(out_dir / "result.json", "w", encoding="utf-8") as f:
        json.dump(result.to_json_dict(), f, sort_keys=True, indent=1)
        f.write("\n")

    metric = "auc" if spec.task == "binary" else "rmse"
    value = result.test_metrics[metric]
    print(f"variant={spec.variant} metric={metric}:{value!r} best_epoch={result.best_epoch}")
    return 0


def _cmd_ablate(args) -> int:
    cfg = load_config(args.config)
    ds = cfg.build_dataset()
    splits = cfg.build_splits(ds)
    spec = cfg.build_model_spec(ds)
    train_cfg = cfg.build_train_config()
    seeds = tuple(int(s) for s in args.seeds.split(","))
    rows = ablate_placements(ds, splits, spec, train_cfg, seeds)
    metric = "auc" if spec.task == "binary" else "rmse"
    write_ablation_csv(rows, args.out, metric)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_pilot(args) -> int:
    train_config = None
    if args.max_epochs is not None:
        train_config = TrainConfig(max_epochs=args.max_epochs)
    seeds = tuple(int(s) for s in args.seeds.split(","))
    pilot(
        args.out_dir,
        n=args.n,
        seeds=seeds,
        data_seed=args.data_seed,
        train_config=train_config,
        svg=args.svg,
    )
    print(f"pilot artifacts written to {args.out_dir}")
    return 0


def _cmd_stats(args) -> int:
    ds = load_csv(args.data, label_col=args.label_col, time_col=args.time_col)
    rows = temporal_stats(ds, args.windows)
    write_stats_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttm",
        description="Feature-aware temporal modulation experiments for tabular data",
    )
    parser.add_argument("--version", action="version", version=f"ttm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic shifted dataset as CSV")
    g.add_argument("--kind", required=True, choices=sorted(KIND_FLAGS))
    g.add_argument("--n", type=int, default=10000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--segments", type=int, default=5)
    g.add_argument("--radius", type=float, default=2.0)
    g.add_argument("--noise", type=float, default=0.5)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    t = sub.add_parser("train", help="train one model from a JSON config")
    t.add_argument("--config", required=True)
    t.add_argument("--out-dir", required=True)
    t.set_defaults(func=_cmd_train)

    a = sub.add_parser("ablate", help="train all 8 placement subsets")
    a.add_argument("--config", required=True)
    a.add_argument("--seeds", default="0", help="comma-separated seed list")
    a.add_argument("--out", required=True)
    a.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("pilot", help="run the synthetic-shift pilot study")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--seeds", default="0,1,2", help="comma-separated seed list")
    p.add_argument("--data-seed", type=int, default=0)
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=_cmd_pilot)

    s = sub.add_parser("stats", help="per-window feature statistics of a CSV")
    s.add_argument("--data", required=True)
    s.add_argument("--windows", type=int, default=12)
    s.add_argument("--label-col", default="y")
    s.add_argument("--time-col", default="t")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaError, OSError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
