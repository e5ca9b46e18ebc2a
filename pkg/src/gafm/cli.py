"""Command-line experiment runner.

Verbs: run, select-delta, sigma-sweep, multiclient, report. Options come
from a flat key=value config file and/or flags (flags win). The default
output root is $GAFM_OUT_ROOT (falling back to ./gafm_out). On failure the
process exits nonzero after printing a machine-readable error JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .baselines import MethodKind
from .data import (Dataset, load_credit, load_imdb, load_spambase,
                   synthetic_gaussian)
from .experiments import (emit_reports, run_multiclient, run_table,
                          select_delta, sigma_sweep)
from .gafm import GafmConfig

CONFIG_KEYS = ("dataset", "path", "method", "delta", "sigma", "gamma", "clip",
               "epochs", "batch", "lr_d", "lr_g", "lr_l", "seeds", "clients",
               "split", "outdir")


def read_config_file(path: str) -> dict:
    """Flat key=value lines; blank lines and #-comments ignored."""
    out: dict = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            key = key.strip()
            if key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value.strip()
    return out


def _load_dataset(name: str, path: str | None) -> Dataset:
    name = name.lower()
    if name == "synthetic":
        return synthetic_gaussian(n=2000, d=20, class_separation=4.0,
                                  positive_fraction=0.4, seed=0)
    loaders = {"spambase": load_spambase, "credit": load_credit,
               "imdb": load_imdb}
    if name not in loaders:
        raise ValueError(f"unknown dataset {name!r}")
    if not path:
        raise ValueError(f"dataset {name!r} requires --path")
    return loaders[name](path)


def _parse_seeds(text: str) -> list[int]:
    return [int(s) for s in text.replace(",", " ").split()]


def _parse_counts(text: str | None) -> list[int] | None:
    if not text:
        return None
    return [int(s) for s in text.replace("/", " ").replace(",", " ").split()]


def _methods(text: str) -> list[MethodKind]:
    return [MethodKind(m.strip().lower()) for m in text.split(",")]


def _merged(args: argparse.Namespace) -> dict:
    opts = read_config_file(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            opts[key] = flag
    return opts


def _build_cfg(opts: dict) -> GafmConfig:
    return GafmConfig(
        delta=float(opts.get("delta", 0.05)),
        sigma=float(opts.get("sigma", 0.01)),
        gamma=float(opts.get("gamma", 1.0)),
        clip=float(opts.get("clip", 0.1)),
        epochs=int(opts.get("epochs", 300)),
        batch=int(opts.get("batch", 1028)),
        lr_d=float(opts.get("lr_d", 1e-4)),
        lr_g=float(opts.get("lr_g", 1e-4)),
        lr_l=float(opts.get("lr_l", 1e-4)),
    )


def _outdir(opts: dict, default_name: str) -> str:
    root = os.environ.get("GAFM_OUT_ROOT", "gafm_out")
    return opts.get("outdir") or os.path.join(root, default_name)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--dataset", help="spambase|credit|imdb|synthetic")
    p.add_argument("--path", help="dataset file path")
    p.add_argument("--method",
                   help="comma list: gafm,vanilla,max_norm,gan_only,penalty_only")
    p.add_argument("--delta"); p.add_argument("--sigma")
    p.add_argument("--gamma"); p.add_argument("--clip")
    p.add_argument("--epochs"); p.add_argument("--batch")
    p.add_argument("--lr_d"); p.add_argument("--lr_g"); p.add_argument("--lr_l")
    p.add_argument("--seeds", help="e.g. 0,1,2")
    p.add_argument("--clients", help="number of passive parties")
    p.add_argument("--split", help="per-party feature counts, e.g. 19/19/19")
    p.add_argument("--outdir")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gafm")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in ("run", "select-delta", "sigma-sweep", "multiclient", "report"):
        _add_common(sub.add_parser(verb))
    args = parser.parse_args(argv)
    try:
        opts = _merged(args)
        cfg = _build_cfg(opts)
        dataset = _load_dataset(opts.get("dataset", "synthetic"),
                                opts.get("path"))
        seeds = _parse_seeds(opts.get("seeds", "0 1 2 3 4 5 6 7 8 9"))
        counts = _parse_counts(opts.get("split"))
        methods = _methods(opts.get("method", "gafm,vanilla"))
        outdir = _outdir(opts, args.verb.replace("-", "_"))

        if args.verb in ("run", "report"):
            sink: list = []
            rows, agg = run_table(dataset, methods, cfg, seeds, counts,
                                  records_sink=sink)
            emit_reports(rows, sink, outdir)
        elif args.verb == "multiclient":
            if counts is None:
                raise ValueError("multiclient requires --split counts")
            sink = []
            rows, agg = run_multiclient(dataset, counts, methods, cfg, seeds,
                                        records_sink=sink)
            emit_reports(rows, sink, outdir)
        elif args.verb == "sigma-sweep":
            table = sigma_sweep(dataset, cfg, seeds, counts=counts)
            rows = [row for sub_rows in table.values() for row in sub_rows]
            emit_reports(rows, [], outdir)
        elif args.verb == "select-delta":
            sel = select_delta(dataset, cfg, counts=counts)
            os.makedirs(outdir, exist_ok=True)
            with open(os.path.join(outdir, "delta_selection.json"), "w") as fh:
                json.dump({"grid": sel.grid, "ratios": sel.ratios,
                           "train_aucs": sel.train_aucs,
                           "chosen": sel.chosen}, fh, indent=2)
            print(f"chosen delta: {sel.chosen}")
        print(f"wrote outputs to {outdir}")
        return 0
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
