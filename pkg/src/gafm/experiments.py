"""Experiment harness: seeded multi-run tables, delta selection, sigma
sweeps, multi-client runs, and report emission.

Every run is keyed by a single seed that determines the train/test split,
model initialization, and all training noise, so rerunning a config
reproduces its outputs bitwise.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .attacks import LeakReport, audit_records, auc
from .baselines import MethodKind, run_baseline
from .data import (Dataset, SplitSpec, normalize_features, partition_features,
                   train_test_split)
from .gafm import GafmConfig, TrainResult, predict
from .protocol import Aggregator, AggregatorKind, PassiveParty

RESULTS_HEADER = ("method,dataset,seed,train_auc,test_auc,"
                  "leak_norm,leak_mean,leak_median,tvd")


@dataclass
class RunRow:
    method: str
    dataset: str
    seed: int
    train_auc: float
    test_auc: float
    leak_norm: float
    leak_mean: float
    leak_median: float
    tvd: float
    report: LeakReport | None = None   # extra fields for leak_report.json

    def csv_line(self) -> str:
        vals = [self.train_auc, self.test_auc, self.leak_norm,
                self.leak_mean, self.leak_median, self.tvd]
        return ",".join([self.method, self.dataset, str(self.seed)]
                        + [f"{v:.6f}" for v in vals])


@dataclass
class DeltaSelection:
    grid: list[float]
    subsample_fraction: float
    reps: int
    tau: float
    ratios: dict[float, float]
    train_aucs: dict[float, float]
    chosen: float


def _make_parties(features: np.ndarray, counts: list[int] | None,
                  cfg: GafmConfig, seed: int) -> list[PassiveParty]:
    d = features.shape[1]
    counts = counts or [d]
    edges = np.cumsum([0] + list(counts))
    if edges[-1] != d:
        raise ValueError(f"split counts {counts} do not cover d={d}")
    parties = []
    for pid, (a, b) in enumerate(zip(edges, edges[1:])):
        rng = np.random.default_rng(np.random.SeedSequence([seed, 100 + pid]))
        parties.append(PassiveParty(pid, features, np.arange(a, b), rng,
                                    hidden=cfg.local_hidden, lr=cfg.lr_l))
    return parties


def run_single(dataset: Dataset, method: MethodKind, seed: int,
               cfg: GafmConfig, counts: list[int] | None = None,
               aggregator: Aggregator | None = None,
               train_fraction: float = 0.7
               ) -> tuple[RunRow, TrainResult]:
    """One (method, seed) run: fresh split, train, audit, evaluate."""
    train_ds, test_ds = train_test_split(dataset, SplitSpec(train_fraction, seed))
    x_train, x_test = normalize_features(train_ds.features, test_ds.features)
    run_cfg = replace(cfg, seed=seed)
    parties = _make_parties(x_train, counts, run_cfg, seed)
    if aggregator is None:
        aggregator = Aggregator(AggregatorKind.IDENTITY if len(parties) == 1
                                else AggregatorKind.AVERAGE)
    result = run_baseline(method, parties, train_ds.labels, run_cfg, aggregator)
    test_scores = predict(result.parties, result.active, x_test, aggregator,
                          use_generator=result.head == "generator")
    train_auc = result.metrics[-1]["train_auc"]
    if result.flip_head:
        train_auc = 1.0 - train_auc
        test_scores = 1.0 - test_scores
    report = audit_records(result.records)
    row = RunRow(
        method=method.value,
        dataset=dataset.name,
        seed=seed,
        train_auc=train_auc,
        test_auc=auc(test_scores, test_ds.labels),
        leak_norm=report.leak_norm,
        leak_mean=report.leak_mean,
        leak_median=report.leak_median,
        tvd=report.tvd,
        report=report,
    )
    return row, result


def run_table(dataset: Dataset, methods: list[MethodKind], cfg: GafmConfig,
              seeds: list[int], counts: list[int] | None = None,
              aggregator: Aggregator | None = None,
              records_sink: list | None = None
              ) -> tuple[list[RunRow], dict]:
    """Full method x seed grid plus mean +/- sample-std aggregates.

    If `records_sink` is given, the first seed's cut records of every
    method are appended to it as (method, records) pairs.
    """
    if not seeds:
        raise ValueError("seed list must be nonempty")
    rows = []
    for method in methods:
        for seed in seeds:
            row, result = run_single(dataset, method, seed, cfg, counts,
                                     aggregator)
            rows.append(row)
            if records_sink is not None and seed == seeds[0]:
                records_sink.append((method.value, result.records))
    return rows, aggregate_rows(rows)


def aggregate_rows(rows: list[RunRow]) -> dict:
    """Per-method (mean, sample std) for every numeric column."""
    cols = ("train_auc", "test_auc", "leak_norm", "leak_mean",
            "leak_median", "tvd")
    out: dict = {}
    for method in dict.fromkeys(r.method for r in rows):
        sub = [r for r in rows if r.method == method]
        out[method] = {}
        for col in cols:
            vals = np.array([getattr(r, col) for r in sub])
            std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
            out[method][col] = (float(vals.mean()), std)
    return out


def select_delta(dataset: Dataset, cfg: GafmConfig,
                 grid: list[float] = (0.05, 0.1, 0.2, 0.3, 0.5),
                 subsample_fraction: float = 0.1, reps: int = 5,
                 tau: float = 0.6, seed: int = 0,
                 counts: list[int] | None = None) -> DeltaSelection:
    """Pick the noise width delta on a shared subsample.

    For each candidate delta, train on the subsample `reps` times and form
    the leak-AUC / train-AUC ratio for each of the three attacks; the
    chosen delta minimizes the joint average ratio among candidates whose
    mean train AUC reaches tau (ties break to the smallest delta).
    """
    if not grid:
        raise ValueError("delta grid must be nonempty")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    n_sub = max(int(round(dataset.n * subsample_fraction)), 4)
    pick = rng.choice(dataset.n, size=n_sub, replace=False)
    subset = Dataset(dataset.name, dataset.features[pick], dataset.labels[pick])
    ratios: dict[float, float] = {}
    train_aucs: dict[float, float] = {}
    for delta in sorted(grid):
        per_rep_ratios, per_rep_auc = [], []
        for rep in range(reps):
            row, _ = run_single(subset, MethodKind.GAFM, seed * 1000 + rep,
                                replace(cfg, delta=delta), counts)
            for leak in (row.leak_norm, row.leak_mean, row.leak_median):
                per_rep_ratios.append(leak / row.train_auc)
            per_rep_auc.append(row.train_auc)
        ratios[delta] = float(np.mean(per_rep_ratios))
        train_aucs[delta] = float(np.mean(per_rep_auc))
    feasible = [d for d in sorted(grid) if train_aucs[d] >= tau]
    if not feasible:
        raise RuntimeError(f"no delta in {sorted(grid)} reaches train AUC {tau}")
    chosen = min(feasible, key=lambda d: (ratios[d], d))
    return DeltaSelection(sorted(grid), subsample_fraction, reps, tau,
                          ratios, train_aucs, chosen)


def sigma_sweep(dataset: Dataset, cfg: GafmConfig, seeds: list[int],
                sigmas: list[float] = (0.01, 0.25, 1.0),
                counts: list[int] | None = None) -> dict[float, list[RunRow]]:
    """GAFM runs at each critic-noise scale, everything else fixed."""
    out = {}
    for sigma in sigmas:
        rows, _ = run_table(dataset, [MethodKind.GAFM],
                            replace(cfg, sigma=sigma), seeds, counts)
        out[sigma] = rows
    return out


def run_multiclient(dataset: Dataset, counts: list[int],
                    methods: list[MethodKind], cfg: GafmConfig,
                    seeds: list[int], records_sink: list | None = None
                    ) -> tuple[list[RunRow], dict]:
    """Multi-party runs with the averaging aggregator."""
    agg = Aggregator(AggregatorKind.AVERAGE)
    return run_table(dataset, methods, cfg, seeds, counts, agg, records_sink)


def emit_run_artifacts(result: TrainResult, outdir: str,
                       method: str = "") -> None:
    """Per-run metrics.csv and cut_records.tsv in `outdir`."""
    os.makedirs(outdir, exist_ok=True)
    try:
        with open(os.path.join(outdir, "metrics.csv"), "w") as fh:
            fh.write("epoch,train_auc,gan_loss,penalty_loss\n")
            for m in result.metrics:
                fh.write(f"{m['epoch']},{m['train_auc']:.6f},"
                         f"{m['gan_loss']:.6f},{m['penalty_loss']:.6f}\n")
        _write_cut_records(os.path.join(outdir, "cut_records.tsv"),
                           [(method, result.records)])
    except OSError as exc:
        raise OSError(f"failed writing run artifacts to {outdir}: {exc}") from exc


def _write_cut_records(path: str, named_records: list[tuple[str, object]]) -> None:
    with open(path, "w") as fh:
        fh.write("method\tindex\tlabel\ty_tilde\ty_hat\t"
                 "grad_total\tgrad_gan\tgrad_penalty\n")
        for method, rec in named_records:
            n = len(rec.index)
            def col(arr):
                return ([""] * n if arr is None
                        else [f"{v:.8g}" for v in arr])
            for vals in zip([method] * n, rec.index, rec.label,
                            col(rec.y_tilde), col(rec.y_hat),
                            col(rec.grad_total), col(rec.grad_gan),
                            col(rec.grad_penalty)):
                fh.write("\t".join(str(v) for v in vals) + "\n")


def emit_reports(rows: list[RunRow], named_records: list[tuple[str, object]],
                 outdir: str) -> None:
    """results.csv, summary.md, cut_records.tsv and leak_report.json."""
    os.makedirs(outdir, exist_ok=True)
    try:
        with open(os.path.join(outdir, "results.csv"), "w") as fh:
            fh.write(RESULTS_HEADER + "\n")
            for row in rows:
                fh.write(row.csv_line() + "\n")

        agg = aggregate_rows(rows) if rows else {}
        cols = ("train_auc", "test_auc", "leak_norm", "leak_mean",
                "leak_median", "tvd")
        with open(os.path.join(outdir, "summary.md"), "w") as fh:
            fh.write("| method | " + " | ".join(cols) + " |\n")
            fh.write("|" + "---|" * (len(cols) + 1) + "\n")
            for method, stats in agg.items():
                cells = [f"{m:.2f}±{s:.2f}" for m, s in
                         (stats[c] for c in cols)]
                fh.write(f"| {method} | " + " | ".join(cells) + " |\n")

        _write_cut_records(os.path.join(outdir, "cut_records.tsv"),
                           named_records)

        payload = []
        for row in rows:
            entry = {"method": row.method, "dataset": row.dataset,
                     "seed": row.seed,
                     "leak_norm": row.leak_norm, "leak_mean": row.leak_mean,
                     "leak_median": row.leak_median, "tvd": row.tvd}
            if row.report is not None:
                entry["sym_kl"] = row.report.sym_kl
                entry["bound"] = row.report.bound
                entry["opposite_direction"] = row.report.opposite_direction
            payload.append(entry)
        with open(os.path.join(outdir, "leak_report.json"), "w") as fh:
            json.dump(payload, fh, indent=2)
    except OSError as exc:
        raise OSError(f"failed writing reports to {outdir}: {exc}") from exc
