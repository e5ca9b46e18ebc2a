"""Baseline defenses and ablations sharing the split-protocol machinery.

Vanilla broadcasts raw per-example BCE gradients against the true labels;
Max Norm multiplies each of those gradients by (1 + zeta_j) with zeta_j
Gaussian, scaled so every perturbed gradient's expected squared norm equals
the batch maximum. GanOnly and PenaltyOnly reuse the adversarial trainer
with one loss component switched off.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .attacks import auc
from .gafm import (ActiveState, CutRecords, GafmConfig, TrainResult,
                   _train_predictions, train)
from .protocol import (Aggregator, AggregatorKind, CutMessageDown,
                       PassiveParty, aggregate, distribute_grad)

BCE_CLAMP = 1e-7


class MethodKind(Enum):
    GAFM = "gafm"
    VANILLA = "vanilla"
    MAX_NORM = "max_norm"
    GAN_ONLY = "gan_only"
    PENALTY_ONLY = "penalty_only"


def vanilla_cut_gradient(y_tilde: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-example gradient of mean BCE of the cut values against true labels."""
    yc = np.clip(y_tilde, BCE_CLAMP, 1.0 - BCE_CLAMP)
    return (yc - y) / (len(yc) * yc * (1.0 - yc))


def max_norm_perturb(grads: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Multiplicative Gaussian noise matching every example's expected
    squared norm to the batch maximum; zero gradients pass through."""
    grads = np.asarray(grads, dtype=np.float64)
    if grads.size == 0:
        raise ValueError("empty gradient batch")
    sq = grads ** 2
    g_max = sq.max()
    out = grads.copy()
    nz = sq > 0
    sigma = np.sqrt(g_max / sq[nz] - 1.0)
    zeta = rng.normal(0.0, 1.0, size=sigma.shape) * sigma
    out[nz] = grads[nz] * (1.0 + zeta)
    return out


def _plain_split_training(parties: list[PassiveParty], labels: np.ndarray,
                          cfg: GafmConfig, agg: Aggregator,
                          perturb: bool) -> TrainResult:
    """SplitNN loop: forward, BCE cut gradient (optionally Max Norm
    perturbed), local updates. Prediction head is the cut value itself."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
    n = len(labels)
    metrics: list[dict] = []
    rec: dict[str, list] = {k: [] for k in
                            ("index", "label", "y_tilde", "grad_total")}
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n)
        last_epoch = epoch == cfg.epochs - 1
        for start in range(0, n, cfg.batch):
            idx = perm[start:start + cfg.batch]
            ups = [p.forward(idx) for p in parties]
            y_tilde = aggregate(ups, agg)
            grad = vanilla_cut_gradient(y_tilde, labels[idx])
            if perturb:
                grad = max_norm_perturb(grad, rng)
            down = CutMessageDown(idx, grad)
            for party, d in zip(parties, distribute_grad(down, agg, len(parties))):
                party.apply_grad(d)
            if last_epoch:
                rec["index"].append(idx)
                rec["label"].append(labels[idx])
                rec["y_tilde"].append(y_tilde)
                rec["grad_total"].append(grad)
        scores = _train_predictions(parties, None, agg, use_gan=False)
        metrics.append({"epoch": epoch, "train_auc": auc(scores, labels),
                        "gan_loss": float("nan"), "penalty_loss": float("nan")})
    records = CutRecords(
        index=np.concatenate(rec["index"]),
        label=np.concatenate(rec["label"]),
        y_tilde=np.concatenate(rec["y_tilde"]),
        y_hat=None,
        grad_total=np.concatenate(rec["grad_total"]),
        grad_gan=None,
        grad_penalty=None,
    )
    return TrainResult(parties, None, metrics, records, head="cut")


def run_baseline(kind: MethodKind, parties: list[PassiveParty],
                 labels: np.ndarray, cfg: GafmConfig,
                 agg: Aggregator | None = None,
                 active: ActiveState | None = None) -> TrainResult:
    """Train one method end to end and return models, metrics and records."""
    labels = np.asarray(labels, dtype=np.int64)
    if agg is None:
        agg = Aggregator(AggregatorKind.IDENTITY if len(parties) == 1
                         else AggregatorKind.AVERAGE)
    if kind in (MethodKind.VANILLA, MethodKind.MAX_NORM):
        return _plain_split_training(parties, labels, cfg, agg,
                                     perturb=kind is MethodKind.MAX_NORM)
    if kind is MethodKind.PENALTY_ONLY:
        if active is None:
            active = ActiveState(labels, np.random.default_rng(
                np.random.SeedSequence([cfg.seed, 1]).spawn(1)[0]),
                cfg.gen_hidden, cfg.disc_hidden)
        return train(parties, active, cfg, agg, use_gan=False, use_penalty=True)
    if active is None:
        active = ActiveState(labels, np.random.default_rng(
            np.random.SeedSequence([cfg.seed, 1]).spawn(1)[0]),
            cfg.gen_hidden, cfg.disc_hidden)
    use_penalty = kind is MethodKind.GAFM
    return train(parties, active, cfg, agg, use_gan=True,
                 use_penalty=use_penalty)
