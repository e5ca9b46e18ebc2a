"""Adversarial split-learning trainer with randomized-response penalty.

The active party trains a Wasserstein critic and a generator on the
aggregated cut-layer values, and broadcasts a combined cut gradient whose
two components (critic part and penalty part) are each L2-normalized over
the batch before being summed. The penalty targets are randomized
pseudo-labels 0.5 +/- u, u ~ Uniform(0, delta), so no raw label crosses
the cut.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attacks import auc
from .nn import MLP, Adam, clip_weights, l2_normalize
from .protocol import (Aggregator, AggregatorKind, CutMessageDown,
                       PassiveParty, aggregate, distribute_grad)

PENALTY_CLAMP = 1e-7


@dataclass
class GafmConfig:
    delta: float
    sigma: float = 0.01
    gamma: float = 1.0
    clip: float = 0.1
    epochs: int = 300
    batch: int = 1028
    lr_d: float = 1e-4
    lr_g: float = 1e-4
    lr_l: float = 1e-4
    seed: int = 0
    local_hidden: tuple = (32, 16)
    gen_hidden: tuple = (32, 16)
    disc_hidden: tuple = (64, 32, 16)
    rr_per_epoch: bool = False   # redraw randomized response per epoch, not per batch

    def __post_init__(self):
        if not 0.0 <= self.delta <= 0.5:
            raise ValueError("delta must lie in [0, 0.5]")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.clip <= 0 or self.epochs < 1 or self.batch < 1:
            raise ValueError("invalid clip/epochs/batch")
        if min(self.lr_d, self.lr_g, self.lr_l) <= 0:
            raise ValueError("learning rates must be positive")


class ActiveState:
    """Label holder plus generator/critic networks and their optimizers."""

    def __init__(self, labels: np.ndarray, rng: np.random.Generator,
                 gen_hidden: tuple = (32, 16), disc_hidden: tuple = (64, 32, 16)):
        self.labels = np.asarray(labels, dtype=np.int64)
        # generator: sigmoid head, hidden LeakyReLU
        self.gen = MLP.create([1, *gen_hidden, 1],
                              ["leaky_relu"] * len(gen_hidden) + ["sigmoid"], rng)
        # critic: LeakyReLU throughout, unconstrained scalar output
        self.disc = MLP.create([1, *disc_hidden, 1],
                               ["leaky_relu"] * len(disc_hidden) + ["identity"], rng)
        self.gen_opt = Adam(self.gen)
        self.disc_opt = Adam(self.disc)


@dataclass
class CutRecords:
    """Final-epoch per-example audit records (the scatter-plot source)."""

    index: np.ndarray
    label: np.ndarray
    y_tilde: np.ndarray
    y_hat: np.ndarray | None
    grad_total: np.ndarray
    grad_gan: np.ndarray | None
    grad_penalty: np.ndarray | None


def draw_randomized_response(labels: np.ndarray, delta: float,
                             rng: np.random.Generator) -> np.ndarray:
    """Pseudo-labels: 0.5 + u for class 1, 0.5 - u for class 0, u ~ U(0, delta)."""
    if not 0.0 <= delta <= 0.5:
        raise ValueError("delta must lie in [0, 0.5]")
    labels = np.asarray(labels)
    u = rng.uniform(0.0, delta, size=labels.shape) if delta > 0 else np.zeros(labels.shape)
    return np.where(labels == 1, 0.5 + u, 0.5 - u)


def gan_loss(d_real: np.ndarray, d_fake: np.ndarray) -> float:
    """Wasserstein form: mean critic score on real minus on generated."""
    if len(d_real) != len(d_fake):
        raise ValueError("real/fake batches must match in size")
    return float(np.mean(d_real) - np.mean(d_fake))


def penalty_loss(y_tilde: np.ndarray, y_dot: np.ndarray) -> float:
    """Soft-target cross entropy of cut values against randomized pseudo-labels."""
    yc = np.clip(y_tilde, PENALTY_CLAMP, 1.0 - PENALTY_CLAMP)
    return float(-np.mean(y_dot * np.log(yc) + (1.0 - y_dot) * np.log(1.0 - yc)))


def penalty_grad(y_tilde: np.ndarray, y_dot: np.ndarray) -> np.ndarray:
    """Per-example d(penalty_loss)/d(y_tilde), evaluated at the clamped values."""
    yc = np.clip(y_tilde, PENALTY_CLAMP, 1.0 - PENALTY_CLAMP)
    return (yc - y_dot) / (len(yc) * yc * (1.0 - yc))


def discriminator_step(active: ActiveState, y_tilde: np.ndarray, y: np.ndarray,
                       sigma: float, clip_c: float, lr: float,
                       rng: np.random.Generator) -> float:
    """One Adam ascent step on the critic, then weight clipping.

    Fresh Gaussian noise is added to the labels each call so the reference
    distribution has continuous support.
    """
    n = len(y)
    eps = rng.normal(0.0, sigma, size=n)
    real = (y.astype(np.float64) + eps)[:, None]
    fake, _ = active.gen.forward(y_tilde[:, None])
    d_real, cache_r = active.disc.forward(real)
    d_fake, cache_f = active.disc.forward(fake)
    # ascent on L_GAN == descent on -L_GAN
    up = np.full((n, 1), 1.0 / n)
    grads_r, _ = active.disc.backward(cache_r, -up)
    grads_f, _ = active.disc.backward(cache_f, up)
    grads = [(gw1 + gw2, gb1 + gb2)
             for (gw1, gb1), (gw2, gb2) in zip(grads_r, grads_f)]
    active.disc_opt.step(active.disc, grads, lr)
    clip_weights(active.disc, clip_c)
    return gan_loss(d_real[:, 0], d_fake[:, 0])


def generator_step(active: ActiveState, y_tilde: np.ndarray, lr: float) -> None:
    """One Adam descent step on the generator's part of the critic loss."""
    n = len(y_tilde)
    y_hat, cache_g = active.gen.forward(y_tilde[:, None])
    _, cache_d = active.disc.forward(y_hat)
    _, d_input = active.disc.backward(cache_d, np.full((n, 1), -1.0 / n))
    grads, _ = active.gen.backward(cache_g, d_input)
    active.gen_opt.step(active.gen, grads, lr)


def gan_cut_grad(active: ActiveState, y_tilde: np.ndarray
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Per-example d(L_GAN)/d(y_tilde) and the generator predictions."""
    n = len(y_tilde)
    y_hat, cache_g = active.gen.forward(y_tilde[:, None])
    _, cache_d = active.disc.forward(y_hat)
    _, d_input = active.disc.backward(cache_d, np.full((n, 1), -1.0 / n))
    _, g_input = active.gen.backward(cache_g, d_input)
    return g_input[:, 0], y_hat[:, 0]


def cut_gradient(grad_gan: np.ndarray | None, grad_pen: np.ndarray | None,
                 gamma: float) -> np.ndarray:
    """Normalized combination broadcast to the passive parties."""
    if grad_gan is not None and grad_pen is not None and len(grad_gan) != len(grad_pen):
        raise ValueError("component gradients must have equal length")
    parts = []
    if grad_gan is not None:
        parts.append(l2_normalize(grad_gan))
    if grad_pen is not None:
        parts.append(gamma * l2_normalize(grad_pen))
    if not parts:
        raise ValueError("at least one gradient component required")
    return np.sum(parts, axis=0)


@dataclass
class TrainResult:
    parties: list[PassiveParty]
    active: ActiveState
    metrics: list[dict]
    records: CutRecords
    head: str   # "generator" -> predictions are G(y_tilde); "cut" -> y_tilde itself
    # The Wasserstein objective matches distributions, not orientation, so the
    # trained generator is an increasing or decreasing map with equal
    # probability. The active party owns the labels and orients its own
    # read-out (scores -> 1 - scores) when the final training AUC is below
    # 0.5. Nothing crossing the cut layer is affected.
    flip_head: bool = False


def train(parties: list[PassiveParty], active: ActiveState, cfg: GafmConfig,
          agg: Aggregator | None = None, use_gan: bool = True,
          use_penalty: bool = True, trace=None) -> TrainResult:
    """Run the full adversarial split-training loop.

    Per batch: critic ascent + clip, generator descent, normalized combined
    cut gradient broadcast, then local-model updates and re-forward on the
    passive side. In epoch 0 the cut values seen by the active party are
    i.i.d. standard Gaussians (only the local models' own forwards are used
    from epoch 1 onward). `use_gan`/`use_penalty` carve out the ablations.
    """
    if not (use_gan or use_penalty):
        raise ValueError("nothing to train: both components disabled")
    if agg is None:
        agg = Aggregator(AggregatorKind.IDENTITY if len(parties) == 1
                         else AggregatorKind.AVERAGE)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
    labels = active.labels
    n = len(labels)
    y_init = rng.standard_normal(n) if use_gan else None
    metrics: list[dict] = []
    rec: dict[str, list] = {k: [] for k in
                            ("index", "label", "y_tilde", "y_hat",
                             "grad_total", "grad_gan", "grad_penalty")}
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n)
        rr_epoch = (draw_randomized_response(labels, cfg.delta, rng)
                    if (use_penalty and cfg.rr_per_epoch) else None)
        gl_sum, pl_sum, n_batches = 0.0, 0.0, 0
        last_epoch = epoch == cfg.epochs - 1
        for b, start in enumerate(range(0, n, cfg.batch)):
            idx = perm[start:start + cfg.batch]
            ups = [p.forward(idx) for p in parties]
            if trace is not None:
                for up in ups:
                    trace.log_up(epoch, b, up)
            y_model = aggregate(ups, agg)
            y_tilde = y_init[idx] if (epoch == 0 and use_gan) else y_model
            y = labels[idx]

            grad_gan = grad_pen = y_hat = None
            gl = pl = 0.0
            if use_gan:
                gl = discriminator_step(active, y_tilde, y, cfg.sigma,
                                        cfg.clip, cfg.lr_d, rng)
                generator_step(active, y_tilde, cfg.lr_g)
                grad_gan, y_hat = gan_cut_grad(active, y_tilde)
            if use_penalty:
                y_dot = rr_epoch[idx] if cfg.rr_per_epoch else \
                    draw_randomized_response(y, cfg.delta, rng)
                grad_pen = penalty_grad(y_tilde, y_dot)
                pl = penalty_loss(y_tilde, y_dot)
            if not (np.isfinite(gl) and np.isfinite(pl)):
                raise FloatingPointError(
                    f"non-finite loss at epoch {epoch}, batch {b}")

            total = cut_gradient(grad_gan, grad_pen,
                                 cfg.gamma if use_gan else 1.0)
            down = CutMessageDown(idx, total)
            downs = distribute_grad(down, agg, len(parties))
            for party, d in zip(parties, downs):
                if trace is not None:
                    trace.log_down(epoch, b, party.party_id, d)
                party.apply_grad(d)

            gl_sum += gl
            pl_sum += pl
            n_batches += 1
            if last_epoch:
                rec["index"].append(idx)
                rec["label"].append(y)
                rec["y_tilde"].append(y_tilde)
                rec["y_hat"].append(y_hat)
                rec["grad_total"].append(total)
                rec["grad_gan"].append(None if grad_gan is None
                                       else l2_normalize(grad_gan))
                rec["grad_penalty"].append(None if grad_pen is None else
                                           (cfg.gamma if use_gan else 1.0)
                                           * l2_normalize(grad_pen))

        train_scores = _train_predictions(parties, active, agg, use_gan)
        metrics.append({
            "epoch": epoch,
            "train_auc": auc(train_scores, labels),
            "gan_loss": gl_sum / n_batches,
            "penalty_loss": pl_sum / n_batches,
        })

    def cat(key):
        if any(v is None for v in rec[key]):
            return None
        return np.concatenate(rec[key])

    records = CutRecords(
        index=np.concatenate(rec["index"]),
        label=np.concatenate(rec["label"]),
        y_tilde=np.concatenate(rec["y_tilde"]),
        y_hat=cat("y_hat"),
        grad_total=np.concatenate(rec["grad_total"]),
        grad_gan=cat("grad_gan"),
        grad_penalty=cat("grad_penalty"),
    )
    flip = use_gan and metrics[-1]["train_auc"] < 0.5
    return TrainResult(parties, active, metrics, records,
                       head="generator" if use_gan else "cut",
                       flip_head=flip)


def _train_predictions(parties, active, agg, use_gan):
    ups = [p.forward(np.arange(p.features.shape[0])) for p in parties]
    y_tilde = aggregate(ups, agg)
    for p in parties:
        p._cache = p._cache_indices = None   # inference only, drop caches
    if not use_gan:
        return y_tilde
    y_hat, _ = active.gen.forward(y_tilde[:, None])
    return y_hat[:, 0]


def predict(parties: list[PassiveParty], active: ActiveState | None,
            features: np.ndarray, agg: Aggregator | None = None,
            use_generator: bool = True) -> np.ndarray:
    """Full-pipeline prediction on external feature rows."""
    if agg is None:
        agg = Aggregator(AggregatorKind.IDENTITY if len(parties) == 1
                         else AggregatorKind.AVERAGE)
    values = [p.forward_features(features) for p in parties]
    if agg.kind is AggregatorKind.IDENTITY:
        if len(values) != 1:
            raise ValueError("identity aggregation requires exactly one party")
        y_tilde = values[0]
    else:
        y_tilde = np.mean(values, axis=0)
    if not use_generator:
        return y_tilde
    y_hat, _ = active.gen.forward(y_tilde[:, None])
    return y_hat[:, 0]
