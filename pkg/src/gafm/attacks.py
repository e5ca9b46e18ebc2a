"""Label-stealing attacks on cut-layer gradients and leakage metrics.

Attacks return continuous scores (higher = more class-1-like) so that leak
AUC can be computed over margins; the hard cluster assignments of the
mean/median rules are available too. Histogram TVD / symmetric KL and the
KL-based leak-AUC ceiling quantify worst-case leakage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata


@dataclass
class GradientAudit:
    """Per-example scalar gradients with their true labels and class centers."""

    grads: np.ndarray
    labels: np.ndarray
    mu0: float
    mu1: float
    m0: float
    m1: float

    @classmethod
    def from_run(cls, grads: np.ndarray, labels: np.ndarray) -> "GradientAudit":
        grads = np.asarray(grads, dtype=np.float64)
        labels = np.asarray(labels)
        if not ((labels == 0).any() and (labels == 1).any()):
            raise ValueError("both classes must be present")
        g0, g1 = grads[labels == 0], grads[labels == 1]
        return cls(grads, labels, float(g0.mean()), float(g1.mean()),
                   float(np.median(g0)), float(np.median(g1)))


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Mann-Whitney AUC with average-rank tie handling."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n1 = int((labels == 1).sum())
    n0 = int((labels == 0).sum())
    if n1 == 0 or n0 == 0:
        raise ValueError("AUC undefined with a single class")
    ranks = rankdata(scores)
    u = ranks[labels == 1].sum() - n1 * (n1 + 1) / 2.0
    return float(u / (n1 * n0))


def leak_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """AUC flipped to >= 0.5: the attacker may invert its label assignment."""
    a = auc(scores, labels)
    return max(a, 1.0 - a)


def norm_attack(grads: np.ndarray) -> np.ndarray:
    """Score each example by its gradient magnitude."""
    return np.abs(np.asarray(grads, dtype=np.float64))


def mean_attack(audit: GradientAudit, hard: bool = False) -> np.ndarray:
    """Distance-to-center margin; the hard rule assigns ties to class 1."""
    s = np.abs(audit.grads - audit.mu0) - np.abs(audit.grads - audit.mu1)
    return (s >= 0).astype(np.float64) if hard else s


def median_attack(audit: GradientAudit, hard: bool = False) -> np.ndarray:
    """Same as mean_attack but against class medians."""
    s = np.abs(audit.grads - audit.m0) - np.abs(audit.grads - audit.m1)
    return (s >= 0).astype(np.float64) if hard else s


def _common_histograms(sample1: np.ndarray, sample0: np.ndarray, bins: int
                       ) -> tuple[np.ndarray, np.ndarray]:
    sample1 = np.asarray(sample1, dtype=np.float64)
    sample0 = np.asarray(sample0, dtype=np.float64)
    if sample1.size == 0 or sample0.size == 0:
        raise ValueError("both samples must be nonempty")
    if bins < 2:
        raise ValueError("need at least 2 bins")
    pooled = np.concatenate([sample1, sample0])
    lo, hi = pooled.min(), pooled.max()
    if lo == hi:
        hi = lo + 1e-12
    p, _ = np.histogram(sample1, bins=bins, range=(lo, hi))
    q, _ = np.histogram(sample0, bins=bins, range=(lo, hi))
    return p / p.sum(), q / q.sum()


def tvd_hist(sample1: np.ndarray, sample0: np.ndarray, bins: int = 50) -> float:
    """Total variation distance between histogram estimates on a shared grid."""
    p, q = _common_histograms(sample1, sample0, bins)
    return float(0.5 * np.abs(p - q).sum())


def sym_kl_hist(sample1: np.ndarray, sample0: np.ndarray, bins: int = 50,
                smoothing: float = 1e-6) -> float:
    """Symmetric KL of additively smoothed histogram estimates."""
    if smoothing <= 0:
        raise ValueError("smoothing must be positive")
    p, q = _common_histograms(sample1, sample0, bins)
    p = (p + smoothing) / (p + smoothing).sum()
    q = (q + smoothing) / (q + smoothing).sum()
    return float(np.sum((p - q) * np.log(p / q)))


def auc_bound(eps: float) -> float:
    """Leak-AUC ceiling implied by a symmetric-KL budget eps in [0, 4)."""
    if not 0.0 <= eps < 4.0:
        raise ValueError("bound defined for eps in [0, 4)")
    return 0.5 + np.sqrt(eps) / 2.0 - eps / 8.0


@dataclass
class DirectionReport:
    """Between-class mean differences of the two cut-gradient components."""

    gan_mean_0: float
    gan_mean_1: float
    penalty_mean_0: float
    penalty_mean_1: float
    gan_diff: float        # class-1 mean minus class-0 mean
    penalty_diff: float
    opposite: bool


def direction_report(records) -> DirectionReport | None:
    """Check whether the two gradient components pull classes apart in
    opposite directions (the cancellation that mixes the total gradient).

    Returns None when the run carries no per-component gradients.
    """
    if getattr(records, "grad_gan", None) is None or \
            getattr(records, "grad_penalty", None) is None:
        return None
    y = records.label
    g1, g0 = records.grad_gan[y == 1], records.grad_gan[y == 0]
    p1, p0 = records.grad_penalty[y == 1], records.grad_penalty[y == 0]
    gan_diff = float(g1.mean() - g0.mean())
    pen_diff = float(p1.mean() - p0.mean())
    return DirectionReport(float(g0.mean()), float(g1.mean()),
                           float(p0.mean()), float(p1.mean()),
                           gan_diff, pen_diff,
                           opposite=gan_diff * pen_diff < 0)


@dataclass
class LeakReport:
    leak_norm: float
    leak_mean: float
    leak_median: float
    tvd: float
    sym_kl: float
    bound: float | None
    opposite_direction: bool | None


def audit_records(records) -> LeakReport:
    """Run every attack and distributional metric on one run's cut records."""
    g, y = records.grad_total, records.label
    audit = GradientAudit.from_run(g, y)
    skl = sym_kl_hist(g[y == 1], g[y == 0])
    direction = direction_report(records)
    return LeakReport(
        leak_norm=leak_auc(norm_attack(g), y),
        leak_mean=leak_auc(mean_attack(audit), y),
        leak_median=leak_auc(median_attack(audit), y),
        tvd=tvd_hist(g[y == 1], g[y == 0]),
        sym_kl=skl,
        bound=float(auc_bound(skl)) if skl < 4.0 else None,
        opposite_direction=None if direction is None else direction.opposite,
    )
