"""Dataset loading, preprocessing, splitting, and vertical feature partitioning.

Loaders return raw (un-standardized) feature matrices; per-column
standardization is applied per train/test split with `normalize_features`
so that test statistics never leak into training.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd


@dataclass
class Dataset:
    name: str
    features: np.ndarray  # (n, d) float64
    labels: np.ndarray    # (n,) ints in {0, 1}

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("label count must match feature rows")
        if not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be binary 0/1")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("non-finite feature values after preprocessing")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def positive_fraction(self) -> float:
        return float(self.labels.mean())


@dataclass
class SplitSpec:
    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


@dataclass
class FeaturePartition:
    """Disjoint, exhaustive per-party column index lists."""

    columns: list[np.ndarray]

    def __post_init__(self):
        flat = np.concatenate(self.columns) if self.columns else np.array([], int)
        if len(np.unique(flat)) != len(flat):
            raise ValueError("party column lists overlap")

    @property
    def n_parties(self) -> int:
        return len(self.columns)


def load_spambase(path: str) -> Dataset:
    """Comma-separated numeric rows, 57 attributes + trailing 0/1 label."""
    df = pd.read_csv(path, header=None)
    if df.shape[1] != 58:
        raise ValueError(f"expected 58 columns (57 features + label), got {df.shape[1]}")
    df = df.apply(pd.to_numeric, errors="coerce")
    labels = df.iloc[:, -1].to_numpy()
    if np.isnan(labels).any():
        raise ValueError("non-numeric label cell")
    feats = df.iloc[:, :-1].fillna(0.0).to_numpy(dtype=np.float64)
    return Dataset("spambase", feats, labels.astype(np.int64))


def load_credit(path: str) -> Dataset:
    """Credit-default CSV with a header; drops the ID column, label is last.

    Categorical missing values become a dedicated extra category before
    integer coding; real-valued missing values become 0.
    """
    df = pd.read_csv(path, header=0)
    if df.shape[1] < 2:
        raise ValueError("credit file must have features and a label column")
    id_cols = [c for c in df.columns if str(c).strip().lower() == "id"]
    df = df.drop(columns=id_cols)
    labels = pd.to_numeric(df.iloc[:, -1]).to_numpy(dtype=np.int64)
    feats = df.iloc[:, :-1]
    cols = []
    for name in feats.columns:
        col = feats[name]
        if col.dtype == object:
            col = col.fillna("").astype(str).astype("category").cat.codes
            cols.append(col.to_numpy(dtype=np.float64))
        else:
            cols.append(col.fillna(0.0).to_numpy(dtype=np.float64))
    return Dataset("credit", np.column_stack(cols), labels)


def load_imdb(path: str, vocab_size: int = 500, train_size: int = 25000) -> Dataset:
    """Word-index export: one review per line, `label<TAB>idx idx idx ...`.

    Builds a binary presence matrix over the `vocab_size` most frequent word
    indices. Frequencies are counted on the first `train_size` lines (the
    training portion of the export) so the vocabulary never sees test text.
    """
    labels, seqs = [], []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                lab, rest = line.split("\t", 1)
                idxs = np.array(rest.split(), dtype=np.int64) if rest.strip() else np.array([], np.int64)
                labels.append(int(lab))
            except ValueError as exc:
                raise ValueError(f"malformed review line: {line[:60]!r}") from exc
            seqs.append(idxs)
    counts: dict[int, int] = {}
    for seq in seqs[: min(train_size, len(seqs))]:
        for w in seq:
            counts[int(w)] = counts.get(int(w), 0) + 1
    top = sorted(counts, key=lambda w: (-counts[w], w))[:vocab_size]
    col_of = {w: j for j, w in enumerate(top)}
    feats = np.zeros((len(seqs), vocab_size))
    for i, seq in enumerate(seqs):
        for w in seq:
            j = col_of.get(int(w))
            if j is not None:
                feats[i, j] = 1.0
    return Dataset("imdb", feats, np.asarray(labels))


def normalize_features(train: np.ndarray, test: np.ndarray
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Per-column z-score using train statistics; zero-variance columns -> 0."""
    train = np.asarray(train, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if train.shape[0] == 0:
        raise ValueError("train split is empty")
    mu = train.mean(axis=0)
    sd = train.std(axis=0)  # population sd
    safe = np.where(sd > 0, sd, 1.0)
    train_n = (train - mu) / safe
    test_n = (test - mu) / safe
    dead = sd == 0
    train_n[:, dead] = 0.0
    test_n[:, dead] = 0.0
    return train_n, test_n


def train_test_split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seed-deterministic shuffle-then-split into disjoint train/test."""
    if ds.n < 2:
        raise ValueError("need at least 2 examples to split")
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(ds.n)
    n_train = int(ds.n * spec.train_fraction)
    n_train = min(max(n_train, 1), ds.n - 1)
    tr, te = perm[:n_train], perm[n_train:]
    return (Dataset(ds.name, ds.features[tr], ds.labels[tr]),
            Dataset(ds.name, ds.features[te], ds.labels[te]))


def partition_features(ds: Dataset, counts: list[int]) -> FeaturePartition:
    """Contiguous column blocks, one per party, in the listed order."""
    if sum(counts) != ds.d:
        raise ValueError(f"party counts {counts} do not sum to d={ds.d}")
    edges = np.cumsum([0] + list(counts))
    return FeaturePartition([np.arange(a, b) for a, b in zip(edges, edges[1:])])


def synthetic_gaussian(n: int, d: int, class_separation: float,
                       positive_fraction: float, seed: int) -> Dataset:
    """Class-conditional unit Gaussians with mean gap along the ones direction.

    The positive-class mean sits `class_separation` away from the negative
    class mean (Euclidean distance). Positives are drawn by exact quota so
    class sizes are deterministic.
    """
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    if not 0.0 < positive_fraction < 1.0:
        raise ValueError("positive_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    n_pos = int(round(n * positive_fraction))
    n_pos = min(max(n_pos, 1), n - 1)
    labels = np.zeros(n, dtype=np.int64)
    labels[:n_pos] = 1
    offset = (class_separation / np.sqrt(d)) * np.ones(d)
    feats = rng.standard_normal((n, d))
    feats[:n_pos] += offset
    perm = rng.permutation(n)
    return Dataset("synthetic", feats[perm], labels[perm])
