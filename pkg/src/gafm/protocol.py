"""Split-learning choreography between passive parties and the active party.

Passive parties hold feature columns only (no label-typed state anywhere in
this module) and exchange cut-layer messages with the active side:
CutMessageUp carries per-example local-model outputs, CutMessageDown carries
per-example gradients back. An optional round trace logs every message for
the label-isolation audit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .nn import MLP, Adam


@dataclass
class CutMessageUp:
    party_id: int
    indices: np.ndarray     # batch example indices
    values: np.ndarray      # local-model outputs, one scalar per example

    def __post_init__(self):
        if self.values.shape != self.indices.shape:
            raise ValueError("one cut value per example required")


@dataclass
class CutMessageDown:
    indices: np.ndarray
    grad: np.ndarray        # d loss / d cut value, per example

    def __post_init__(self):
        if self.grad.shape != self.indices.shape:
            raise ValueError("one gradient per example required")
        if not np.all(np.isfinite(self.grad)):
            raise ValueError("non-finite cut gradient")


class AggregatorKind(Enum):
    IDENTITY = "identity"   # valid only for exactly one passive party
    AVERAGE = "average"


@dataclass
class Aggregator:
    kind: AggregatorKind = AggregatorKind.IDENTITY


class PassiveParty:
    """A feature-holding participant with a local MLP ending in a sigmoid.

    The party owns a column block of the feature matrix and never sees
    labels; its only inbound channel is CutMessageDown.
    """

    def __init__(self, party_id: int, features: np.ndarray, columns: np.ndarray,
                 rng: np.random.Generator, hidden: tuple[int, ...] = (32, 16),
                 lr: float = 1e-4):
        self.party_id = party_id
        self.columns = np.asarray(columns, dtype=np.int64)
        self.features = np.asarray(features, dtype=np.float64)[:, self.columns]
        dims = [self.features.shape[1], *hidden, 1]
        acts = ["leaky_relu"] * len(hidden) + ["sigmoid"]
        self.model = MLP.create(dims, acts, rng)
        self.opt = Adam(self.model)
        self.lr = lr
        self._cache = None
        self._cache_indices = None

    def forward(self, indices: np.ndarray) -> CutMessageUp:
        """Emit cut-layer values for a batch of row indices, caching for backward."""
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= self.features.shape[0]):
            raise IndexError("batch index out of range")
        out, cache = self.model.forward(self.features[indices])
        self._cache = cache
        self._cache_indices = indices
        return CutMessageUp(self.party_id, indices, out[:, 0])

    def forward_features(self, features: np.ndarray) -> np.ndarray:
        """Stateless forward on external rows (inference); slices own columns."""
        out, _ = self.model.forward(np.asarray(features, dtype=np.float64)[:, self.columns])
        return out[:, 0]

    def apply_grad(self, down: CutMessageDown) -> None:
        """One Adam step on the local model, chained from the received gradient."""
        if self._cache is None or not np.array_equal(down.indices, self._cache_indices):
            raise RuntimeError("no matching forward cache for this batch")
        grads, _ = self.model.backward(self._cache, down.grad[:, None])
        self.opt.step(self.model, grads, self.lr)
        self._cache = None
        self._cache_indices = None


def aggregate(ups: list[CutMessageUp], agg: Aggregator) -> np.ndarray:
    """Combine per-party cut values into the aggregated cut-layer vector."""
    if not ups:
        raise ValueError("no upward messages")
    base = ups[0].indices
    for up in ups[1:]:
        if not np.array_equal(up.indices, base):
            raise ValueError("parties disagree on batch indices")
    if agg.kind is AggregatorKind.IDENTITY:
        if len(ups) != 1:
            raise ValueError("identity aggregation requires exactly one party")
        return ups[0].values.copy()
    return np.mean([up.values for up in ups], axis=0)


def distribute_grad(down: CutMessageDown, agg: Aggregator, n_parties: int
                    ) -> list[CutMessageDown]:
    """Chain-rule the aggregated gradient back to each party."""
    if n_parties < 1:
        raise ValueError("need at least one party")
    if agg.kind is AggregatorKind.IDENTITY:
        if n_parties != 1:
            raise ValueError("identity aggregation requires exactly one party")
        return [CutMessageDown(down.indices, down.grad.copy())]
    share = down.grad / n_parties
    return [CutMessageDown(down.indices, share.copy()) for _ in range(n_parties)]


@dataclass
class RoundTrace:
    """Optional per-message audit log: epoch,batch,direction,party,index,value."""

    rows: list[str] = field(default_factory=list)

    def log_up(self, epoch: int, batch: int, up: CutMessageUp) -> None:
        for i, v in zip(up.indices, up.values):
            self.rows.append(f"{epoch},{batch},up,{up.party_id},{i},{v!r}")

    def log_down(self, epoch: int, batch: int, party_id: int,
                 down: CutMessageDown) -> None:
        for i, v in zip(down.indices, down.grad):
            self.rows.append(f"{epoch},{batch},down,{party_id},{i},{v!r}")

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("epoch,batch,direction,party,index,value\n")
            fh.write("\n".join(self.rows) + ("\n" if self.rows else ""))
