"""Minimal dense neural-network engine.

Small fixed-shape MLPs with explicit forward/backward passes, an Adam
optimizer, weight clipping for Wasserstein critics, and batch-vector L2
normalization. Everything is float64 numpy so gradient checks against
finite differences are tight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ACTIVATIONS = ("leaky_relu", "sigmoid", "identity")

NORMALIZE_TOL = 1e-12


@dataclass
class DenseLayer:
    """One affine layer plus activation. w is (fan_in, fan_out), b is (fan_out,)."""

    w: np.ndarray
    b: np.ndarray
    act: str
    leaky_slope: float = 0.01

    def __post_init__(self):
        if self.act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.act!r}")
        if self.w.ndim != 2 or self.b.shape != (self.w.shape[1],):
            raise ValueError("layer weight/bias shapes inconsistent")


def _activate(z: np.ndarray, act: str, slope: float) -> np.ndarray:
    if act == "leaky_relu":
        return np.where(z >= 0, z, slope * z)
    if act == "sigmoid":
        # stable sigmoid, split by sign
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out
    return z


def _activate_grad(z: np.ndarray, a: np.ndarray, act: str, slope: float) -> np.ndarray:
    if act == "leaky_relu":
        return np.where(z >= 0, 1.0, slope)
    if act == "sigmoid":
        return a * (1.0 - a)
    return np.ones_like(z)


class MLP:
    """A plain stack of DenseLayers with an explicit backward pass."""

    def __init__(self, layers: list[DenseLayer]):
        for prev, nxt in zip(layers, layers[1:]):
            if prev.w.shape[1] != nxt.w.shape[0]:
                raise ValueError("consecutive layer dimensions do not chain")
        self.layers = layers

    @classmethod
    def create(cls, dims: list[int], acts: list[str], rng: np.random.Generator,
               leaky_slope: float = 0.01) -> "MLP":
        """Glorot-uniform weights, zero biases. dims has len(acts)+1 entries."""
        if len(dims) != len(acts) + 1:
            raise ValueError("need one activation per layer")
        layers = []
        for fan_in, fan_out, act in zip(dims, dims[1:], acts):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            w = rng.uniform(-limit, limit, size=(fan_in, fan_out))
            layers.append(DenseLayer(w, np.zeros(fan_out), act, leaky_slope))
        return cls(layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].w.shape[0]

    @property
    def out_dim(self) -> int:
        return self.layers[-1].w.shape[1]

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list]:
        """Returns (output, cache). cache holds per-layer (input, pre-act, act)."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ValueError(
                f"input shape {x.shape} incompatible with first layer "
                f"fan_in {self.in_dim}")
        cache = []
        a = x
        for layer in self.layers:
            z = a @ layer.w + layer.b
            a_next = _activate(z, layer.act, layer.leaky_slope)
            cache.append((a, z, a_next))
            a = a_next
        return a, cache

    def backward(self, cache: list, upstream: np.ndarray
                 ) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
        """Backprop an output-gradient through the cached forward pass.

        Returns ([(dW, db) per layer], gradient w.r.t. the network input).
        """
        upstream = np.asarray(upstream, dtype=np.float64)
        if upstream.shape != cache[-1][2].shape:
            raise ValueError("upstream gradient shape mismatch")
        grads: list = [None] * len(self.layers)
        g = upstream
        for k in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[k]
            a_in, z, a_out = cache[k]
            gz = g * _activate_grad(z, a_out, layer.act, layer.leaky_slope)
            grads[k] = (a_in.T @ gz, gz.sum(axis=0))
            g = gz @ layer.w.T
        return grads, g

    def snapshot(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Copies of all (w, b), for parameter-partition assertions in tests."""
        return [(l.w.copy(), l.b.copy()) for l in self.layers]


class Adam:
    """Standard Adam with bias correction, state mirrored on one MLP."""

    def __init__(self, mlp: MLP, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [(np.zeros_like(l.w), np.zeros_like(l.b)) for l in mlp.layers]
        self.v = [(np.zeros_like(l.w), np.zeros_like(l.b)) for l in mlp.layers]

    def step(self, mlp: MLP, grads: list[tuple[np.ndarray, np.ndarray]],
             lr: float) -> None:
        if lr <= 0:
            raise ValueError("learning rate must be positive")
        for dw, db in grads:
            if not (np.all(np.isfinite(dw)) and np.all(np.isfinite(db))):
                raise FloatingPointError("non-finite gradient in Adam step")
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for layer, (mw, mb), (vw, vb), (dw, db) in zip(
                mlp.layers, self.m, self.v, grads):
            mw *= self.beta1; mw += (1 - self.beta1) * dw
            mb *= self.beta1; mb += (1 - self.beta1) * db
            vw *= self.beta2; vw += (1 - self.beta2) * dw * dw
            vb *= self.beta2; vb += (1 - self.beta2) * db * db
            layer.w -= lr * (mw / c1) / (np.sqrt(vw / c2) + self.eps)
            layer.b -= lr * (mb / c1) / (np.sqrt(vb / c2) + self.eps)


def clip_weights(mlp: MLP, c: float) -> None:
    """Clamp every weight and bias into [-c, c] in place."""
    if c <= 0:
        raise ValueError("clip bound must be positive")
    for layer in mlp.layers:
        np.clip(layer.w, -c, c, out=layer.w)
        np.clip(layer.b, -c, c, out=layer.b)


def l2_normalize(v: np.ndarray) -> np.ndarray:
    """v / ||v||_2, or the zero vector when ||v||_2 <= 1e-12."""
    v = np.asarray(v, dtype=np.float64)
    norm = np.linalg.norm(v)
    if norm <= NORMALIZE_TOL:
        return np.zeros_like(v)
    return v / norm
