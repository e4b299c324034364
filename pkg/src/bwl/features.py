"""Random-feature maps: cosine features with Gaussian frequencies (kernel
approximation), fixed random hidden layers (extreme learning machines), and
user-supplied two-layer parameters.

A map holds K hidden rows (W_i, b_i) plus an elementwise activation; feature
evaluation is ``Phi[j, i] = act(W_i . x_j + b_i)``, stored samples-by-features
so the Gram matrix ``Phi.T @ Phi`` is K-by-K. Cosine feature scaling is left
to the linear output weights; the kernel identity holds after multiplying
inner products by 2/K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .rng import rng_from_seed

__all__ = [
    "ACTIVATIONS",
    "FeatureMap",
    "sample_rff",
    "sample_elm",
    "atomic_map",
    "passthrough_map",
    "evaluate_features",
]

ACTIVATIONS = {
    "cos": np.cos,
    "tanh": np.tanh,
    "relu": lambda x: np.maximum(x, 0.0),
    "sigmoid": expit,
    # test-only: makes the feature map the identity on its input
    "identity": lambda x: x,
}


@dataclass(frozen=True)
class FeatureMap:
    """Immutable sampled (or user-supplied) feature map."""

    kind: str  # "rff" | "elm" | "atomic"
    weights: np.ndarray  # (K, d)
    biases: np.ndarray  # (K,)
    activation: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        b = np.asarray(self.biases, dtype=float).ravel()
        if w.ndim != 2:
            raise ValueError(f"weights must be 2-D (K, d), got shape {w.shape}")
        if b.shape[0] != w.shape[0]:
            raise ValueError(
                f"bias count {b.shape[0]} does not match weight rows {w.shape[0]}"
            )
        if self.kind not in ("rff", "elm", "atomic"):
            raise ValueError(f"unknown feature kind {self.kind!r}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.kind == "rff" and self.activation != "cos":
            raise ValueError("cosine activation is part of the rff construction")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ValueError("weights and biases must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @property
    def feature_count(self) -> int:
        return self.weights.shape[0]

    @property
    def input_dim(self) -> int:
        return self.weights.shape[1]


def sample_rff(n_features: int, input_dim: int, lengthscale: float,
               seed: int) -> FeatureMap:
    """Sample cosine features approximating the Gaussian kernel of the given
    lengthscale: rows of W are N(0, I/lengthscale^2), biases are U[0, 2*pi).

    Draw order (W first, then biases) is fixed for reproducibility.
    """
    if n_features < 1 or input_dim < 1:
        raise ValueError("n_features and input_dim must be >= 1")
    if not lengthscale > 0:
        raise ValueError(f"lengthscale must be positive, got {lengthscale}")
    rng = rng_from_seed(seed)
    w = rng.standard_normal((n_features, input_dim)) / lengthscale
    b = rng.uniform(0.0, 2.0 * np.pi, size=n_features)
    return FeatureMap(kind="rff", weights=w, biases=b, activation="cos")


def sample_elm(n_features: int, input_dim: int, activation: str = "tanh",
               seed: int = 0) -> FeatureMap:
    """Sample a fixed random hidden layer: rows of W are N(0, I/d), biases
    are standard normal. Any activation is allowed."""
    if n_features < 1 or input_dim < 1:
        raise ValueError("n_features and input_dim must be >= 1")
    rng = rng_from_seed(seed)
    w = rng.standard_normal((n_features, input_dim)) / math.sqrt(input_dim)
    b = rng.standard_normal(n_features)
    return FeatureMap(kind="elm", weights=w, biases=b, activation=activation)


def atomic_map(weights, biases, activation: str) -> FeatureMap:
    """Wrap user-supplied hidden parameters without sampling."""
    return FeatureMap(kind="atomic", weights=np.asarray(weights, dtype=float),
                      biases=np.asarray(biases, dtype=float), activation=activation)


def passthrough_map(dim: int) -> FeatureMap:
    """Identity feature map (features equal inputs); composition-test helper,
    not exposed on the CLI."""
    return atomic_map(np.eye(dim), np.zeros(dim), "identity")


def evaluate_features(fmap: FeatureMap, x: np.ndarray) -> np.ndarray:
    """Evaluate the map on a batch: returns Phi with Phi[j, i] = act(W_i . x_j + b_i).

    ``x`` must be (M, d); the result is (M, K). M = 0 yields an empty matrix.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"inputs must be 2-D (M, d), got shape {x.shape}")
    if x.shape[1] != fmap.input_dim:
        raise ValueError(
            f"input dimension {x.shape[1]} does not match map dimension {fmap.input_dim}"
        )
    act = ACTIVATIONS[fmap.activation]
    return act(x @ fmap.weights.T + fmap.biases)
