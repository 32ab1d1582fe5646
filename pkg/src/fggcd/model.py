"""Two-layer graph-convolution encoder with L2-normalized embeddings."""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .autodiff import Parameter, Tensor


class GcnModel:
    """relu(A_hat X W1) -> A_hat H W2 -> row-normalize."""

    def __init__(self, num_features: int, hidden_dim: int, embed_dim: int, rng: np.random.Generator):
        self.W1 = Parameter(_glorot(num_features, hidden_dim, rng))
        self.W2 = Parameter(_glorot(hidden_dim, embed_dim, rng))

    @classmethod
    def from_param_arrays(cls, arrays: list[np.ndarray]) -> "GcnModel":
        model = cls.__new__(cls)
        model.W1 = Parameter(arrays[0].copy())
        model.W2 = Parameter(arrays[1].copy())
        return model

    @property
    def params(self) -> list[Parameter]:
        return [self.W1, self.W2]

    def param_arrays(self) -> list[np.ndarray]:
        return [p.data.copy() for p in self.params]

    def load_param_arrays(self, arrays: list[np.ndarray]) -> None:
        for p, a in zip(self.params, arrays):
            if p.data.shape != a.shape:
                raise ValueError(f"parameter shape mismatch: {p.data.shape} vs {a.shape}")
            p.data = a.copy()


def _glorot(fan_in: int, fan_out: int, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def normalized_adjacency(num_nodes: int, local_edges: np.ndarray) -> np.ndarray:
    """Dense D^{-1/2} (A + I) D^{-1/2} over a client's intra-client edges."""
    a = np.eye(num_nodes)
    for u, v in local_edges:
        a[u, v] = 1.0
        a[v, u] = 1.0
    d_inv_sqrt = 1.0 / np.sqrt(a.sum(axis=1))
    return a * d_inv_sqrt[:, None] * d_inv_sqrt[None, :]


def encode(model: GcnModel, adj: np.ndarray, features: np.ndarray, eps: float = 1e-8) -> Tensor:
    """Differentiable forward pass; every output row has unit norm."""
    adj_t = ad.constant(adj)
    x = ad.constant(features)
    h = ad.relu(adj_t @ (x @ model.W1))
    z = adj_t @ (h @ model.W2)
    return ad.l2_normalize_rows(z, eps)


def prototype_logits(z: Tensor, prototypes: np.ndarray, temperature: float) -> Tensor:
    """Cosine logits of embeddings against unit-norm prototype rows."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    prototypes = np.asarray(prototypes, dtype=np.float64)
    if prototypes.ndim != 2 or prototypes.shape[0] == 0:
        raise ValueError("prototype buffer is empty or malformed")
    return ad.scale(z @ ad.constant(prototypes.T), 1.0 / temperature)
