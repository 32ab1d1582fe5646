"""Stochastic block model generator for demos and the offline test dataset."""

from __future__ import annotations

import numpy as np

from .data import Graph, make_graph
from .rng import rng_for


def make_sbm_graph(
    name: str = "sbm",
    block_sizes: tuple[int, ...] = (50, 50, 50, 50, 50, 50),
    p_in: float = 0.2,
    p_out: float = 0.01,
    feature_dim: int = 16,
    noise: float = 0.6,
    seed: int = 0,
) -> Graph:
    """Homophilous planted-partition graph; block id doubles as the label.
    Features are noisy copies of a per-block center."""
    rng = rng_for(seed, "sbm")
    labels = np.repeat(np.arange(len(block_sizes)), block_sizes)
    n = labels.size

    centers = rng.normal(size=(len(block_sizes), feature_dim))
    features = centers[labels] + noise * rng.normal(size=(n, feature_dim))

    upper = np.triu_indices(n, k=1)
    same = labels[upper[0]] == labels[upper[1]]
    prob = np.where(same, p_in, p_out)
    keep = rng.random(prob.size) < prob
    pairs = np.stack([upper[0][keep], upper[1][keep]], axis=1)

    return make_graph(
        name=name,
        features=features,
        pairs=pairs,
        labels=labels,
        num_classes=len(block_sizes),
        class_names=[f"block_{i}" for i in range(len(block_sizes))],
    )
