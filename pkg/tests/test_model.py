import numpy as np
import pytest

from fggcd.model import GcnModel, encode, normalized_adjacency, prototype_logits
from fggcd.rng import rng_for

from helpers import unit_rows


def _path_graph_edges(n):
    return np.array([(i, i + 1) for i in range(n - 1)], dtype=np.int64)


def test_isolated_node_adjacency_is_identity():
    adj = normalized_adjacency(1, np.empty((0, 2), dtype=np.int64))
    assert np.array_equal(adj, np.array([[1.0]]))


def test_isolated_node_embedding_unit_norm():
    rng = rng_for(0, "t")
    model = GcnModel(4, 8, 3, rng)
    adj = normalized_adjacency(1, np.empty((0, 2), dtype=np.int64))
    z = encode(model, adj, rng.normal(size=(1, 4))).data
    assert abs(np.linalg.norm(z[0]) - 1.0) < 1e-9


def test_symmetric_pair_gets_identical_embeddings():
    rng = rng_for(1, "t")
    model = GcnModel(3, 6, 4, rng)
    adj = normalized_adjacency(2, np.array([[0, 1]]))
    x = np.tile(rng.normal(size=(1, 3)), (2, 1))
    z = encode(model, adj, x).data
    assert np.abs(z[0] - z[1]).max() < 1e-12


def test_forward_matches_unrolled_oracle():
    rng = rng_for(2, "t")
    model = GcnModel(4, 5, 3, rng)
    edges = _path_graph_edges(5)
    adj = normalized_adjacency(5, edges)
    x = rng.normal(size=(5, 4))

    # step-by-step reconstruction with plain numpy
    a = np.eye(5)
    for u, v in edges:
        a[u, v] = a[v, u] = 1.0
    dis = 1.0 / np.sqrt(a.sum(1))
    a_hat = a * dis[:, None] * dis[None, :]
    h = np.maximum(a_hat @ x @ model.W1.data, 0.0)
    z = a_hat @ h @ model.W2.data
    z = z / np.maximum(np.linalg.norm(z, axis=1, keepdims=True), 1e-8)

    out = encode(model, adj, x).data
    assert np.abs(out - z).max() < 1e-10


def test_embedding_rows_unit_norm():
    rng = rng_for(3, "t")
    model = GcnModel(6, 8, 4, rng)
    edges = _path_graph_edges(7)
    z = encode(model, normalized_adjacency(7, edges), rng.normal(size=(7, 6))).data
    norms = np.linalg.norm(z, axis=1)
    assert np.all((np.abs(norms - 1.0) < 1e-9) | (norms == 0.0))


def test_forward_permutation_equivariant():
    rng = rng_for(4, "t")
    model = GcnModel(3, 6, 4, rng)
    edges = np.array([(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)])
    x = rng.normal(size=(5, 3))
    z = encode(model, normalized_adjacency(5, edges), x).data

    perm = np.array([3, 0, 4, 1, 2])  # new id of each old node
    remapped = np.stack([perm[edges[:, 0]], perm[edges[:, 1]]], axis=1)
    x_perm = np.empty_like(x)
    x_perm[perm] = x
    z_perm = encode(model, normalized_adjacency(5, remapped), x_perm).data
    assert np.abs(z_perm[perm] - z).max() < 1e-10


def test_logits_match_scaled_matmul_oracle():
    rng = rng_for(5, "t")
    model = GcnModel(3, 6, 4, rng)
    z = encode(model, normalized_adjacency(3, np.array([[0, 1]])), rng.normal(size=(3, 3)))
    protos = unit_rows(rng.normal(size=(4, 4)))
    tau = 0.1
    logits = prototype_logits(z, protos, tau).data
    assert np.abs(logits - (z.data @ protos.T) / tau).max() < 1e-12


def test_logits_peak_at_matching_prototype():
    protos = np.eye(3)
    from fggcd import autodiff as ad

    z = ad.constant(np.array([[0.0, 1.0, 0.0]]))
    logits = prototype_logits(z, protos, 0.5).data
    assert logits.argmax() == 1
    assert abs(logits[0, 1] - 2.0) < 1e-12  # 1/tau at the matching slot
    assert abs(logits[0, 0]) < 1e-12  # orthogonal prototype scores zero


def test_logits_reject_empty_buffer():
    from fggcd import autodiff as ad

    z = ad.constant(np.ones((2, 3)))
    with pytest.raises(ValueError):
        prototype_logits(z, np.empty((0, 3)), 0.1)
