#!/usr/bin/env python3
"""Build the tiny .npz source bundles used by the exporter tests.

Run from this directory: python3 make_fixtures.py
"""

import numpy as np


def csr_from_pairs(pairs, n):
    """Symmetric CSR adjacency from undirected pairs (self-loops kept)."""
    rows = {}
    for u, v in pairs:
        rows.setdefault(u, set()).add(v)
        if u != v:
            rows.setdefault(v, set()).add(u)
    indptr = [0]
    indices = []
    for i in range(n):
        cols = sorted(rows.get(i, ()))
        indices.extend(cols)
        indptr.append(len(indices))
    data = np.ones(len(indices), dtype=np.float32)
    return data, np.array(indices, dtype=np.int32), np.array(indptr, dtype=np.int32)


def sparse_attr(matrix):
    indptr = [0]
    indices = []
    data = []
    for row in matrix:
        nz = np.flatnonzero(row)
        indices.extend(nz.tolist())
        data.extend(row[nz].tolist())
        indptr.append(len(indices))
    return (
        np.array(data, dtype=np.float32),
        np.array(indices, dtype=np.int32),
        np.array(indptr, dtype=np.int32),
    )


def main():
    rng = np.random.default_rng(12)

    # 8-node graph, sparse attributes, includes one self-loop to exercise
    # canonicalization. 7 unique undirected edges.
    n1 = 8
    pairs1 = [(0, 1), (1, 2), (2, 3), (0, 3), (4, 5), (5, 6), (6, 7), (2, 2)]
    attr1 = rng.normal(size=(n1, 5)).astype(np.float32)
    attr1[attr1 < 0.3] = 0.0  # make it genuinely sparse
    a_data, a_idx, a_ptr = csr_from_pairs(pairs1, n1)
    f_data, f_idx, f_ptr = sparse_attr(attr1)
    np.savez(
        "tiny_sparse.npz",
        adj_data=a_data,
        adj_indices=a_idx,
        adj_indptr=a_ptr,
        adj_shape=np.array([n1, n1], dtype=np.int64),
        attr_data=f_data,
        attr_indices=f_idx,
        attr_indptr=f_ptr,
        attr_shape=np.array([n1, 5], dtype=np.int64),
        labels=np.array([0, 0, 1, 1, 2, 2, 3, 3], dtype=np.int64),
        class_names=np.array(["alpha", "beta", "gamma", "delta"]),
    )

    # 5-node graph with two components and dense attributes; compressed to
    # exercise the deflate path. Largest component is nodes {0, 1, 2}.
    n2 = 5
    pairs2 = [(0, 1), (1, 2), (3, 4)]
    a_data, a_idx, a_ptr = csr_from_pairs(pairs2, n2)
    np.savez_compressed(
        "tiny_dense.npz",
        adj_data=a_data,
        adj_indices=a_idx,
        adj_indptr=a_ptr,
        adj_shape=np.array([n2, n2], dtype=np.int64),
        attr_matrix=rng.normal(size=(n2, 3)).astype(np.float64),
        labels=np.array([0, 1, 0, 1, 1], dtype=np.int64),
    )

    print("wrote tiny_sparse.npz, tiny_dense.npz")


if __name__ == "__main__":
    main()
