"""Louvain community detection and client partitioning.

Cross-client edges are dropped when building client views: each simulated
client only observes the subgraph induced by its own nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Graph
from .rng import rng_for

_MAX_SWEEPS = 200


@dataclass(frozen=True)
class Partition:
    assignment: np.ndarray  # (n,) client id per node
    client_nodes: tuple[np.ndarray, ...]  # global node ids, ascending
    client_edges: tuple[np.ndarray, ...]  # (k, 2) client-local indices, u < v

    @property
    def num_clients(self) -> int:
        return len(self.client_nodes)


def modularity(num_nodes: int, edges: np.ndarray, labels: np.ndarray) -> float:
    """Newman modularity of an unweighted undirected graph partition."""
    m = edges.shape[0]
    if m == 0:
        return 0.0
    labels = np.asarray(labels)
    degrees = np.bincount(edges.ravel(), minlength=num_nodes).astype(np.float64)
    intra = np.bincount(
        labels[edges[:, 0]],
        weights=(labels[edges[:, 0]] == labels[edges[:, 1]]).astype(np.float64),
        minlength=labels.max() + 1,
    )
    deg_sum = np.bincount(labels, weights=degrees, minlength=labels.max() + 1)
    return float((intra / m - (deg_sum / (2.0 * m)) ** 2).sum())


def _csr(num_nodes: int, src: np.ndarray, dst: np.ndarray, wts: np.ndarray):
    order = np.lexsort((dst, src))
    src, dst, wts = src[order], dst[order], wts[order]
    indptr = np.zeros(num_nodes + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst, wts


def _one_level(num_nodes, indptr, nbrs, wts, loops, rng, resolution):
    """Local-move phase; returns (community labels, whether anything moved)."""
    degree = np.zeros(num_nodes, dtype=np.float64)
    np.add.at(degree, np.repeat(np.arange(num_nodes), np.diff(indptr)), wts)
    degree += 2.0 * loops
    m2 = degree.sum()
    if m2 <= 0:
        return np.arange(num_nodes), False

    node_comm = np.arange(num_nodes)
    comm_tot = degree.copy()
    order = rng.permutation(num_nodes)
    improved = False
    for _ in range(_MAX_SWEEPS):
        moved = False
        for v in order:
            cv = node_comm[v]
            weights_to: dict[int, float] = {}
            for idx in range(indptr[v], indptr[v + 1]):
                u = nbrs[idx]
                if u == v:
                    continue
                cu = node_comm[u]
                weights_to[cu] = weights_to.get(cu, 0.0) + wts[idx]
            comm_tot[cv] -= degree[v]
            best_comm = cv
            best_gain = weights_to.get(cv, 0.0) - resolution * comm_tot[cv] * degree[v] / m2
            for c, w in weights_to.items():
                if c == cv:
                    continue
                gain = w - resolution * comm_tot[c] * degree[v] / m2
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_comm = c
            comm_tot[best_comm] += degree[v]
            if best_comm != cv:
                node_comm[v] = best_comm
                moved = True
                improved = True
        if not moved:
            break
    return node_comm, improved


def _renumber(labels: np.ndarray) -> np.ndarray:
    """Relabel to 0..k-1 in order of first appearance."""
    seen: dict[int, int] = {}
    out = np.empty_like(labels)
    for i, c in enumerate(labels):
        if c not in seen:
            seen[c] = len(seen)
        out[i] = seen[c]
    return out


def louvain_communities(
    num_nodes: int, edges: np.ndarray, seed_rng: np.random.Generator, resolution: float = 1.0
) -> np.ndarray:
    """Multi-level Louvain on an unweighted undirected edge list."""
    if edges.shape[0] == 0:
        return np.arange(num_nodes)

    node_to_final = np.arange(num_nodes)
    cur_n = num_nodes
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    wts = np.ones(src.shape[0], dtype=np.float64)
    loops = np.zeros(num_nodes, dtype=np.float64)

    while True:
        indptr, nbrs, w = _csr(cur_n, src, dst, wts)
        comm, improved = _one_level(cur_n, indptr, nbrs, w, loops, seed_rng, resolution)
        if not improved:
            break
        comm = _renumber(comm)
        node_to_final = comm[node_to_final]
        new_n = int(comm.max()) + 1
        if new_n == cur_n:
            break
        # Aggregate: communities become nodes, intra weight becomes self-loops.
        csrc, cdst = comm[src], comm[dst]
        new_loops = np.zeros(new_n, dtype=np.float64)
        np.add.at(new_loops, comm, loops)
        intra = csrc == cdst
        np.add.at(new_loops, csrc[intra], wts[intra] / 2.0)  # both directions present
        keep = ~intra
        csrc, cdst, cw = csrc[keep], cdst[keep], wts[keep]
        # Merge parallel inter-community edges.
        key = csrc * new_n + cdst
        uniq, inv = np.unique(key, return_inverse=True)
        merged = np.zeros(uniq.shape[0], dtype=np.float64)
        np.add.at(merged, inv, cw)
        src, dst, wts = uniq // new_n, uniq % new_n, merged
        loops = new_loops
        cur_n = new_n

    return node_to_final


def louvain_partition(graph: Graph, target_clients: int, seed: int) -> Partition:
    """Louvain communities reconciled to exactly `target_clients` groups.

    Oversized community counts are reduced by merging the two smallest
    groups; undersized counts are fixed by re-running Louvain inside the
    largest group (falling back to a seeded bisection when it is indivisible).
    """
    if target_clients < 1:
        raise ValueError("target_clients must be >= 1")
    if target_clients > graph.num_nodes:
        raise ValueError("target_clients exceeds node count")

    rng = rng_for(seed, "louvain")
    labels = louvain_communities(graph.num_nodes, graph.edges, rng)
    groups = [np.flatnonzero(labels == c) for c in range(labels.max() + 1)]
    groups = [g for g in groups if g.size]

    split_round = 0
    while len(groups) != target_clients:
        if len(groups) > target_clients:
            groups.sort(key=lambda g: (g.size, int(g[0])))
            a = groups.pop(0)
            b = groups.pop(0)
            groups.append(np.sort(np.concatenate([a, b])))
        else:
            groups.sort(key=lambda g: (-g.size, int(g[0])))
            big = groups.pop(0)
            local = {int(v): i for i, v in enumerate(big)}
            mask = np.isin(graph.edges[:, 0], big) & np.isin(graph.edges[:, 1], big)
            sub_edges = np.array(
                [(local[int(u)], local[int(v)]) for u, v in graph.edges[mask]], dtype=np.int64
            ).reshape(-1, 2)
            sub_rng = rng_for(seed, "louvain-split", split_round)
            sub_labels = louvain_communities(big.size, sub_edges, sub_rng)
            split_round += 1
            if sub_labels.max() == 0:
                # Indivisible (e.g. a clique): seeded bisection.
                perm = sub_rng.permutation(big.size)
                half = (big.size + 1) // 2
                parts = [big[np.sort(perm[:half])], big[np.sort(perm[half:])]]
            else:
                parts = [big[np.flatnonzero(sub_labels == c)] for c in range(sub_labels.max() + 1)]
            groups.extend(p for p in parts if p.size)

    groups.sort(key=lambda g: int(g[0]))
    assignment = np.empty(graph.num_nodes, dtype=np.int64)
    client_nodes = []
    client_edges = []
    for cid, nodes in enumerate(groups):
        nodes = np.sort(nodes)
        assignment[nodes] = cid
        client_nodes.append(nodes)
    same = assignment[graph.edges[:, 0]] == assignment[graph.edges[:, 1]]
    for cid, nodes in enumerate(client_nodes):
        local = np.full(graph.num_nodes, -1, dtype=np.int64)
        local[nodes] = np.arange(nodes.size)
        e = graph.edges[same & (assignment[graph.edges[:, 0]] == cid)]
        client_edges.append(local[e].reshape(-1, 2))
    return Partition(
        assignment=assignment,
        client_nodes=tuple(client_nodes),
        client_edges=tuple(client_edges),
    )
