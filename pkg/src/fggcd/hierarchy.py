"""Average-linkage agglomerative clustering over cosine distance, plus the
count-penalized silhouette criterion used to flatten the tree.

Cluster-to-cluster distance is the mean pairwise distance between original
members (UPGMA), so merge heights never decrease and every distinct height
induces one candidate flat clustering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float


@dataclass(frozen=True)
class Dendrogram:
    num_leaves: int
    merges: tuple[Merge, ...]  # chronological; new cluster ids start at num_leaves

    def cut_below(self, height: float) -> np.ndarray:
        """Flat labels from applying every merge with height strictly below
        the given value."""
        parent = list(range(self.num_leaves + len(self.merges)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for k, merge in enumerate(self.merges):
            if merge.height < height:
                new_id = self.num_leaves + k
                parent[find(merge.left)] = new_id
                parent[find(merge.right)] = new_id
        roots: dict[int, int] = {}
        labels = np.empty(self.num_leaves, dtype=np.int64)
        for i in range(self.num_leaves):
            r = find(i)
            if r not in roots:
                roots[r] = len(roots)
            labels[i] = roots[r]
        return labels


def cosine_distances(vectors: np.ndarray) -> np.ndarray:
    """Pairwise 1 - cosine for unit-norm rows, clipped into [0, 2]."""
    d = 1.0 - vectors @ vectors.T
    np.clip(d, 0.0, 2.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def average_linkage(
    dist: np.ndarray,
    origins: np.ndarray | None = None,
    min_link_height: float = 0.0,
) -> Dendrogram:
    """Agglomerate by smallest mean inter-cluster distance (UPGMA).

    Inter-cluster distances are maintained incrementally: merging A and B
    gives d(AB, K) = (|A| d(A,K) + |B| d(B,K)) / (|A| + |B|), which equals
    the mean pairwise distance between original members. Ties break toward
    the smallest cluster-id pair.

    When `origins` is given, clusters sharing an origin id may not merge at
    heights below `min_link_height` while any unconstrained pair remains.
    """
    n = dist.shape[0]
    total = 2 * n - 1  # leaves plus every internal cluster
    work = np.full((total, total), np.inf)
    work[:n, :n] = dist
    np.fill_diagonal(work, np.inf)

    sizes = np.zeros(total, dtype=np.int64)
    sizes[:n] = 1
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    active: list[int] = list(range(n))
    merges: list[Merge] = []
    next_id = n

    def constrained(a: int, b: int) -> bool:
        oa = origins[members[a]]
        ob = origins[members[b]]
        return bool(np.isin(oa, ob).any())

    while len(active) > 1:
        sub = work[np.ix_(active, active)]
        if origins is None:
            flat = int(np.argmin(sub))
            i, j = divmod(flat, len(active))
            a, b = active[i], active[j]
            d = float(sub[i, j])
        else:
            best = None
            best_constrained = None
            for i in range(len(active)):
                for j in range(i + 1, len(active)):
                    key = (float(sub[i, j]), active[i], active[j])
                    if key[0] < min_link_height and constrained(active[i], active[j]):
                        if best_constrained is None or key < best_constrained:
                            best_constrained = key
                        continue
                    if best is None or key < best:
                        best = key
            d, a, b = best if best is not None else best_constrained

        lo, hi = min(a, b), max(a, b)
        for k in active:
            if k == lo or k == hi:
                continue
            merged = (sizes[lo] * work[lo, k] + sizes[hi] * work[hi, k]) / (sizes[lo] + sizes[hi])
            work[next_id, k] = merged
            work[k, next_id] = merged
        sizes[next_id] = sizes[lo] + sizes[hi]
        members[next_id] = members.pop(lo) + members.pop(hi)
        active.remove(lo)
        active.remove(hi)
        active.append(next_id)
        merges.append(Merge(lo, hi, d))
        next_id += 1

    return Dendrogram(num_leaves=n, merges=tuple(merges))


def silhouette_score(dist: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette with singleton clusters contributing 0."""
    n = dist.shape[0]
    uniq, inv, counts = np.unique(labels, return_inverse=True, return_counts=True)
    if uniq.size < 2:
        return 0.0
    onehot = np.zeros((n, uniq.size))
    onehot[np.arange(n), inv] = 1.0
    sums = dist @ onehot  # distance mass from each point to each cluster
    own_count = counts[inv]

    mean_other = sums / counts[None, :]
    mean_other[np.arange(n), inv] = np.inf
    b = mean_other.min(axis=1)

    with np.errstate(invalid="ignore", divide="ignore"):
        a = sums[np.arange(n), inv] / (own_count - 1)
        denom = np.maximum(a, b)
        s = np.where((own_count > 1) & (denom > 0), (b - a) / denom, 0.0)
    return float(s.sum() / n)


def penalized_silhouette(
    dist: np.ndarray, labels: np.ndarray, num_known: int, penalty_weight: float
) -> float:
    """Silhouette minus a linear penalty on cluster counts beyond
    num_known + 2."""
    n_clust = np.unique(labels).size
    return silhouette_score(dist, labels) - penalty_weight * max(0, n_clust - (num_known + 2))


def optimal_cut(
    vectors: np.ndarray,
    densities: np.ndarray,
    num_known: int,
    penalty_weight: float,
    origins: np.ndarray | None = None,
    min_link_height: float = 0.0,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Choose the merge-height cut maximizing the penalized silhouette.

    Returns (threshold, flat labels, candidate centers). Candidate centers
    are density-weighted means of cluster members, re-normalized. Ties on the
    objective resolve toward fewer clusters. With fewer than two vectors the
    result is empty.
    """
    n = vectors.shape[0]
    if n < 2:
        return 0.0, np.zeros(n, dtype=np.int64), np.empty((0, vectors.shape[1] if vectors.ndim == 2 else 0))

    dist = cosine_distances(vectors)
    tree = average_linkage(dist, origins=origins, min_link_height=min_link_height)
    heights = sorted({m.height for m in tree.merges})

    best_score = -np.inf
    best_labels: np.ndarray | None = None
    best_theta = 0.0
    for h in heights:
        labels = tree.cut_below(h)
        if np.unique(labels).size < 2:
            continue
        score = penalized_silhouette(dist, labels, num_known, penalty_weight)
        # Ascending heights mean non-increasing cluster counts, so accepting
        # exact ties keeps the smaller clustering.
        if score >= best_score:
            best_score = score
            best_labels = labels
            best_theta = h
    if best_labels is None:
        return 0.0, np.zeros(n, dtype=np.int64), np.empty((0, vectors.shape[1]))

    centers = []
    for c in range(best_labels.max() + 1):
        idx = np.flatnonzero(best_labels == c)
        weights = densities[idx].astype(np.float64)
        if weights.sum() <= 0:
            weights = np.ones(idx.size)
        center = (vectors[idx] * weights[:, None]).sum(axis=0) / weights.sum()
        norm = np.linalg.norm(center)
        if norm > 0:
            center = center / norm
        centers.append(center)
    return best_theta, best_labels, np.array(centers)
