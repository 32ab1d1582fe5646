import numpy as np
import pytest

from fggcd.hierarchy import (
    Dendrogram,
    average_linkage,
    cosine_distances,
    optimal_cut,
    penalized_silhouette,
    silhouette_score,
)

from helpers import unit_rows


# --------------------------------------------------------------- test oracles


def naive_average_linkage(dist):
    """Independent O(n^3) agglomerative implementation: returns the merge
    heights (chronological) and the cophenetic matrix."""
    n = dist.shape[0]
    clusters = {i: [i] for i in range(n)}
    next_id = n
    heights = []
    coph = np.zeros((n, n))
    while len(clusters) > 1:
        ids = sorted(clusters)
        best = None
        for ai in range(len(ids)):
            for bi in range(ai + 1, len(ids)):
                a, b = ids[ai], ids[bi]
                s = 0.0
                for x in clusters[a]:
                    for y in clusters[b]:
                        s += dist[x, y]
                d = s / (len(clusters[a]) * len(clusters[b]))
                if best is None or (d, a, b) < best:
                    best = (d, a, b)
        d, a, b = best
        for x in clusters[a]:
            for y in clusters[b]:
                coph[x, y] = coph[y, x] = d
        clusters[next_id] = clusters.pop(a) + clusters.pop(b)
        heights.append(d)
        next_id += 1
    return heights, coph


def naive_silhouette(dist, labels):
    n = dist.shape[0]
    vals = []
    for i in range(n):
        mine = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not mine:
            vals.append(0.0)
            continue
        a = sum(dist[i, j] for j in mine) / len(mine)
        b = min(
            sum(dist[i, j] for j in range(n) if labels[j] == c) / sum(1 for j in range(n) if labels[j] == c)
            for c in set(labels.tolist())
            if c != labels[i]
        )
        vals.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return sum(vals) / n


def cophenetic_from(tree: Dendrogram, dist_shape):
    members = {i: [i] for i in range(tree.num_leaves)}
    coph = np.zeros((tree.num_leaves, tree.num_leaves))
    for k, merge in enumerate(tree.merges):
        left = members.pop(merge.left)
        right = members.pop(merge.right)
        for x in left:
            for y in right:
                coph[x, y] = coph[y, x] = merge.height
        members[tree.num_leaves + k] = left + right
    return coph


# ------------------------------------------------------------------ dendrogram


def test_identical_vectors_merge_at_zero():
    v = unit_rows(np.array([[1.0, 2.0], [1.0, 2.0]]))
    tree = average_linkage(cosine_distances(v))
    assert len(tree.merges) == 1
    assert tree.merges[0].height == pytest.approx(0.0, abs=1e-12)


def test_three_point_merge_order():
    dist = np.array(
        [
            [0.0, 0.1, 0.9],
            [0.1, 0.0, 0.9],
            [0.9, 0.9, 0.0],
        ]
    )
    tree = average_linkage(dist)
    assert tree.merges[0].height == pytest.approx(0.1)
    assert tree.merges[1].height == pytest.approx(0.9)
    assert {tree.merges[0].left, tree.merges[0].right} == {0, 1}


@pytest.mark.parametrize("seed", range(4))
def test_cophenetic_matches_naive_oracle(seed):
    rng = np.random.default_rng(seed)
    v = unit_rows(rng.normal(size=(8, 5)))
    dist = cosine_distances(v)
    tree = average_linkage(dist)
    heights, coph_oracle = naive_average_linkage(dist)
    got = [m.height for m in tree.merges]
    assert np.abs(np.array(got) - np.array(heights)).max() < 1e-12
    assert np.abs(cophenetic_from(tree, dist.shape) - coph_oracle).max() < 1e-12


def test_cannot_link_defers_same_origin_merges():
    # v0 and v1 are nearly identical but share an origin; with the rule on,
    # the low merge between them is blocked and the tree starts elsewhere.
    v = unit_rows(np.array([[1.0, 0.0], [0.9999, 0.01], [0.0, 1.0]]))
    dist = cosine_distances(v)
    origins = np.array([0, 0, 1])

    free = average_linkage(dist)
    assert {free.merges[0].left, free.merges[0].right} == {0, 1}

    constrained = average_linkage(dist, origins=origins, min_link_height=0.05)
    assert {constrained.merges[0].left, constrained.merges[0].right} != {0, 1}


def test_cannot_link_waived_when_nothing_else_remains():
    v = unit_rows(np.array([[1.0, 0.0], [0.9999, 0.01]]))
    dist = cosine_distances(v)
    tree = average_linkage(dist, origins=np.array([0, 0]), min_link_height=0.05)
    assert len(tree.merges) == 1  # still produces a full tree


def test_heights_monotone():
    rng = np.random.default_rng(17)
    v = unit_rows(rng.normal(size=(12, 4)))
    tree = average_linkage(cosine_distances(v))
    heights = [m.height for m in tree.merges]
    assert all(a <= b + 1e-12 for a, b in zip(heights, heights[1:]))


# ------------------------------------------------------------------ silhouette


@pytest.mark.parametrize("seed", range(3))
def test_silhouette_matches_direct_definition(seed):
    rng = np.random.default_rng(seed)
    v = unit_rows(rng.normal(size=(10, 4)))
    dist = cosine_distances(v)
    labels = rng.integers(0, 3, size=10)
    assert silhouette_score(dist, labels) == pytest.approx(naive_silhouette(dist, labels), abs=1e-12)


def test_penalty_formula():
    dist = np.zeros((8, 8))
    labels = np.arange(8)  # 8 singleton clusters, silhouette contribution 0
    num_known = 2
    lam = 0.25
    # N_clust = 8 = num_known + 6 -> penalty = 4 * lam
    assert penalized_silhouette(dist, labels, num_known, lam) == pytest.approx(-4 * lam)
    labels4 = np.repeat(np.arange(4), 2)  # N_clust = num_known + 2 -> no penalty
    assert penalized_silhouette(dist, labels4, num_known, lam) == pytest.approx(
        silhouette_score(dist, labels4)
    )


# ------------------------------------------------------------------ optimal cut


def test_two_blob_pool_yields_two_candidates_at_means():
    rng = np.random.default_rng(5)
    blob1 = unit_rows(np.array([1.0, 0.2, 0.0]) + 0.01 * rng.normal(size=(6, 3)))
    blob2 = unit_rows(np.array([-0.3, -1.0, 0.5]) + 0.01 * rng.normal(size=(6, 3)))
    vectors = np.vstack([blob1, blob2])
    densities = np.full(12, 7)
    theta, labels, centers = optimal_cut(vectors, densities, num_known=3, penalty_weight=0.1)
    assert centers.shape[0] == 2
    assert len(set(labels[:6].tolist())) == 1 and len(set(labels[6:].tolist())) == 1
    for blob in (blob1, blob2):
        mean = unit_rows(blob.mean(axis=0)[None, :])[0]
        best = max(float(c @ mean) for c in centers)
        assert best > 1 - 1e-8


@pytest.mark.parametrize("seed", range(6))
def test_chosen_cut_matches_exhaustive_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    group_centers = unit_rows(rng.normal(size=(3, 4)))
    pool = int(rng.integers(9, 16))  # up to 15 members
    vectors = unit_rows(
        np.vstack([group_centers[rng.integers(0, 3)] + 0.15 * rng.normal(size=4) for _ in range(pool)])
    )
    densities = rng.integers(6, 20, size=pool)
    num_known, lam = 2, 0.1

    theta, labels, centers = optimal_cut(vectors, densities, num_known, lam)
    dist = cosine_distances(vectors)
    chosen = naive_silhouette(dist, labels) - lam * max(0, len(set(labels.tolist())) - (num_known + 2))

    # oracle: evaluate every cut of an independently built dendrogram
    heights, _ = naive_average_linkage(dist)
    tree = average_linkage(dist)
    best = -np.inf
    for h in sorted(set(m.height for m in tree.merges)):
        cand = tree.cut_below(h)
        k = len(set(cand.tolist()))
        if k < 2:
            continue
        score = naive_silhouette(dist, cand) - lam * max(0, k - (num_known + 2))
        best = max(best, score)
    assert chosen == pytest.approx(best, abs=1e-12)


def test_single_member_pool_is_empty():
    theta, labels, centers = optimal_cut(unit_rows(np.ones((1, 3))), np.array([8]), 2, 0.1)
    assert centers.shape[0] == 0


def test_candidate_centers_are_density_weighted():
    a = np.array([1.0, 0.0])
    b = np.array([0.8, 0.6])
    far = unit_rows(np.array([[-1.0, 0.0], [-0.995, 0.0998]]))
    vectors = np.vstack([a, b, far])
    theta, labels, centers = optimal_cut(vectors, np.array([1, 3, 5, 5]), 0, 0.0)
    assert centers.shape[0] == 2
    expected = (1 * a + 3 * b) / 4.0
    expected = expected / np.linalg.norm(expected)
    best = max(float(c @ expected) for c in centers)
    assert best > 1 - 1e-12
