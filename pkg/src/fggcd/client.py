"""One client's local round: reliability scoring, the three-part loss,
full-batch training, and local category discovery.

A client never sees cross-client edges or other clients' data; everything it
uploads is derived from its own subgraph plus the broadcast model and
prototype buffer.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from . import autodiff as ad
from .autodiff import Tensor
from .data import ROLE_LABELED, ROLE_UNLABELED
from .kmeans import kmeans
from .model import GcnModel, encode
from .optim import Adam

log = logging.getLogger(__name__)

TRUNCATED_SIMILARITY = 1e-8  # stands in for exp(sim/tau) on rejected positive pairs


class ClientDivergenceError(RuntimeError):
    """Local optimization produced a non-finite loss."""


# ------------------------------------------------------------------- inputs


@dataclass(frozen=True)
class ClientContext:
    """Immutable per-client slice of the experiment."""

    client_id: int
    features: np.ndarray  # (n_i, d)
    adj: np.ndarray  # normalized dense adjacency (n_i, n_i)
    edges: np.ndarray  # (k, 2) local node ids, u < v
    labels: np.ndarray  # (n_i,) global class ids (hidden unless labeled)
    roles: np.ndarray  # (n_i,) ROLE_* values

    @property
    def num_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def labeled_idx(self) -> np.ndarray:
        return np.flatnonzero(self.roles == ROLE_LABELED)

    @property
    def unlabeled_idx(self) -> np.ndarray:
        return np.flatnonzero(self.roles == ROLE_UNLABELED)

    @functools.cached_property
    def neighbor_lists(self) -> tuple[list[int], ...]:
        lists: tuple[list[int], ...] = tuple([] for _ in range(self.num_nodes))
        for u, v in self.edges:
            lists[u].append(int(v))
            lists[v].append(int(u))
        return lists


@dataclass(frozen=True)
class LossSettings:
    tau: float = 0.1
    tau_sharp: float = 0.05
    alpha: float = 1.0
    beta: float = 1.0
    include_unsup: bool = True
    uniform_tpr_weights: bool = False  # ablation: w_v == 1 inside the unsupervised flow
    max_negatives: int = 64
    eps: float = 1e-8


@dataclass
class LocalCluster:
    centroid: np.ndarray  # unit norm
    density: int
    avg_tpr: float
    known_class: int | None = None  # None marks a novel candidate


@dataclass
class LabeledClassMean:
    class_id: int
    mean: np.ndarray  # unit norm
    count: int
    avg_tpr: float


@dataclass
class LocalDiscovery:
    known_clusters: list[LocalCluster] = field(default_factory=list)
    novel_clusters: list[LocalCluster] = field(default_factory=list)
    labeled_means: list[LabeledClassMean] = field(default_factory=list)
    client_avg_tpr: float = 0.0


@dataclass
class ClientReport:
    client_id: int
    num_nodes: int
    num_labeled: int
    num_unlabeled: int
    params: list[np.ndarray]
    discovery: LocalDiscovery
    loss_sup: float = 0.0
    loss_unsup: float = 0.0
    loss_gcl: float = 0.0


# ----------------------------------------------------- reliability scoring


def compute_confidence(probs: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    """1 - normalized Shannon entropy of each probability row."""
    c = probs.shape[1]
    entropy = -(probs * np.log(probs + eps)).sum(axis=1)
    s = 1.0 - entropy / max(np.log(c), eps)
    return np.clip(s, 0.0, 1.0)


def compute_smoothness(z: np.ndarray, edges: np.ndarray, num_nodes: int) -> np.ndarray:
    """Mean clipped cosine between each node and its neighbors; isolated
    nodes score 0."""
    if edges.shape[0] == 0:
        return np.zeros(num_nodes)
    src = np.concatenate([edges[:, 0], edges[:, 1]]).astype(np.int64)
    dst = np.concatenate([edges[:, 1], edges[:, 0]]).astype(np.int64)
    sums = _kernels.clipped_edge_dot_sums(np.ascontiguousarray(z), src, dst, num_nodes)
    degree = np.bincount(src, minlength=num_nodes)
    return np.clip(sums / np.maximum(1, degree), 0.0, 1.0)


def compute_tpr(s_conf: np.ndarray, s_homo: np.ndarray) -> np.ndarray:
    """Reliability gate: both confidence and smoothness must be high."""
    return s_conf * s_homo


def dynamic_threshold(confidences: np.ndarray, alpha: float) -> float:
    """Floor-bounded batch-adaptive pseudo-label acceptance threshold."""
    return float(max(0.5, confidences.mean() + alpha * confidences.std()))


def relaxed_cluster_count(num_unlabeled: int, k_max: int) -> int:
    return max(2, min(k_max, num_unlabeled // 3))


# ---------------------------------------------------------------- the losses


def _row_dots(z: Tensor, a: np.ndarray, b: np.ndarray) -> Tensor:
    """Per-pair embedding dot products as an (m, 1) tape column."""
    ones = ad.constant(np.ones((z.shape[1], 1)))
    return ad.mul(ad.gather_rows(z, a), ad.gather_rows(z, b)) @ ones


def _cross_entropy_rows(logits: Tensor, targets: np.ndarray) -> Tensor:
    """Per-row softmax cross-entropy, (m, 1)."""
    rows = np.arange(targets.shape[0])
    return ad.sub(ad.logsumexp_rows(logits), ad.gather_pairs(logits, rows, targets))


def supervised_loss(
    z: Tensor,
    labeled_idx: np.ndarray,
    target_rows: np.ndarray,
    prototypes: np.ndarray,
    tau: float,
) -> Tensor:
    """Mean prototype-alignment cross-entropy over labeled nodes."""
    if labeled_idx.size == 0:
        return ad.constant(0.0)
    if prototypes.shape[0] == 1:
        return ad.constant(0.0)  # degenerate one-class softmax
    logits = ad.scale(ad.gather_rows(z, labeled_idx) @ ad.constant(prototypes.T), 1.0 / tau)
    return ad.mean_all(_cross_entropy_rows(logits, target_rows))


def unsupervised_loss(
    z: Tensor,
    unlabeled_idx: np.ndarray,
    pseudo_rows: np.ndarray,
    gate: np.ndarray,
    prototypes: np.ndarray,
    tau: float,
) -> Tensor:
    """Pseudo-label alignment, gated per node by w_v * M_v and averaged over
    the whole unlabeled set (masked-out nodes still count in the mean)."""
    if unlabeled_idx.size == 0:
        return ad.constant(0.0)
    keep = np.flatnonzero(gate > 0.0)
    if keep.size == 0:
        return ad.constant(0.0)
    idx = unlabeled_idx[keep]
    logits = ad.scale(ad.gather_rows(z, idx) @ ad.constant(prototypes.T), 1.0 / tau)
    ce = _cross_entropy_rows(logits, pseudo_rows[keep])
    weighted = ad.mul(ce, ad.constant(gate[keep].reshape(-1, 1)))
    return ad.scale(ad.sum_all(weighted), 1.0 / unlabeled_idx.size)


def sample_negatives(
    num_nodes: int,
    edges: np.ndarray,
    anchors: np.ndarray,
    max_negatives: int,
    rng: np.random.Generator,
    neighbor_lists: tuple[list[int], ...] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded non-neighbor sample per anchor, capped at max_negatives.

    Uses the random-keys trick: every candidate gets a uniform key, banned
    slots get +inf, and the smallest keys per row form an exact uniform
    sample without replacement.
    """
    take = min(max_negatives, num_nodes - 1)
    if take <= 0 or anchors.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if neighbor_lists is None:
        lists: tuple[list[int], ...] = tuple([] for _ in range(num_nodes))
        for u, v in edges:
            lists[u].append(int(v))
            lists[v].append(int(u))
        neighbor_lists = lists

    keys = rng.random((anchors.size, num_nodes))
    for row, v in enumerate(anchors):
        keys[row, neighbor_lists[v]] = np.inf
        keys[row, v] = np.inf

    picked = np.argpartition(keys, kth=take - 1, axis=1)[:, :take]
    finite = np.isfinite(np.take_along_axis(keys, picked, axis=1))
    counts = finite.sum(axis=1)
    src = np.repeat(anchors.astype(np.int64), counts)
    dst = picked[finite].astype(np.int64)
    return src, dst


def contrastive_loss(
    z: Tensor,
    num_nodes: int,
    edges: np.ndarray,
    truncate_pair: np.ndarray,
    neg_src: np.ndarray,
    neg_dst: np.ndarray,
    tau: float,
) -> Tensor:
    """Neighborhood InfoNCE with false-positive truncation.

    Confident cross-label edges keep a vanishing positive similarity so the
    loss stops pulling those endpoints together; negatives are non-neighbors.
    `truncate_pair` flags each directed edge occurrence (2 per edge).
    """
    if edges.shape[0] == 0:
        return ad.constant(0.0)
    src = np.concatenate([edges[:, 0], edges[:, 1]]).astype(np.int64)
    dst = np.concatenate([edges[:, 1], edges[:, 0]]).astype(np.int64)

    pos = ad.exp(ad.scale(_row_dots(z, src, dst), 1.0 / tau))
    t = truncate_pair.astype(np.float64).reshape(-1, 1)
    s_pos = ad.add(ad.mul(pos, ad.constant(1.0 - t)), ad.constant(t * TRUNCATED_SIMILARITY))

    if neg_src.size:
        neg = ad.exp(ad.scale(_row_dots(z, neg_src, neg_dst), 1.0 / tau))
        neg_sums = ad.segment_sum(neg, neg_src, num_nodes)
        denom = ad.add(s_pos, ad.gather_rows(neg_sums, src))
    else:
        denom = s_pos

    per_pair = ad.sub(ad.log(denom), ad.log(s_pos))
    degree = np.bincount(src, minlength=num_nodes).astype(np.float64)
    inv_deg = ad.constant((1.0 / np.maximum(1.0, degree))[src].reshape(-1, 1))
    return ad.scale(ad.sum_all(ad.mul(per_pair, inv_deg)), 1.0 / num_nodes)


# ------------------------------------------------------------- local round


def _stats_pass(
    ctx: ClientContext,
    z: np.ndarray,
    prototypes: np.ndarray,
    class_to_row: dict[int, int],
    settings: LossSettings,
) -> dict:
    """Frozen per-epoch quantities: reliability scores, pseudo-labels, masks,
    and the semantic labels feeding the contrastive truncation rule."""
    n = ctx.num_nodes
    probs = _softmax_np(z @ prototypes.T / settings.tau)
    s_conf = compute_confidence(probs, settings.eps)
    s_homo = compute_smoothness(z, ctx.edges, n)
    w = compute_tpr(s_conf, s_homo)

    sharp = _softmax_np(z @ prototypes.T / settings.tau_sharp)
    pseudo = sharp.argmax(axis=1)
    q = sharp.max(axis=1)

    labeled = ctx.roles == ROLE_LABELED
    unlabeled_idx = ctx.unlabeled_idx
    if unlabeled_idx.size:
        gamma = dynamic_threshold(q[unlabeled_idx], settings.alpha)
    else:
        gamma = 1.0

    confident = np.zeros(n, dtype=bool)
    confident[labeled] = True
    confident[~labeled] = q[~labeled] > gamma

    semantic = pseudo.copy()
    semantic[labeled] = [class_to_row[int(c)] for c in ctx.labels[labeled]]

    return {
        "w": w,
        "s_conf": s_conf,
        "s_homo": s_homo,
        "pseudo": semantic,
        "mask": confident,
        "gamma": gamma,
    }


def _softmax_np(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def build_total_loss(
    ctx: ClientContext,
    z: Tensor,
    stats: dict,
    prototypes: np.ndarray,
    class_to_row: dict[int, int],
    settings: LossSettings,
    rng: np.random.Generator,
) -> tuple[Tensor, dict[str, float]]:
    """Assemble L_sup + L_unsup + beta * L_gcl with frozen coefficients."""
    labeled_idx = ctx.labeled_idx
    target_rows = np.array([class_to_row[int(c)] for c in ctx.labels[labeled_idx]], dtype=np.int64)
    l_sup = supervised_loss(z, labeled_idx, target_rows, prototypes, settings.tau)

    unlabeled_idx = ctx.unlabeled_idx
    if settings.include_unsup and unlabeled_idx.size:
        w = np.ones_like(stats["w"]) if settings.uniform_tpr_weights else stats["w"]
        gate = w[unlabeled_idx] * stats["mask"][unlabeled_idx]
        l_unsup = unsupervised_loss(
            z, unlabeled_idx, stats["pseudo"][unlabeled_idx], gate, prototypes, settings.tau
        )
    else:
        l_unsup = ad.constant(0.0)

    if settings.beta != 0.0 and ctx.edges.shape[0] > 0:
        src = np.concatenate([ctx.edges[:, 0], ctx.edges[:, 1]])
        dst = np.concatenate([ctx.edges[:, 1], ctx.edges[:, 0]])
        mask, semantic = stats["mask"], stats["pseudo"]
        truncate = mask[src] & mask[dst] & (semantic[src] != semantic[dst])
        anchors = np.unique(src)
        neg_src, neg_dst = sample_negatives(
            ctx.num_nodes, ctx.edges, anchors, settings.max_negatives, rng,
            neighbor_lists=ctx.neighbor_lists,
        )
        l_gcl = contrastive_loss(z, ctx.num_nodes, ctx.edges, truncate, neg_src, neg_dst, settings.tau)
    else:
        l_gcl = ad.constant(0.0)

    total = ad.add(ad.add(l_sup, l_unsup), ad.scale(l_gcl, settings.beta))
    parts = {
        "sup": l_sup.item(),
        "unsup": l_unsup.item(),
        "gcl": 0.0 if settings.beta == 0.0 else l_gcl.item(),
    }
    return total, parts


def local_update(
    ctx: ClientContext,
    model: GcnModel,
    prototypes: np.ndarray,
    class_to_row: dict[int, int],
    settings: LossSettings,
    epochs: int,
    optimizer: Adam,
    rng: np.random.Generator,
) -> dict[str, float]:
    """Full-batch local training; returns the mean loss decomposition."""
    totals = {"sup": 0.0, "unsup": 0.0, "gcl": 0.0}
    for _ in range(epochs):
        z = encode(model, ctx.adj, ctx.features, settings.eps)
        stats = _stats_pass(ctx, z.data, prototypes, class_to_row, settings)
        loss, parts = build_total_loss(ctx, z, stats, prototypes, class_to_row, settings, rng)
        if not np.isfinite(loss.item()):
            raise ClientDivergenceError(
                f"client {ctx.client_id}: non-finite loss {loss.item()!r}"
            )
        optimizer.zero_grad()
        ad.backward(loss)
        optimizer.step()
        for key in totals:
            totals[key] += parts[key]
    if epochs > 0:
        for key in totals:
            totals[key] /= epochs
    return totals


def local_discover(
    z: np.ndarray,
    w: np.ndarray,
    ctx: ClientContext,
    known_prototypes: np.ndarray,
    known_class_ids: list[int],
    tau_base: float,
    tau_density: float,
    k_max: int,
    rng: np.random.Generator,
) -> LocalDiscovery:
    """Cluster unlabeled embeddings, tag clusters as known/novel, and collect
    labeled class means. Novel candidates below the density floor are dropped."""
    out = LocalDiscovery(client_avg_tpr=float(w.mean()) if w.size else 0.0)

    labeled_idx = ctx.labeled_idx
    for cls in sorted({int(c) for c in ctx.labels[labeled_idx]}):
        members = labeled_idx[ctx.labels[labeled_idx] == cls]
        mean = z[members].mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm > 0:
            mean = mean / norm
        out.labeled_means.append(
            LabeledClassMean(cls, mean, int(members.size), float(w[members].mean()))
        )

    unlabeled_idx = ctx.unlabeled_idx
    if unlabeled_idx.size < 2:
        return out

    k = relaxed_cluster_count(unlabeled_idx.size, k_max)
    centers, assign, _ = kmeans(z[unlabeled_idx], k, rng)

    clusters: list[LocalCluster] = []
    for j in range(k):
        members = np.flatnonzero(assign == j)
        if members.size == 0:
            continue
        centroid = centers[j]
        norm = np.linalg.norm(centroid)
        if norm == 0:
            continue
        clusters.append(
            LocalCluster(
                centroid=centroid / norm,
                density=int(members.size),
                avg_tpr=float(w[unlabeled_idx[members]].mean()),
            )
        )
    if not clusters:
        return out

    sims = np.array(
        [float((known_prototypes @ c.centroid).max()) for c in clusters]
    )
    nearest = [int((known_prototypes @ c.centroid).argmax()) for c in clusters]
    threshold = max(tau_base, float(sims.mean()))
    for cluster, sim, near in zip(clusters, sims, nearest):
        if sim > threshold:
            cluster.known_class = known_class_ids[near]
            out.known_clusters.append(cluster)
        elif cluster.density > tau_density:
            out.novel_clusters.append(cluster)
    return out


def run_client_round(
    ctx: ClientContext,
    global_params: list[np.ndarray],
    prototypes: np.ndarray,
    class_to_row: dict[int, int],
    known_prototypes: np.ndarray,
    known_class_ids: list[int],
    settings: LossSettings,
    epochs: int,
    lr: float,
    weight_decay: float,
    tau_base: float,
    tau_density: float,
    k_max: int,
    rng: np.random.Generator,
) -> ClientReport:
    """Algorithm executed by one client in one communication round."""
    if ctx.labeled_idx.size == 0:
        log.warning("client %d has no labeled nodes; it contributes no supervised signal", ctx.client_id)
    model = GcnModel.from_param_arrays(global_params)
    optimizer = Adam(model.params, lr=lr, weight_decay=weight_decay)

    losses = local_update(ctx, model, prototypes, class_to_row, settings, epochs, optimizer, rng)

    z = encode(model, ctx.adj, ctx.features, settings.eps).data
    probs = _softmax_np(z @ prototypes.T / settings.tau)
    w = compute_tpr(
        compute_confidence(probs, settings.eps),
        compute_smoothness(z, ctx.edges, ctx.num_nodes),
    )
    discovery = local_discover(
        z, w, ctx, known_prototypes, known_class_ids, tau_base, tau_density, k_max, rng
    )
    return ClientReport(
        client_id=ctx.client_id,
        num_nodes=ctx.num_nodes,
        num_labeled=int(ctx.labeled_idx.size),
        num_unlabeled=int(ctx.unlabeled_idx.size),
        params=model.param_arrays(),
        discovery=discovery,
        loss_sup=losses["sup"],
        loss_unsup=losses["unsup"],
        loss_gcl=losses["gcl"],
    )


def bootstrap_report(
    ctx: ClientContext,
    global_params: list[np.ndarray],
    eps: float = 1e-8,
) -> ClientReport:
    """Round-0 pass: embed with the broadcast model and report labeled class
    means only. No prototypes exist yet, so confidence defaults to 1 and the
    reliability score reduces to neighborhood smoothness."""
    model = GcnModel.from_param_arrays(global_params)
    z = encode(model, ctx.adj, ctx.features, eps).data
    w = compute_smoothness(z, ctx.edges, ctx.num_nodes)

    discovery = LocalDiscovery(client_avg_tpr=float(w.mean()) if w.size else 0.0)
    labeled_idx = ctx.labeled_idx
    for cls in sorted({int(c) for c in ctx.labels[labeled_idx]}):
        members = labeled_idx[ctx.labels[labeled_idx] == cls]
        mean = z[members].mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm > 0:
            mean = mean / norm
        discovery.labeled_means.append(
            LabeledClassMean(cls, mean, int(members.size), float(w[members].mean()))
        )
    return ClientReport(
        client_id=ctx.client_id,
        num_nodes=ctx.num_nodes,
        num_labeled=int(labeled_idx.size),
        num_unlabeled=int(ctx.unlabeled_idx.size),
        params=[p.copy() for p in global_params],
        discovery=discovery,
    )
