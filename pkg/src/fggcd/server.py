"""Server side: FedAvg weight aggregation, density/reliability-weighted
prototype aggregation, hierarchical novel-category discovery, and the
EMA-smoothed prototype memory."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .client import ClientReport
from .hierarchy import optimal_cut
from .hungarian import max_assignment

STALE_AFTER_ROUNDS = 10


@dataclass
class NovelSlot:
    slot_id: int
    vector: np.ndarray
    birth_round: int
    last_matched_round: int


@dataclass
class GlobalMemory:
    """Prototype buffer: one slot per known class plus an append-only list of
    discovered novel slots. All vectors are unit-norm."""

    known_class_ids: list[int]
    known_vectors: np.ndarray  # (K, e)
    novel: list[NovelSlot] = field(default_factory=list)
    round: int = 0
    _next_slot_id: int = 0

    @property
    def num_slots(self) -> int:
        return len(self.known_class_ids) + len(self.novel)

    def prototype_matrix(self) -> np.ndarray:
        if self.novel:
            return np.vstack([self.known_vectors] + [s.vector[None, :] for s in self.novel])
        return self.known_vectors.copy()

    def class_to_row(self) -> dict[int, int]:
        return {cls: i for i, cls in enumerate(self.known_class_ids)}

    def stale_slot_ids(self) -> list[int]:
        """Novel slots never matched since birth and older than the staleness
        window. Reported only; nothing is ever deleted."""
        return [
            s.slot_id
            for s in self.novel
            if s.last_matched_round == s.birth_round
            and self.round - s.birth_round > STALE_AFTER_ROUNDS
        ]

    def to_json(self) -> dict:
        return {
            "round": self.round,
            "known": [
                {"class_id": cls, "vector": vec.tolist()}
                for cls, vec in zip(self.known_class_ids, self.known_vectors)
            ],
            "novel": [
                {
                    "slot_id": s.slot_id,
                    "vector": s.vector.tolist(),
                    "birth_round": s.birth_round,
                    "last_matched_round": s.last_matched_round,
                }
                for s in self.novel
            ],
            "stale_slot_ids": self.stale_slot_ids(),
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")


def _normalize(vec: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def aggregate_weights(reports: list[ClientReport]) -> list[np.ndarray]:
    """Node-count-weighted parameter average over participating clients."""
    if not reports:
        raise ValueError("no reports to aggregate")
    shapes = [p.shape for p in reports[0].params]
    for r in reports:
        if [p.shape for p in r.params] != shapes:
            raise ValueError(f"client {r.client_id}: parameter shape mismatch")
    total_nodes = sum(r.num_nodes for r in reports)
    out = [np.zeros(s) for s in shapes]
    for r in reports:
        coef = r.num_nodes / total_nodes
        for acc, p in zip(out, r.params):
            acc += coef * p
    return out


def _known_contributions(reports: list[ClientReport]) -> dict[int, list[tuple[float, np.ndarray]]]:
    """Per known class: (reliability * density, centroid) pairs from both the
    labeled class means and the known-tagged unlabeled clusters."""
    contrib: dict[int, list[tuple[float, np.ndarray]]] = {}
    for r in reports:
        for lm in r.discovery.labeled_means:
            contrib.setdefault(lm.class_id, []).append((lm.avg_tpr * lm.count, lm.mean))
        for cluster in r.discovery.known_clusters:
            contrib.setdefault(cluster.known_class, []).append(
                (cluster.avg_tpr * cluster.density, cluster.centroid)
            )
    return contrib


def initialize_memory(reports: list[ClientReport], known_classes: tuple[int, ...], eps: float) -> GlobalMemory:
    """Bootstrap the known slots from labeled class means."""
    contrib = _known_contributions(reports)
    vectors = []
    for cls in known_classes:
        if cls not in contrib:
            raise ValueError(f"known class {cls} has no labeled nodes on any client")
        weights = np.array([v for v, _ in contrib[cls]])
        stack = np.array([m for _, m in contrib[cls]])
        merged = (stack * weights[:, None]).sum(axis=0) / (weights.sum() + eps)
        vectors.append(_normalize(merged))
    return GlobalMemory(
        known_class_ids=list(known_classes),
        known_vectors=np.array(vectors),
        _next_slot_id=len(known_classes),
    )


def aggregate_prototypes(memory: GlobalMemory, reports: list[ClientReport], eps: float) -> None:
    """Joint density-reliability weighted update of the known slots; classes
    with no contribution this round keep their previous vector."""
    contrib = _known_contributions(reports)
    for i, cls in enumerate(memory.known_class_ids):
        entries = contrib.get(cls)
        if not entries:
            continue
        weights = np.array([v for v, _ in entries])
        if weights.sum() <= 0:
            continue
        stack = np.array([m for _, m in entries])
        merged = (stack * weights[:, None]).sum(axis=0) / (weights.sum() + eps)
        norm = np.linalg.norm(merged)
        if norm > 0:
            memory.known_vectors[i] = merged / norm


@dataclass(frozen=True)
class DiscoveryPool:
    """Novel-tagged, density-filtered sub-prototypes collected this round."""

    centroids: np.ndarray  # (p, e)
    densities: np.ndarray  # (p,)
    avg_tprs: np.ndarray  # (p,)
    origins: np.ndarray  # (p,) client ids


def build_discovery_pool(reports: list[ClientReport]) -> DiscoveryPool:
    cents, dens, tprs, orig = [], [], [], []
    for r in reports:
        for cluster in r.discovery.novel_clusters:
            cents.append(cluster.centroid)
            dens.append(cluster.density)
            tprs.append(cluster.avg_tpr)
            orig.append(r.client_id)
    if not cents:
        return DiscoveryPool(
            np.empty((0, 0)), np.empty(0, dtype=np.int64), np.empty(0), np.empty(0, dtype=np.int64)
        )
    return DiscoveryPool(
        np.array(cents), np.array(dens, dtype=np.int64), np.array(tprs), np.array(orig, dtype=np.int64)
    )


def match_prototypes(
    candidates: np.ndarray, historical: np.ndarray, tau_base: float
) -> tuple[list[tuple[int, int]], list[bool]]:
    """Hungarian matching of candidate centers to historical novel slots.

    A matched pair is valid only when its similarity clears both the base
    threshold and the mean of the whole similarity matrix.
    """
    if candidates.shape[0] == 0 or historical.shape[0] == 0:
        return [], []
    sims = candidates @ historical.T
    pairs = max_assignment(sims)
    bar = max(tau_base, float(sims.mean()))
    valid = [bool(sims[r, c] > bar) for r, c in pairs]
    return pairs, valid


def route_memory(
    memory: GlobalMemory,
    candidates: np.ndarray,
    pairs: list[tuple[int, int]],
    valid: list[bool],
    rho: float,
) -> None:
    """EMA-update matched novel slots, register unmatched candidates as new
    slots, and leave unmatched history untouched."""
    matched_candidates = set()
    for (r, c), ok in zip(pairs, valid):
        if not ok:
            continue
        slot = memory.novel[c]
        slot.vector = _normalize(rho * slot.vector + (1.0 - rho) * candidates[r])
        slot.last_matched_round = memory.round
        matched_candidates.add(r)
    for r in range(candidates.shape[0]):
        if r in matched_candidates:
            continue
        memory.novel.append(
            NovelSlot(
                slot_id=memory._next_slot_id,
                vector=_normalize(candidates[r].copy()),
                birth_round=memory.round,
                last_matched_round=memory.round,
            )
        )
        memory._next_slot_id += 1


def discover_categories(
    memory: GlobalMemory,
    pool: DiscoveryPool,
    penalty_weight: float,
    tau_base: float,
    rho: float,
    same_client_cannot_link: bool = False,
    min_link_height: float = 0.05,
) -> int:
    """Steps 2-4 of the per-round server pass: dendrogram cut on the novel
    pool, Hungarian matching against historical slots, EMA routing.

    Returns the number of candidate centers formed (0 when the pool is too
    small to cluster)."""
    if pool.centroids.shape[0] < 2:
        return 0
    _, _, candidates = optimal_cut(
        pool.centroids,
        pool.densities,
        num_known=len(memory.known_class_ids),
        penalty_weight=penalty_weight,
        origins=pool.origins if same_client_cannot_link else None,
        min_link_height=min_link_height if same_client_cannot_link else 0.0,
    )
    if candidates.shape[0] == 0:
        return 0
    historical = (
        np.array([s.vector for s in memory.novel]) if memory.novel else np.empty((0, candidates.shape[1]))
    )
    pairs, valid = match_prototypes(candidates, historical, tau_base)
    route_memory(memory, candidates, pairs, valid, rho)
    return candidates.shape[0]
