"""Graph container, on-disk dataset format, and the two-stage split protocol.

Dataset directory layout:
  meta.json     {"name", "num_nodes", "num_features", "num_classes", "class_names": [...]}
  features.bin  magic "FGGCD1\\0\\0", little-endian u64 n, u64 d, then n*d f32 row-major
  edges.csv     header "src,dst", one directed record per line (symmetrized on load)
  labels.csv    header "node,label"
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rng import rng_for

MAGIC = b"FGGCD1\x00\x00"

# Node roles under the transductive protocol: unlabeled nodes double as the
# training pool for pseudo-labeling and as the test set.
ROLE_UNLABELED = 0
ROLE_LABELED = 1
ROLE_VAL = 2


class DatasetError(ValueError):
    """Raised when an on-disk dataset fails validation."""


@dataclass(frozen=True)
class Graph:
    name: str
    features: np.ndarray  # (n, d) float64
    edges: np.ndarray  # (m, 2) int64, undirected, deduplicated, u < v
    labels: np.ndarray  # (n,) int64 in [0, num_classes)
    num_classes: int
    class_names: tuple[str, ...] = ()

    @property
    def num_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]


def canonical_edges(pairs: np.ndarray, num_nodes: int) -> np.ndarray:
    """Symmetrize, drop self-loops, deduplicate; rows come out sorted (u < v)."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if pairs.size and (pairs.min() < 0 or pairs.max() >= num_nodes):
        raise DatasetError("edge endpoint out of range")
    keep = pairs[:, 0] != pairs[:, 1]
    pairs = pairs[keep]
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    if lo.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    return np.unique(np.stack([lo, hi], axis=1), axis=0)


def make_graph(name, features, pairs, labels, num_classes, class_names=()) -> Graph:
    features = np.ascontiguousarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.ndim != 2:
        raise DatasetError("features must be a 2-D matrix")
    n = features.shape[0]
    if labels.shape != (n,):
        raise DatasetError(f"labels shape {labels.shape} does not match {n} nodes")
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise DatasetError("label out of range")
    edges = canonical_edges(np.asarray(pairs), n)
    return Graph(
        name=name,
        features=features,
        edges=edges,
        labels=labels,
        num_classes=int(num_classes),
        class_names=tuple(class_names),
    )


# ----------------------------------------------------------------- disk I/O


def load_graph(path: str | Path) -> Graph:
    path = Path(path)
    meta_path = path / "meta.json"
    if not meta_path.exists():
        raise DatasetError(f"missing meta.json in {path}")
    meta = json.loads(meta_path.read_text())
    for key in ("name", "num_nodes", "num_features", "num_classes"):
        if key not in meta:
            raise DatasetError(f"meta.json missing key {key!r}")

    raw = (path / "features.bin").read_bytes()
    if raw[:8] != MAGIC:
        raise DatasetError("features.bin has bad magic bytes")
    n, d = struct.unpack("<QQ", raw[8:24])
    if n != meta["num_nodes"] or d != meta["num_features"]:
        raise DatasetError(
            f"features.bin header ({n}x{d}) disagrees with meta.json "
            f"({meta['num_nodes']}x{meta['num_features']})"
        )
    expected = 24 + 4 * n * d
    if len(raw) != expected:
        raise DatasetError(f"features.bin is {len(raw)} bytes, expected {expected}")
    features = np.frombuffer(raw, dtype="<f4", count=n * d, offset=24).reshape(n, d)

    pairs = _read_csv_pairs(path / "edges.csv", ("src", "dst"))
    label_pairs = _read_csv_pairs(path / "labels.csv", ("node", "label"))
    if label_pairs.shape[0] != n:
        raise DatasetError(f"labels.csv has {label_pairs.shape[0]} rows, expected {n}")
    order = np.argsort(label_pairs[:, 0])
    label_pairs = label_pairs[order]
    if not np.array_equal(label_pairs[:, 0], np.arange(n)):
        raise DatasetError("labels.csv must cover every node id exactly once")

    return make_graph(
        name=meta["name"],
        features=features.astype(np.float64),
        pairs=pairs,
        labels=label_pairs[:, 1],
        num_classes=meta["num_classes"],
        class_names=meta.get("class_names", ()),
    )


def save_graph(graph: Graph, path: str | Path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    meta = {
        "name": graph.name,
        "num_nodes": graph.num_nodes,
        "num_features": graph.num_features,
        "num_classes": graph.num_classes,
        "class_names": list(graph.class_names),
    }
    (path / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    with open(path / "features.bin", "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<QQ", graph.num_nodes, graph.num_features))
        fh.write(graph.features.astype("<f4").tobytes())
    with open(path / "edges.csv", "w", newline="") as fh:
        fh.write("src,dst\n")
        for u, v in graph.edges:
            fh.write(f"{u},{v}\n")
    with open(path / "labels.csv", "w", newline="") as fh:
        fh.write("node,label\n")
        for node, label in enumerate(graph.labels):
            fh.write(f"{node},{label}\n")


def _read_csv_pairs(path: Path, header: tuple[str, str]) -> np.ndarray:
    if not path.exists():
        raise DatasetError(f"missing {path.name}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or tuple(s.strip() for s in first) != header:
            raise DatasetError(f"{path.name} must start with header {','.join(header)}")
        try:
            rows = [(int(a), int(b)) for a, b in reader]
        except ValueError as exc:
            raise DatasetError(f"{path.name}: non-integer record ({exc})") from exc
    return np.array(rows, dtype=np.int64).reshape(-1, 2)


def validate_dataset(path: str | Path) -> dict:
    """Re-read an exported directory and check structural consistency.

    Returns summary counts; raises DatasetError on the first violation.
    """
    graph = load_graph(path)
    if not np.all(np.isfinite(graph.features)):
        raise DatasetError("non-finite feature values")
    return {
        "name": graph.name,
        "num_nodes": graph.num_nodes,
        "num_edges": graph.num_edges,
        "num_features": graph.num_features,
        "num_classes": graph.num_classes,
    }


# ------------------------------------------------------------------- splits


@dataclass(frozen=True)
class SplitMasks:
    known_classes: tuple[int, ...]
    novel_classes: tuple[int, ...]
    roles: np.ndarray  # (n,) int8, ROLE_* values

    def nodes_with_role(self, role: int) -> np.ndarray:
        return np.flatnonzero(self.roles == role)


def gcd_split(graph: Graph, partition, label_rate: float, seed: int) -> SplitMasks:
    """Two-stage split: seeded known/novel class partition, then per-client
    per-known-class label/val/unlabeled assignment. Novel-class nodes are
    always unlabeled; unlabeled nodes double as the test set."""
    if not 0.0 < label_rate <= 1.0:
        raise ValueError("label_rate must be in (0, 1]")
    rng = rng_for(seed, "gcd_split")

    num_known = -(-graph.num_classes // 2)  # ceil
    class_order = rng.permutation(graph.num_classes)
    known = tuple(sorted(int(c) for c in class_order[:num_known]))
    novel = tuple(sorted(int(c) for c in class_order[num_known:]))

    roles = np.full(graph.num_nodes, ROLE_UNLABELED, dtype=np.int8)
    for client_nodes in partition.client_nodes:
        for cls in known:
            members = client_nodes[graph.labels[client_nodes] == cls]
            n_c = members.size
            if n_c == 0:
                continue
            members = members[rng.permutation(n_c)]
            n_lab = max(1, round(label_rate * n_c))
            n_lab = min(n_lab, n_c)
            n_val = min(round(0.4 * n_c), n_c - n_lab)
            roles[members[:n_lab]] = ROLE_LABELED
            roles[members[n_lab : n_lab + n_val]] = ROLE_VAL
    return SplitMasks(known_classes=known, novel_classes=novel, roles=roles)


def sparsify_labels(masks: SplitMasks, partition, sparsity_rate: float, seed: int) -> SplitMasks:
    """Demote a random fraction of labeled nodes to unlabeled, per client."""
    if not 0.0 <= sparsity_rate < 1.0:
        raise ValueError("sparsity_rate must be in [0, 1)")
    if sparsity_rate == 0.0:
        return masks
    rng = rng_for(seed, "sparsify")
    roles = masks.roles.copy()
    for client_nodes in partition.client_nodes:
        labeled = client_nodes[roles[client_nodes] == ROLE_LABELED]
        k = round(sparsity_rate * labeled.size)
        if k > 0:
            demote = rng.choice(labeled, size=k, replace=False)
            roles[demote] = ROLE_UNLABELED
    return SplitMasks(masks.known_classes, masks.novel_classes, roles)
