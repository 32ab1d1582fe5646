"""Clustering-accuracy metrics: nearest-prototype prediction, optimally
matched accuracy per test subset, and the harmonic known/novel score.

Old, New, and All accuracies each solve their own matching on their own
subset, so All is a standalone measurement rather than a weighted mean of
the other two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hungarian import max_assignment


@dataclass
class MetricsReport:
    round: int
    old_acc: float | None
    new_acc: float | None
    all_acc: float | None
    hrscore: float | None
    num_prototypes: int
    seconds: float

    def csv_row(self) -> str:
        def fmt(x):
            return "" if x is None else f"{x:.4f}"

        return (
            f"{self.round},{fmt(self.old_acc)},{fmt(self.new_acc)},{fmt(self.all_acc)},"
            f"{fmt(self.hrscore)},{self.num_prototypes},{self.seconds:.3f}"
        )

    CSV_HEADER = "round,old_acc,new_acc,all_acc,hrscore,num_prototypes,seconds"


def predict(embeddings: np.ndarray, prototypes: np.ndarray) -> np.ndarray:
    """Nearest-prototype slot per row by cosine similarity; ties resolve to
    the lowest slot id."""
    if prototypes.shape[0] == 0:
        raise ValueError("prototype buffer is empty")
    return (embeddings @ prototypes.T).argmax(axis=1)


def hungarian_accuracy(pred_slots: np.ndarray, true_labels: np.ndarray, num_slots: int, num_labels: int) -> float:
    """Accuracy (percent) under the best one-to-one slot-to-label matching."""
    pred_slots = np.asarray(pred_slots)
    true_labels = np.asarray(true_labels)
    if pred_slots.size == 0:
        raise ValueError("empty evaluation subset")
    contingency = np.zeros((num_slots, num_labels))
    np.add.at(contingency, (pred_slots, true_labels), 1.0)
    pairs = max_assignment(contingency)
    matched = sum(contingency[r, c] for r, c in pairs)
    return 100.0 * matched / pred_slots.size


def hrscore(old_acc: float, new_acc: float) -> float:
    """Harmonic mean of known-category and novel-category accuracy."""
    if old_acc < 0 or new_acc < 0:
        raise ValueError("accuracies must be non-negative")
    if old_acc + new_acc == 0:
        return 0.0
    return 2.0 * old_acc * new_acc / (old_acc + new_acc)


def evaluate_split(
    pred_slots: np.ndarray,
    true_labels: np.ndarray,
    known_classes: tuple[int, ...],
    novel_classes: tuple[int, ...],
    num_slots: int,
    num_classes: int,
) -> tuple[float | None, float | None, float | None, float | None]:
    """(old, new, all, hrscore) with independent matchings; empty subsets are
    reported as absent rather than zero."""
    known_mask = np.isin(true_labels, known_classes)
    novel_mask = np.isin(true_labels, novel_classes)

    old_acc = (
        hungarian_accuracy(pred_slots[known_mask], true_labels[known_mask], num_slots, num_classes)
        if known_mask.any()
        else None
    )
    new_acc = (
        hungarian_accuracy(pred_slots[novel_mask], true_labels[novel_mask], num_slots, num_classes)
        if novel_mask.any()
        else None
    )
    all_acc = (
        hungarian_accuracy(pred_slots, true_labels, num_slots, num_classes)
        if pred_slots.size
        else None
    )
    hr = hrscore(old_acc, new_acc) if old_acc is not None and new_acc is not None else None
    return old_acc, new_acc, all_acc, hr
