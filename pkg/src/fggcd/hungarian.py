"""Rectangular linear assignment by shortest augmenting paths (O(n^3)).

`max_assignment` returns the score-maximizing one-to-one pairing that
matches every row (or every column, whichever side is smaller).
"""

from __future__ import annotations

import numpy as np


def _solve_square_min(cost: np.ndarray) -> np.ndarray:
    """Column-to-row matching minimizing total cost of a square matrix."""
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    match = np.zeros(n + 1, dtype=np.int64)  # match[j] = row assigned to column j
    way = np.zeros(n + 1, dtype=np.int64)

    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    return match


def max_assignment(score: np.ndarray) -> list[tuple[int, int]]:
    """Pairs (row, col) maximizing the total score, |pairs| = min(rows, cols).

    The rectangle is padded to a square with a uniform sentinel so dummy
    rows/columns absorb the excess without influencing which real pairs win.
    """
    score = np.asarray(score, dtype=np.float64)
    if score.ndim != 2 or score.size == 0:
        return []
    r, c = score.shape
    n = max(r, c)
    cost = np.zeros((n, n))
    cost[:r, :c] = -score
    match = _solve_square_min(cost)
    pairs = []
    for j in range(1, n + 1):
        i = int(match[j]) - 1
        if i < r and j - 1 < c:
            pairs.append((i, j - 1))
    pairs.sort()
    return pairs
