from itertools import permutations

import numpy as np
import pytest

from fggcd.hungarian import max_assignment


def brute_force_max(score):
    """Best total over all full row->column injections."""
    r, c = score.shape
    best = -np.inf
    if r <= c:
        for cols in permutations(range(c), r):
            total = sum(score[i, j] for i, j in enumerate(cols))
            best = max(best, total)
    else:
        for rows in permutations(range(r), c):
            total = sum(score[i, j] for j, i in enumerate(rows))
            best = max(best, total)
    return best


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_square_matches_brute_force(n):
    rng = np.random.default_rng(n)
    for _ in range(100):
        s = rng.random((n, n))
        pairs = max_assignment(s)
        total = sum(s[i, j] for i, j in pairs)
        assert total == brute_force_max(s)


@pytest.mark.parametrize("shape", [(2, 5), (5, 2), (3, 4), (4, 3), (1, 6)])
def test_rectangular_matches_brute_force(shape):
    rng = np.random.default_rng(sum(shape))
    for _ in range(50):
        s = rng.random(shape)
        pairs = max_assignment(s)
        assert len(pairs) == min(shape)
        rows = [p[0] for p in pairs]
        cols = [p[1] for p in pairs]
        assert len(set(rows)) == len(rows) and len(set(cols)) == len(cols)
        total = sum(s[i, j] for i, j in pairs)
        assert total == pytest.approx(brute_force_max(s), abs=1e-12)


def test_scaling_invariance():
    rng = np.random.default_rng(9)
    for _ in range(30):
        s = rng.random((5, 5))
        base = max_assignment(s)
        scaled = max_assignment(3.7 * s)
        assert base == scaled


def test_empty_matrix():
    assert max_assignment(np.empty((0, 3))) == []
    assert max_assignment(np.empty((3, 0))) == []
