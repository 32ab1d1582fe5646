"""NumPy fallback implementations of the hot kernels.

The scatter kernels accumulate in the same sequential order as the compiled
versions and agree bit-for-bit; the edge-dot kernel vectorizes its inner
product, so the two backends agree only to floating-point roundoff there.
"""

import numpy as np


def scatter_add_rows(out: np.ndarray, index: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """out[index[i], :] += rows[i, :] for every i, in order. Returns out."""
    np.add.at(out, index, rows)
    return out


def scatter_add_vec(out: np.ndarray, index: np.ndarray, values: np.ndarray) -> np.ndarray:
    """out[index[i]] += values[i] for every i, in order. Returns out."""
    out += np.bincount(index, weights=values, minlength=out.shape[0])
    return out


def clipped_edge_dot_sums(z: np.ndarray, src: np.ndarray, dst: np.ndarray, n: int) -> np.ndarray:
    """Per-node sum over outgoing edges of max(0, z[src] . z[dst])."""
    if src.size == 0:
        return np.zeros(n, dtype=np.float64)
    dots = np.einsum("ij,ij->i", z[src], z[dst])
    np.maximum(dots, 0.0, out=dots)
    return np.bincount(src, weights=dots, minlength=n)
