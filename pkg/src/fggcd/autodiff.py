"""Reverse-mode autodiff over dense float64 matrices.

Everything is a 2-D array: column vectors are (n, 1), scalars are (1, 1).
A fresh tape is built for every loss evaluation; ``backward`` walks it once
and accumulates into ``grad`` fields, so calling it twice without zeroing
doubles the gradients.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from . import _kernels

Array = np.ndarray


def _as_matrix(data) -> Array:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise ValueError(f"expected at most 2 dimensions, got shape {arr.shape}")
    return arr


def _unbroadcast(grad: Array, shape: tuple[int, int]) -> Array:
    """Sum grad back down to `shape` after numpy broadcasting."""
    if grad.shape == shape:
        return grad
    out = grad
    if shape[0] == 1 and out.shape[0] > 1:
        out = out.sum(axis=0, keepdims=True)
    if shape[1] == 1 and out.shape[1] > 1:
        out = out.sum(axis=1, keepdims=True)
    return out


class Tensor:
    """Node in the computation graph."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = _as_matrix(data)
        self.requires_grad = requires_grad
        self.grad: Array | None = None
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[Array], None] | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def item(self) -> float:
        if self.data.size != 1:
            raise ValueError(f"item() on non-scalar tensor of shape {self.shape}")
        return float(self.data[0, 0])

    def _accumulate(self, grad: Array) -> None:
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64, copy=True)
        else:
            self.grad += grad

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return scale(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)


class Parameter(Tensor):
    """Trainable tensor: grad is always allocated and zeroed on demand."""

    def __init__(self, data):
        super().__init__(data, requires_grad=True)
        self.grad = np.zeros_like(self.data)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)


def constant(data) -> Tensor:
    return Tensor(data, requires_grad=False)


def _wrap(x) -> Tensor:
    return x if isinstance(x, Tensor) else constant(x)


def _node(data: Array, parents: tuple[Tensor, ...], backward: Callable[[Array], None]) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward
    return out


# ---------------------------------------------------------------- primitives


def add(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)

    def bwd(grad: Array) -> None:
        if a.requires_grad:
            a._accumulate(_unbroadcast(grad, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(grad, b.shape))

    return _node(a.data + b.data, (a, b), bwd)


def sub(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)

    def bwd(grad: Array) -> None:
        if a.requires_grad:
            a._accumulate(_unbroadcast(grad, a.shape))
        if b.requires_grad:
            b._accumulate(-_unbroadcast(grad, b.shape))

    return _node(a.data - b.data, (a, b), bwd)


def mul(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)

    def bwd(grad: Array) -> None:
        if a.requires_grad:
            a._accumulate(_unbroadcast(grad * b.data, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(grad * a.data, b.shape))

    return _node(a.data * b.data, (a, b), bwd)


def scale(a, c: float) -> Tensor:
    a = _wrap(a)

    def bwd(grad: Array) -> None:
        a._accumulate(grad * c)

    return _node(a.data * c, (a,), bwd)


def matmul(a, b) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.shape} @ {b.shape}")

    def bwd(grad: Array) -> None:
        if a.requires_grad:
            a._accumulate(grad @ b.data.T)
        if b.requires_grad:
            b._accumulate(a.data.T @ grad)

    return _node(a.data @ b.data, (a, b), bwd)


def transpose(a) -> Tensor:
    a = _wrap(a)

    def bwd(grad: Array) -> None:
        a._accumulate(grad.T)

    return _node(a.data.T.copy(), (a,), bwd)


def relu(a) -> Tensor:
    a = _wrap(a)
    mask = a.data > 0.0

    def bwd(grad: Array) -> None:
        a._accumulate(grad * mask)

    return _node(np.where(mask, a.data, 0.0), (a,), bwd)


def exp(a) -> Tensor:
    a = _wrap(a)
    out_data = np.exp(a.data)

    def bwd(grad: Array) -> None:
        a._accumulate(grad * out_data)

    return _node(out_data, (a,), bwd)


def log(a) -> Tensor:
    a = _wrap(a)

    def bwd(grad: Array) -> None:
        a._accumulate(grad / a.data)

    return _node(np.log(a.data), (a,), bwd)


def sum_all(a) -> Tensor:
    a = _wrap(a)

    def bwd(grad: Array) -> None:
        a._accumulate(np.full(a.shape, grad[0, 0]))

    return _node(a.data.sum(), (a,), bwd)


def mean_all(a) -> Tensor:
    a = _wrap(a)
    return scale(sum_all(a), 1.0 / a.data.size)


def gather_rows(a, index: Array) -> Tensor:
    """Select rows a[index]; the backward pass scatter-adds into the source."""
    a = _wrap(a)
    index = np.asarray(index, dtype=np.int64)

    def bwd(grad: Array) -> None:
        acc = np.zeros_like(a.data)
        _kernels.scatter_add_rows(acc, index, np.ascontiguousarray(grad))
        a._accumulate(acc)

    return _node(a.data[index], (a,), bwd)


def gather_pairs(a, rows: Array, cols: Array) -> Tensor:
    """Select a[rows[i], cols[i]] as an (m, 1) column."""
    a = _wrap(a)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    flat = rows * a.shape[1] + cols

    def bwd(grad: Array) -> None:
        acc = np.zeros_like(a.data)
        _kernels.scatter_add_vec(acc.ravel(), flat, np.ascontiguousarray(grad[:, 0]))
        a._accumulate(acc)

    return _node(a.data[rows, cols].reshape(-1, 1), (a,), bwd)


def segment_sum(a, segments: Array, num_segments: int) -> Tensor:
    """Sum rows of `a` into `num_segments` buckets given per-row bucket ids."""
    a = _wrap(a)
    segments = np.asarray(segments, dtype=np.int64)
    out_data = np.zeros((num_segments, a.shape[1]), dtype=np.float64)
    _kernels.scatter_add_rows(out_data, segments, np.ascontiguousarray(a.data))

    def bwd(grad: Array) -> None:
        a._accumulate(grad[segments])

    return _node(out_data, (a,), bwd)


def logsumexp_rows(a) -> Tensor:
    """Row-wise log(sum(exp)), numerically stabilized; output is (n, 1)."""
    a = _wrap(a)
    row_max = a.data.max(axis=1, keepdims=True)
    shifted = np.exp(a.data - row_max)
    denom = shifted.sum(axis=1, keepdims=True)
    out_data = row_max + np.log(denom)
    softmax = shifted / denom

    def bwd(grad: Array) -> None:
        a._accumulate(grad * softmax)

    return _node(out_data, (a,), bwd)


def l2_normalize_rows(a, eps: float = 1e-8) -> Tensor:
    """Divide each row by max(eps, its L2 norm); zero rows stay zero."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    a = _wrap(a)
    norms = np.sqrt((a.data * a.data).sum(axis=1, keepdims=True))
    safe = np.maximum(norms, eps)
    out_data = a.data / safe
    above = norms > eps

    def bwd(grad: Array) -> None:
        # Rows above eps: project out the radial component; below: plain 1/eps.
        dots = (grad * out_data).sum(axis=1, keepdims=True)
        g = np.where(above, (grad - out_data * dots) / safe, grad / eps)
        a._accumulate(g)

    return _node(out_data, (a,), bwd)


def softmax_rows(logits, temperature: float = 1.0) -> Tensor:
    """Row-wise softmax of logits/temperature; rows sum to 1."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    t = scale(_wrap(logits), 1.0 / temperature)
    return exp(sub(t, logsumexp_rows(t)))


# ------------------------------------------------------------------ backward


def backward(loss: Tensor) -> None:
    """Populate grads of every reachable tensor with d(loss)/d(tensor)."""
    if loss.data.size != 1:
        raise ValueError("backward requires a scalar loss")
    if not loss.requires_grad:
        return

    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in seen:
                stack.append((parent, False))

    loss._accumulate(np.ones_like(loss.data))
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)


def zero_grads(params: Iterable[Parameter]) -> None:
    for p in params:
        p.zero_grad()
