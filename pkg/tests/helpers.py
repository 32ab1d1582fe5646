"""Shared test oracles: finite differences and gradient comparison."""

import numpy as np


def finite_difference_grads(build_loss, params, h=1e-5):
    """Central differences of build_loss() w.r.t. each parameter entry.

    build_loss must re-evaluate the loss from the parameters' current data;
    any stochastic or frozen inputs have to be captured outside.
    """
    grads = []
    for p in params:
        g = np.zeros_like(p.data)
        flat = p.data.ravel()
        gflat = g.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = build_loss().item()
            flat[i] = orig - h
            down = build_loss().item()
            flat[i] = orig
            gflat[i] = (up - down) / (2.0 * h)
        grads.append(g)
    return grads


def assert_grads_close(analytic, numeric, rel=1e-4, abs_small=1e-7, small=1e-8):
    """Relative comparison for sizable entries, absolute for tiny ones."""
    for a, n in zip(analytic, numeric):
        a = np.asarray(a)
        n = np.asarray(n)
        big = np.abs(a) >= small
        if big.any():
            rel_err = np.abs(a - n)[big] / np.abs(a)[big]
            assert rel_err.max() < rel, f"relative gradient error {rel_err.max():.3e}"
        if (~big).any():
            abs_err = np.abs(a - n)[~big]
            assert abs_err.max() < abs_small, f"absolute gradient error {abs_err.max():.3e}"


def unit_rows(matrix):
    matrix = np.asarray(matrix, dtype=np.float64)
    return matrix / np.linalg.norm(matrix, axis=1, keepdims=True)
