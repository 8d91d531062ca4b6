"""Hot inner loops for the online learners.

Online (per-instance) weight updates cannot be vectorized across a whole
epoch, so these run under numba when available.  The functions are written
in plain-loop style so the pure-Python fallback computes exactly the same
thing, just slower.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba present in normal installs
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco


@njit(cache=True)
def _sigmoid(z):
    if z >= 0.0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


@njit(cache=True)
def mlp_epoch(W1, b1, W2, b2, X, Y, order, lr):
    """One online backprop epoch over ``order``; returns summed squared error.

    Sigmoid hidden and output units, squared-error loss, weights updated
    in place after every instance.
    """
    n_hidden = W1.shape[0]
    n_out = W2.shape[0]
    n_in = W1.shape[1]
    sq = 0.0
    hid = np.empty(n_hidden)
    out = np.empty(n_out)
    d_out = np.empty(n_out)
    d_hid = np.empty(n_hidden)
    for t in range(order.shape[0]):
        i = order[t]
        for j in range(n_hidden):
            z = b1[j]
            for k in range(n_in):
                z += W1[j, k] * X[i, k]
            hid[j] = _sigmoid(z)
        for j in range(n_out):
            z = b2[j]
            for k in range(n_hidden):
                z += W2[j, k] * hid[k]
            out[j] = _sigmoid(z)
            diff = out[j] - Y[i, j]
            sq += diff * diff
            d_out[j] = diff * out[j] * (1.0 - out[j])
        for j in range(n_hidden):
            s = 0.0
            for k in range(n_out):
                s += W2[k, j] * d_out[k]
            d_hid[j] = s * hid[j] * (1.0 - hid[j])
        for j in range(n_out):
            for k in range(n_hidden):
                W2[j, k] -= lr * d_out[j] * hid[k]
            b2[j] -= lr * d_out[j]
        for j in range(n_hidden):
            for k in range(n_in):
                W1[j, k] -= lr * d_hid[j] * X[i, k]
            b1[j] -= lr * d_hid[j]
    return sq


@njit(cache=True)
def perceptron_epoch(W, b, X, y, order, lr, acc_W, acc_b, averaged):
    """One multiclass perceptron epoch; returns the mistake count.

    One weight vector per class, update on mistakes only.  When
    ``averaged`` the running weight sums accumulate after every instance.
    """
    n_classes = W.shape[0]
    n_in = W.shape[1]
    mistakes = 0
    for t in range(order.shape[0]):
        i = order[t]
        best = 0
        best_score = -np.inf
        for c in range(n_classes):
            z = b[c]
            for k in range(n_in):
                z += W[c, k] * X[i, k]
            if z > best_score:
                best_score = z
                best = c
        truth = y[i]
        if best != truth:
            for k in range(n_in):
                W[truth, k] += lr * X[i, k]
                W[best, k] -= lr * X[i, k]
            b[truth] += lr
            b[best] -= lr
            mistakes += 1
        if averaged:
            for c in range(n_classes):
                for k in range(n_in):
                    acc_W[c, k] += W[c, k]
                acc_b[c] += b[c]
    return mistakes
