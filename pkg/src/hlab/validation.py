"""Input validation helpers for the estimator layer.

Small, predictable versions of the usual sklearn checks, so error messages
and accepted shapes stay under our control.
"""

from __future__ import annotations

import numpy as np


def check_array(X, name="X"):
    """Coerce ``X`` to a 2-D float64 array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {X.shape}")
    return X


def check_X_y(X, y):
    """Coerce and cross-validate a feature matrix and integer label vector."""
    X = check_array(X)
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"y must be 1-dimensional, got shape {y.shape}")
    if len(y) != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {len(y)} entries")
    if len(y) == 0:
        raise ValueError("cannot fit on an empty training set")
    y = y.astype(np.int64)
    return X, y


def check_n_features(X, n_features, name="X"):
    """Reject arity mismatches between a fitted model and incoming data."""
    if X.shape[1] != n_features:
        raise ValueError(
            f"{name} has {X.shape[1]} features, model was fitted with {n_features}"
        )


def check_is_fitted(estimator, attr):
    if not hasattr(estimator, attr):
        raise ValueError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first"
        )
