"""k-nearest-neighbor classifier on encoded features."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..validation import check_array, check_X_y
from .base import ConstantFallbackMixin

# One-hot pairs both differ on a category mismatch, so halving their squared
# contribution makes each mismatched categorical feature add exactly 1.
_CAT_SCALE = np.sqrt(0.5)


class KnnClassifier(ConstantFallbackMixin, ClassifierMixin, BaseEstimator):
    """Brute-force kNN with majority voting.

    Parameters
    ----------
    k : int
        Neighborhood size.
    categorical_blocks : tuple of (start, stop)
        Column ranges holding one-hot indicator blocks; scaled so a
        category mismatch contributes 1 to the squared distance.
    """

    def __init__(self, k: int = 5, categorical_blocks: tuple = ()):
        self.k = k
        self.categorical_blocks = categorical_blocks

    def _scale(self, X):
        if not self.categorical_blocks:
            return X
        X = X.copy()
        for start, stop in self.categorical_blocks:
            X[:, start:stop] *= _CAT_SCALE
        return X

    def fit(self, X, y):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        X, y = check_X_y(X, y)
        self.n_features_in_ = X.shape[1]
        self._begin_fit(y)
        self._X = self._scale(X)
        self._y = y
        return self

    def predict(self, X):
        X = check_array(X)
        const = self._maybe_constant(X)
        if const is not None:
            return const
        X = self._scale(X)
        k = min(self.k, len(self._y))
        out = np.empty(X.shape[0], dtype=np.int64)
        for i in range(X.shape[0]):
            d2 = ((self._X - X[i]) ** 2).sum(axis=1)
            nearest = np.argsort(d2, kind="stable")[:k]
            out[i] = np.argmax(np.bincount(self._y[nearest]))
        return out
