"""Mixed naive Bayes: Gaussian numerics, Laplace-smoothed categoricals."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..validation import check_array, check_X_y
from .base import ConstantFallbackMixin


class NaiveBayesClassifier(ConstantFallbackMixin, ClassifierMixin, BaseEstimator):
    """Naive Bayes over the codes feature view.

    Numeric features get a per-class Gaussian (MLE variance with a floor),
    categorical features a Laplace-smoothed frequency table.

    Parameters
    ----------
    categorical_features : tuple of int
        Column indices holding category codes.
    n_categories : tuple of int
        Category count per categorical column, aligned with
        ``categorical_features``.
    var_floor : float
        Lower bound on Gaussian variances; keeps degenerate (constant)
        columns finite.
    """

    def __init__(
        self,
        categorical_features: tuple = (),
        n_categories: tuple = (),
        var_floor: float = 1e-9,
    ):
        self.categorical_features = categorical_features
        self.n_categories = n_categories
        self.var_floor = var_floor

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.n_features_in_ = X.shape[1]
        if self._begin_fit(y):
            return self
        classes = self.classes_
        cat_set = dict(zip(self.categorical_features, self.n_categories))
        n = len(y)

        self._log_prior = np.log(
            np.array([(y == c).sum() for c in classes]) / n
        )
        self._gauss = {}  # col -> (means, vars) per class
        self._cat = {}  # col -> log prob table (class, code)
        for j in range(X.shape[1]):
            col = X[:, j]
            if j in cat_set:
                k = cat_set[j]
                table = np.empty((len(classes), k))
                for ci, c in enumerate(classes):
                    codes = col[y == c].astype(np.int64)
                    counts = np.bincount(codes, minlength=k)
                    table[ci] = (counts + 1.0) / (counts.sum() + k)
                self._cat[j] = np.log(table)
            else:
                means = np.empty(len(classes))
                variances = np.empty(len(classes))
                for ci, c in enumerate(classes):
                    vals = col[y == c]
                    means[ci] = vals.mean()
                    variances[ci] = max(vals.var(), self.var_floor)
                self._gauss[j] = (means, variances)
        return self

    def predict(self, X):
        X = check_array(X)
        const = self._maybe_constant(X)
        if const is not None:
            return const
        scores = np.tile(self._log_prior, (X.shape[0], 1))
        for j, (means, variances) in self._gauss.items():
            col = X[:, j][:, None]
            scores += -0.5 * np.log(2.0 * np.pi * variances) - (
                (col - means) ** 2
            ) / (2.0 * variances)
        for j, table in self._cat.items():
            codes = X[:, j].astype(np.int64)
            scores += table[:, codes].T
        return self.classes_[np.argmax(scores, axis=1)]
