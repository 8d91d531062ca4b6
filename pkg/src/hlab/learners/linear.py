"""Multiclass perceptron, with an optional averaged variant."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..validation import check_array, check_X_y
from .base import ConstantFallbackMixin
from ._kernels import perceptron_epoch


class PerceptronClassifier(ConstantFallbackMixin, ClassifierMixin, BaseEstimator):
    """One weight vector per class, updated on mistakes.

    ``averaged=True`` predicts with the running average of the weights
    over all updates, which behaves like the usual stand-in for a linear
    max-margin classifier on non-separable data.
    """

    def __init__(
        self,
        epochs: int = 50,
        lr: float = 1.0,
        averaged: bool = False,
        random_state: int | None = None,
    ):
        self.epochs = epochs
        self.lr = lr
        self.averaged = averaged
        self.random_state = random_state

    def fit(self, X, y):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        X, y = check_X_y(X, y)
        self.n_features_in_ = X.shape[1]
        if self._begin_fit(y):
            return self
        classes = self.classes_
        y_pos = np.searchsorted(classes, y)
        c, d = len(classes), X.shape[1]
        W = np.zeros((c, d))
        b = np.zeros(c)
        acc_W = np.zeros((c, d))
        acc_b = np.zeros(c)
        rng = np.random.default_rng(self.random_state)
        for _ in range(self.epochs):
            order = rng.permutation(len(y_pos))
            perceptron_epoch(
                W, b, X, y_pos, order, float(self.lr), acc_W, acc_b, self.averaged
            )
        if self.averaged:
            self._W, self._b = acc_W, acc_b
        else:
            self._W, self._b = W, b
        return self

    def decision_function(self, X):
        X = check_array(X)
        return X @ self._W.T + self._b

    def predict(self, X):
        X = check_array(X)
        const = self._maybe_constant(X)
        if const is not None:
            return const
        scores = self.decision_function(X)
        return self.classes_[np.argmax(scores, axis=1)]
