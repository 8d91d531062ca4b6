"""Random forest: bagged unpruned C4.5 trees with per-node feature sampling."""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..util import split_seed
from ..validation import check_array, check_X_y
from .base import ConstantFallbackMixin
from .tree import C45TreeClassifier


class RandomForestClassifier(ConstantFallbackMixin, ClassifierMixin, BaseEstimator):
    """Majority vote over bootstrap-bagged trees.

    Each tree grows unpruned, considering ``ceil(sqrt(d))`` randomly drawn
    candidate features at every node.
    """

    def __init__(
        self,
        trees: int = 10,
        min_leaf: int = 2,
        categorical_features: tuple = (),
        n_categories: tuple = (),
        random_state: int | None = None,
    ):
        self.trees = trees
        self.min_leaf = min_leaf
        self.categorical_features = categorical_features
        self.n_categories = n_categories
        self.random_state = random_state

    def fit(self, X, y):
        if self.trees < 1:
            raise ValueError("trees must be >= 1")
        X, y = check_X_y(X, y)
        self.n_features_in_ = X.shape[1]
        if self._begin_fit(y):
            return self
        n = len(y)
        max_features = max(1, math.ceil(math.sqrt(X.shape[1])))
        seed = 0 if self.random_state is None else self.random_state
        self.members_ = []
        for t in range(self.trees):
            rng = np.random.default_rng(split_seed(seed, "bootstrap", t))
            boot = rng.integers(0, n, size=n)
            tree = C45TreeClassifier(
                min_leaf=self.min_leaf,
                prune=False,
                max_features=max_features,
                categorical_features=self.categorical_features,
                n_categories=self.n_categories,
                random_state=split_seed(seed, "tree", t),
            )
            self.members_.append(tree.fit(X[boot], y[boot]))
        return self

    def predict(self, X):
        X = check_array(X)
        const = self._maybe_constant(X)
        if const is not None:
            return const
        votes = np.stack([m.predict(X) for m in self.members_])
        n_labels = int(self.classes_[-1]) + 1
        out = np.empty(X.shape[0], dtype=np.int64)
        for i in range(X.shape[0]):
            out[i] = np.argmax(np.bincount(votes[:, i], minlength=n_labels))
        return out
