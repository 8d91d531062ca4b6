"""C4.5-style decision trees and decision stumps on the codes feature view.

The tree splits numeric features binarily at midpoints between sorted
distinct values and categorical features multiway on their codes, choosing
the candidate with the highest gain ratio.  Pruning is pessimistic-error
subtree replacement: a subtree collapses to a leaf when the upper-bound
error estimate of the node as a leaf is lower than the summed estimate of
its descendants.

Fitted trees are immutable; :meth:`C45TreeClassifier.expand_leaves` returns
a new tree in which added instances were routed to their leaves and each
receiving leaf re-attempted splitting on its combined data.  Internal nodes
above the leaves are never restructured.
"""

from __future__ import annotations

import math
from statistics import NormalDist

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..util import split_seed
from ..validation import check_array, check_X_y
from .base import ConstantFallbackMixin

_GAIN_EPS = 1e-12


class _Leaf:
    __slots__ = ("counts", "majority", "rows")

    def __init__(self, counts, majority, rows):
        self.counts = counts
        self.majority = majority
        self.rows = rows

    @property
    def is_leaf(self):
        return True

    def copy(self):
        return _Leaf(self.counts.copy(), self.majority, self.rows.copy())


class _Split:
    __slots__ = ("feature", "threshold", "children", "counts", "majority")

    def __init__(self, feature, threshold, children, counts, majority):
        self.feature = feature
        self.threshold = threshold  # None for categorical multiway splits
        self.children = children
        self.counts = counts
        self.majority = majority

    @property
    def is_leaf(self):
        return False

    def copy(self):
        return _Split(
            self.feature,
            self.threshold,
            [c.copy() for c in self.children],
            self.counts.copy(),
            self.majority,
        )


def _entropy(counts, total):
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def _best_split(X, y_pos, rows, candidates, cat_sizes, min_leaf, n_classes):
    """Best admissible split under the C4.5 selection rule, or None.

    Each attribute contributes one candidate test: the categorical
    multiway split, or the numeric threshold maximizing information gain
    (ties to the lowest threshold).  A test is admissible when at least
    two branches hold ``min_leaf`` or more instances and its gain is
    positive.  The winner maximizes gain ratio among admissible tests
    whose gain reaches the average admissible gain, which stops
    small-split-info splinters from dominating; ties go to the lowest
    feature index.
    """
    n = len(rows)
    base_counts = np.bincount(y_pos[rows], minlength=n_classes)
    base_h = _entropy(base_counts, n)
    tests = []  # (feature, threshold, gain, ratio) in feature order
    for j in candidates:
        col = X[rows, j]
        if j in cat_sizes:
            k = cat_sizes[j]
            codes = col.astype(np.int64)
            part_counts = np.zeros((k, n_classes))
            np.add.at(part_counts, (codes, y_pos[rows]), 1.0)
            sizes = part_counts.sum(axis=1)
            if (sizes >= min_leaf).sum() < 2:
                continue
            weighted_h = sum(
                sizes[b] / n * _entropy(part_counts[b], sizes[b])
                for b in range(k)
                if sizes[b] > 0
            )
            gain = base_h - weighted_h
            if gain <= _GAIN_EPS:
                continue
            frac = sizes[sizes > 0] / n
            split_info = float(-(frac * np.log2(frac)).sum())
            if split_info <= _GAIN_EPS:
                continue
            tests.append((j, None, gain, gain / split_info))
        else:
            order = np.argsort(col, kind="stable")
            sv = col[order]
            sy = y_pos[rows][order]
            boundaries = np.flatnonzero(sv[:-1] < sv[1:])
            if boundaries.size == 0:
                continue
            onehot = np.zeros((n, n_classes))
            onehot[np.arange(n), sy] = 1.0
            cum = np.cumsum(onehot, axis=0)
            best_thr = None
            best_gain = _GAIN_EPS
            for b in boundaries:
                n_left = b + 1
                n_right = n - n_left
                if n_left < min_leaf or n_right < min_leaf:
                    continue
                left = cum[b]
                right = base_counts - left
                gain = (
                    base_h
                    - n_left / n * _entropy(left, n_left)
                    - n_right / n * _entropy(right, n_right)
                )
                if gain > best_gain:
                    best_gain = gain
                    best_thr = (sv[b] + sv[b + 1]) / 2.0
                    best_sizes = (n_left, n_right)
            if best_thr is None:
                continue
            fl, fr = best_sizes[0] / n, best_sizes[1] / n
            split_info = -(fl * math.log2(fl) + fr * math.log2(fr))
            tests.append((j, best_thr, best_gain, best_gain / split_info))

    if not tests:
        return None
    avg_gain = sum(t[2] for t in tests) / len(tests)
    best = None
    best_ratio = -np.inf
    for j, threshold, gain, ratio in tests:
        if gain >= avg_gain - _GAIN_EPS and ratio > best_ratio:
            best_ratio = ratio
            best = (j, threshold)
    return best


def _grow(X, y_pos, rows, banned, cat_sizes, min_leaf, n_classes, rng, max_features):
    counts = np.bincount(y_pos[rows], minlength=n_classes)
    majority = int(np.argmax(counts))
    if counts[majority] == len(rows):
        return _Leaf(counts, majority, rows)

    available = [j for j in range(X.shape[1]) if j not in banned]
    if not available:
        return _Leaf(counts, majority, rows)
    if max_features is not None and max_features < len(available):
        picked = rng.choice(len(available), size=max_features, replace=False)
        candidates = sorted(available[i] for i in picked)
    else:
        candidates = available

    found = _best_split(X, y_pos, rows, candidates, cat_sizes, min_leaf, n_classes)
    if found is None:
        return _Leaf(counts, majority, rows)
    j, threshold = found

    if threshold is None:
        codes = X[rows, j].astype(np.int64)
        child_banned = banned | {j}
        children = []
        for code in range(cat_sizes[j]):
            sub = rows[codes == code]
            if sub.size == 0:
                children.append(
                    _Leaf(np.zeros(n_classes), majority, np.empty(0, dtype=np.int64))
                )
            else:
                children.append(
                    _grow(X, y_pos, sub, child_banned, cat_sizes, min_leaf,
                          n_classes, rng, max_features)
                )
    else:
        mask = X[rows, j] <= threshold
        children = [
            _grow(X, y_pos, rows[mask], banned, cat_sizes, min_leaf,
                  n_classes, rng, max_features),
            _grow(X, y_pos, rows[~mask], banned, cat_sizes, min_leaf,
                  n_classes, rng, max_features),
        ]
    return _Split(j, threshold, children, counts, majority)


def _pessimistic_extra(n, e, z, cf):
    """Added error count under the C4.5 pessimistic upper confidence bound."""
    if n == 0:
        return 0.0
    if e < 1:
        base = n * (1.0 - cf ** (1.0 / n))
        if e == 0:
            return base
        return base + e * (_pessimistic_extra(n, 1.0, z, cf) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (
        1 + z * z / n
    )
    return r * n - e


def _node_est_as_leaf(node, z, cf):
    n = float(node.counts.sum())
    e = n - float(node.counts[node.majority])
    return e + _pessimistic_extra(n, e, z, cf)


def _subtree_est(node, z, cf):
    if node.is_leaf:
        return _node_est_as_leaf(node, z, cf)
    return sum(_subtree_est(c, z, cf) for c in node.children)


def _collect_rows(node):
    if node.is_leaf:
        return [node.rows]
    out = []
    for c in node.children:
        out.extend(_collect_rows(c))
    return out


def _prune(node, z, cf):
    if node.is_leaf:
        return node
    node.children = [_prune(c, z, cf) for c in node.children]
    as_leaf = _node_est_as_leaf(node, z, cf)
    as_subtree = _subtree_est(node, z, cf)
    if as_leaf < as_subtree:
        rows = np.concatenate(_collect_rows(node))
        return _Leaf(node.counts, node.majority, rows)
    return node


def _route(node, x):
    while not node.is_leaf:
        if node.threshold is None:
            node = node.children[int(x[node.feature])]
        elif x[node.feature] <= node.threshold:
            node = node.children[0]
        else:
            node = node.children[1]
    return node


def _count_nodes(node):
    if node.is_leaf:
        return 1
    return 1 + sum(_count_nodes(c) for c in node.children)


def _max_depth(node):
    if node.is_leaf:
        return 0
    return 1 + max(_max_depth(c) for c in node.children)


class C45TreeClassifier(ConstantFallbackMixin, ClassifierMixin, BaseEstimator):
    """Gain-ratio decision tree with pessimistic-error pruning.

    Parameters
    ----------
    min_leaf : int
        A split must produce at least two branches with this many
        instances.
    confidence : float
        Confidence factor of the pruning error bound.
    prune : bool
        Apply subtree-replacement pruning after growing.
    max_features : int, optional
        Per-node random candidate-feature count (used by random forests).
    categorical_features, n_categories : tuple
        Columns holding category codes and their category counts.
    class_values : tuple, optional
        Full label space when known up front; lets a tree trained on a
        subset later absorb instances of classes it has not seen yet.
    """

    def __init__(
        self,
        min_leaf: int = 2,
        confidence: float = 0.25,
        prune: bool = True,
        max_features: int | None = None,
        categorical_features: tuple = (),
        n_categories: tuple = (),
        class_values: tuple = (),
        random_state: int | None = None,
    ):
        self.min_leaf = min_leaf
        self.confidence = confidence
        self.prune = prune
        self.max_features = max_features
        self.categorical_features = categorical_features
        self.n_categories = n_categories
        self.class_values = class_values
        self.random_state = random_state

    def _z(self):
        return NormalDist().inv_cdf(1.0 - self.confidence)

    def fit(self, X, y):
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        if not 0.0 < self.confidence <= 0.5:
            raise ValueError("confidence must be in (0, 0.5]")
        X, y = check_X_y(X, y)
        self.n_features_in_ = X.shape[1]
        self._X = X.copy()
        self._y = y.copy()
        if self.class_values:
            self.classes_ = np.asarray(sorted(self.class_values), dtype=np.int64)
            if not np.isin(np.unique(y), self.classes_).all():
                raise ValueError("y contains labels outside class_values")
            self.constant_ = (
                int(self.classes_[0]) if len(self.classes_) == 1 else None
            )
        else:
            self._begin_fit(y)
        y_pos = np.searchsorted(self.classes_, y)
        self._cat_sizes = dict(zip(self.categorical_features, self.n_categories))
        rng = np.random.default_rng(self.random_state)
        self.root_ = _grow(
            self._X,
            y_pos,
            np.arange(len(y), dtype=np.int64),
            frozenset(),
            self._cat_sizes,
            self.min_leaf,
            len(self.classes_),
            rng,
            self.max_features,
        )
        if self.prune:
            self.root_ = _prune(self.root_, self._z(), self.confidence)
        return self

    def predict(self, X):
        X = check_array(X)
        const = self._maybe_constant(X)
        if const is not None:
            return const
        out = np.empty(X.shape[0], dtype=np.int64)
        for i in range(X.shape[0]):
            out[i] = _route(self.root_, X[i]).majority
        return self.classes_[out]

    @property
    def node_count_(self) -> int:
        return _count_nodes(self.root_)

    @property
    def depth_(self) -> int:
        return _max_depth(self.root_)

    def pruned(self) -> "C45TreeClassifier":
        """New tree with subtree-replacement pruning applied."""
        clone = self._shallow_clone()
        clone.root_ = _prune(self.root_.copy(), self._z(), self.confidence)
        return clone

    def expand_leaves(self, X_new, y_new, prune_first: bool = False) -> "C45TreeClassifier":
        """Grow a new tree by routing added instances to the leaves.

        Each leaf that receives instances re-runs C4.5 induction on its
        original instances plus the new arrivals; nodes above the leaves
        keep their structure (their class counts absorb the new data so
        later pruning estimates stay meaningful).
        """
        y_new = np.asarray(y_new, dtype=np.int64)
        if len(y_new) == 0:
            clone = self._shallow_clone()
            clone.root_ = (
                _prune(self.root_.copy(), self._z(), self.confidence)
                if prune_first
                else self.root_.copy()
            )
            return clone
        X_new, y_new = check_X_y(X_new, y_new)
        if X_new.shape[1] != self.n_features_in_:
            raise ValueError("added instances do not match the tree schema")
        if not np.isin(np.unique(y_new), self.classes_).all():
            raise ValueError(
                "added instances introduce classes outside the tree's label "
                "space; fit with class_values covering them instead"
            )
        clone = self._shallow_clone()
        clone._X = np.vstack([self._X, X_new])
        clone._y = np.concatenate([self._y, y_new])
        root = self.root_.copy()
        if prune_first:
            root = _prune(root, self._z(), self.confidence)
        y_pos = np.searchsorted(clone.classes_, clone._y)
        new_rows = np.arange(len(self._y), len(clone._y), dtype=np.int64)
        rng = np.random.default_rng(
            None if self.random_state is None else split_seed(self.random_state, "expand")
        )
        clone.root_ = self._expand_node(
            root, clone._X, y_pos, new_rows, frozenset(), rng
        )
        return clone

    def _expand_node(self, node, X_all, y_pos, incoming, banned, rng):
        if incoming.size == 0:
            return node
        n_classes = len(self.classes_)
        added_counts = np.bincount(y_pos[incoming], minlength=n_classes)
        if node.is_leaf:
            rows = np.concatenate([node.rows, incoming])
            return _grow(
                X_all, y_pos, rows, banned, self._cat_sizes, self.min_leaf,
                n_classes, rng, self.max_features,
            )
        node.counts = node.counts + added_counts
        node.majority = int(np.argmax(node.counts))
        col = X_all[incoming, node.feature]
        if node.threshold is None:
            codes = col.astype(np.int64)
            child_banned = banned | {node.feature}
            node.children = [
                self._expand_node(
                    child, X_all, y_pos, incoming[codes == code], child_banned, rng
                )
                for code, child in enumerate(node.children)
            ]
        else:
            mask = col <= node.threshold
            node.children = [
                self._expand_node(node.children[0], X_all, y_pos, incoming[mask], banned, rng),
                self._expand_node(node.children[1], X_all, y_pos, incoming[~mask], banned, rng),
            ]
        return node

    def _shallow_clone(self):
        clone = C45TreeClassifier(**self.get_params())
        clone.n_features_in_ = self.n_features_in_
        clone.classes_ = self.classes_.copy()
        clone.constant_ = self.constant_
        clone._cat_sizes = dict(self._cat_sizes)
        clone._X = self._X
        clone._y = self._y
        clone.root_ = self.root_
        return clone


class DecisionStumpClassifier(ConstantFallbackMixin, ClassifierMixin, BaseEstimator):
    """Depth-1 classifier minimizing 0/1 training error over all splits."""

    def __init__(self, categorical_features: tuple = (), n_categories: tuple = ()):
        self.categorical_features = categorical_features
        self.n_categories = n_categories

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.n_features_in_ = X.shape[1]
        if self._begin_fit(y):
            return self
        y_pos = np.searchsorted(self.classes_, y)
        n_classes = len(self.classes_)
        n = len(y)
        cat_sizes = dict(zip(self.categorical_features, self.n_categories))
        overall = np.bincount(y_pos, minlength=n_classes)
        self._default = int(np.argmax(overall))

        best_err = n - overall[self._default]  # no-split fallback
        best = None
        for j in range(X.shape[1]):
            col = X[:, j]
            if j in cat_sizes:
                k = cat_sizes[j]
                codes = col.astype(np.int64)
                part = np.zeros((k, n_classes))
                np.add.at(part, (codes, y_pos), 1.0)
                errors = part.sum() - part.max(axis=1).sum()
                if errors < best_err:
                    best_err = errors
                    per_code = np.argmax(part, axis=1)
                    empty = part.sum(axis=1) == 0
                    per_code[empty] = self._default
                    best = (j, None, per_code.astype(np.int64))
            else:
                order = np.argsort(col, kind="stable")
                sv = col[order]
                sy = y_pos[order]
                onehot = np.zeros((n, n_classes))
                onehot[np.arange(n), sy] = 1.0
                cum = np.cumsum(onehot, axis=0)
                for b in np.flatnonzero(sv[:-1] < sv[1:]):
                    left = cum[b]
                    right = overall - left
                    errors = (b + 1 - left.max()) + (n - b - 1 - right.max())
                    if errors < best_err:
                        best_err = errors
                        best = (
                            j,
                            (sv[b] + sv[b + 1]) / 2.0,
                            np.array(
                                [int(np.argmax(left)), int(np.argmax(right))],
                                dtype=np.int64,
                            ),
                        )
        self._split = best
        self.train_error_ = best_err / n
        return self

    def predict(self, X):
        X = check_array(X)
        const = self._maybe_constant(X)
        if const is not None:
            return const
        if self._split is None:
            return np.full(X.shape[0], self.classes_[self._default], dtype=np.int64)
        j, threshold, labels = self._split
        if threshold is None:
            codes = X[:, j].astype(np.int64)
            codes = np.clip(codes, 0, len(labels) - 1)
            return self.classes_[labels[codes]]
        return self.classes_[np.where(X[:, j] <= threshold, labels[0], labels[1])]
