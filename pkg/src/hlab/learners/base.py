"""Shared pieces for the classifier estimators.

All estimators follow the same conventions: ``fit(X, y)`` on a float
matrix and integer label vector, ``predict(X)`` returns labels drawn from
the fitted ``classes_``, every vote or score tie breaks toward the lowest
class code, and a single-class training set degenerates to a constant
predictor instead of failing.
"""

from __future__ import annotations

import numpy as np

from ..validation import check_n_features, check_is_fitted


def majority_label(votes: np.ndarray) -> int:
    """Most frequent label in ``votes``; ties go to the lowest label."""
    counts = np.bincount(votes)
    return int(np.argmax(counts))


class ConstantFallbackMixin:
    """Degenerate handling for single-class training sets."""

    def _begin_fit(self, y: np.ndarray) -> bool:
        """Record classes; returns True when fitting should short-circuit."""
        self.classes_ = np.unique(y)
        if len(self.classes_) == 1:
            self.constant_ = int(self.classes_[0])
            return True
        self.constant_ = None
        return False

    def _maybe_constant(self, X: np.ndarray):
        check_is_fitted(self, "classes_")
        check_n_features(X, self.n_features_in_)
        if self.constant_ is not None:
            return np.full(X.shape[0], self.constant_, dtype=np.int64)
        return None
