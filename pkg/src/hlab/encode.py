"""Fold-local feature encoding.

The encoder is always fitted on training data only; statistics (imputation
values, min/max ranges) never see held-out instances.  Two output modes:

* ``"onehot"`` - categorical features expand to 0/1 indicator columns over
  the full schema category list, numeric features are min-max scaled to
  [0, 1].  Used by distance- and gradient-based learners.
* ``"codes"`` - categorical features stay as integer codes and numerics
  stay raw.  Used by tree and Bayes learners that handle categories
  natively.

Missing cells are imputed in both modes: numeric -> training mean,
categorical -> training mode.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .data import Dataset
from .validation import check_is_fitted


def encode_numeric(train: Dataset, apply_to: Dataset | None = None) -> np.ndarray:
    """One-shot one-hot + min-max encoding.

    Fits on ``train`` and transforms ``apply_to`` (default: the training
    data itself); inside CV, pass the held-out fold as ``apply_to`` so its
    statistics never leak into the encoding.
    """
    encoder = FeatureEncoder(mode="onehot").fit(train)
    return encoder.transform(train if apply_to is None else apply_to)


class FeatureEncoder(BaseEstimator, TransformerMixin):
    """Encode a mixed-schema :class:`Dataset` into a float matrix.

    Parameters
    ----------
    mode : {"onehot", "codes"}
        Output layout, see module docstring.
    """

    def __init__(self, mode: str = "onehot"):
        self.mode = mode

    def fit(self, ds: Dataset, y=None):
        if self.mode not in ("onehot", "codes"):
            raise ValueError(f"unknown encoder mode {self.mode!r}")
        fill = np.empty(ds.n_features)
        lo = np.zeros(ds.n_features)
        hi = np.zeros(ds.n_features)
        for j, feat in enumerate(ds.features):
            col = ds.X[:, j]
            valid = col[~np.isnan(col)]
            if feat.is_categorical:
                if valid.size:
                    counts = np.bincount(valid.astype(np.int64), minlength=len(feat.categories))
                    fill[j] = int(np.argmax(counts))
                else:
                    fill[j] = 0
            else:
                fill[j] = float(valid.mean()) if valid.size else 0.0
                lo[j] = float(valid.min()) if valid.size else 0.0
                hi[j] = float(valid.max()) if valid.size else 0.0
        self.features_ = list(ds.features)
        self.fill_ = fill
        self.min_ = lo
        self.max_ = hi

        blocks = []
        width = 0
        for feat in ds.features:
            if feat.is_categorical:
                k = len(feat.categories)
                if self.mode == "onehot":
                    blocks.append((width, width + k))
                    width += k
                else:
                    width += 1
            else:
                width += 1
        self.categorical_blocks_ = tuple(blocks)
        self.n_output_features_ = width
        return self

    def transform(self, ds: Dataset) -> np.ndarray:
        check_is_fitted(self, "features_")
        if [f.name for f in ds.features] != [f.name for f in self.features_]:
            raise ValueError("dataset schema does not match the fitted encoder")
        n = ds.n_instances
        out = np.zeros((n, self.n_output_features_))
        col_out = 0
        for j, feat in enumerate(self.features_):
            col = ds.X[:, j].copy()
            miss = np.isnan(col)
            col[miss] = self.fill_[j]
            if feat.is_categorical:
                codes = col.astype(np.int64)
                if self.mode == "onehot":
                    k = len(feat.categories)
                    out[np.arange(n), col_out + codes] = 1.0
                    col_out += k
                else:
                    out[:, col_out] = codes
                    col_out += 1
            else:
                if self.mode == "onehot":
                    span = self.max_[j] - self.min_[j]
                    if span > 0:
                        out[:, col_out] = (col - self.min_[j]) / span
                    # zero-range columns scale to 0 everywhere
                else:
                    out[:, col_out] = col
                col_out += 1
        return out
