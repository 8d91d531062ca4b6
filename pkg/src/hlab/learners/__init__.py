"""Base learner registry: declarative specs and trained, immutable models.

A :class:`LearnerSpec` names a learner kind plus kind-specific params.
:func:`train_learner` fits the matching estimator behind a fold-local
feature encoder and returns a :class:`FittedLearner` that predicts on raw
datasets.  The default learner set spans instance-based, probabilistic,
tree, neural and linear families; callers can extend it freely through
configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset
from ..encode import FeatureEncoder
from ..errors import SpecError
from ..util import content_hash
from .forest import RandomForestClassifier
from .knn import KnnClassifier
from .linear import PerceptronClassifier
from .mlp import (
    MlpClassifier,
    MlpState,
    default_hidden,
    init_mlp_state,
    mlp_decision_values,
    mlp_train_convergence,
    mlp_train_epochs,
)
from .naive_bayes import NaiveBayesClassifier
from .tree import C45TreeClassifier, DecisionStumpClassifier

__all__ = [
    "LearnerSpec",
    "FittedLearner",
    "train_learner",
    "default_learner_set",
    "validate_learner_set",
    "learner_set_hash",
    "KnnClassifier",
    "NaiveBayesClassifier",
    "PerceptronClassifier",
    "MlpClassifier",
    "MlpState",
    "C45TreeClassifier",
    "DecisionStumpClassifier",
    "RandomForestClassifier",
    "default_hidden",
    "init_mlp_state",
    "mlp_train_epochs",
    "mlp_train_convergence",
    "mlp_decision_values",
]

# kind -> (estimator class, feature view, allowed params, seeded?)
_REGISTRY = {
    "knn": (KnnClassifier, "onehot", {"k"}, False),
    "naive-bayes": (NaiveBayesClassifier, "codes", {"var_floor"}, False),
    "c45-tree": (C45TreeClassifier, "codes", {"min_leaf", "confidence", "prune"}, True),
    "perceptron": (PerceptronClassifier, "onehot", {"epochs", "lr", "averaged"}, True),
    "mlp": (
        MlpClassifier,
        "onehot",
        {"hidden", "lr", "lr_decay", "lr_min", "max_epochs"},
        True,
    ),
    "random-forest": (RandomForestClassifier, "codes", {"trees", "min_leaf"}, True),
    "decision-stump": (DecisionStumpClassifier, "codes", set(), False),
}


@dataclass(frozen=True)
class LearnerSpec:
    """Declarative configuration of one base learner."""

    kind: str
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _REGISTRY:
            raise SpecError(
                f"unknown learner kind {self.kind!r}; "
                f"expected one of {sorted(_REGISTRY)}"
            )
        allowed = _REGISTRY[self.kind][2]
        for key in self.params:
            if key not in allowed:
                raise SpecError(
                    f"invalid param {key!r} for kind {self.kind!r} "
                    f"(allowed: {sorted(allowed) or 'none'})"
                )

    @property
    def feature_view(self) -> str:
        return _REGISTRY[self.kind][1]

    def key(self) -> tuple:
        return (self.kind, self.name, tuple(sorted(self.params.items())))


def validate_learner_set(specs) -> None:
    if not specs:
        raise SpecError("learner set must not be empty")
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise SpecError(f"duplicate learner names: {dupes}")


def learner_set_hash(specs) -> str:
    """Order-invariant digest of a learner set."""
    return content_hash(*sorted(str(s.key()) for s in specs))


def default_learner_set() -> list[LearnerSpec]:
    """A small, diverse set covering the major learner families."""
    return [
        LearnerSpec("knn", "ib1", {"k": 1}),
        LearnerSpec("knn", "ib5", {"k": 5}),
        LearnerSpec("naive-bayes", "nb"),
        LearnerSpec("c45-tree", "c45"),
        LearnerSpec("perceptron", "per"),
        LearnerSpec("mlp", "mlp"),
        LearnerSpec("random-forest", "rf"),
    ]


def _schema_kwargs(spec: LearnerSpec, ds: Dataset, encoder: FeatureEncoder) -> dict:
    kwargs = {}
    if spec.feature_view == "codes":
        cat_idx = tuple(
            j for j, f in enumerate(ds.features) if f.is_categorical
        )
        kwargs["categorical_features"] = cat_idx
        kwargs["n_categories"] = tuple(
            len(ds.features[j].categories) for j in cat_idx
        )
    elif spec.kind == "knn":
        kwargs["categorical_blocks"] = encoder.categorical_blocks_
    return kwargs


def build_estimator(spec: LearnerSpec, ds: Dataset, encoder: FeatureEncoder, seed: int):
    cls, _, _, seeded = _REGISTRY[spec.kind]
    kwargs = dict(spec.params)
    kwargs.update(_schema_kwargs(spec, ds, encoder))
    if seeded:
        kwargs["random_state"] = seed
    return cls(**kwargs)


@dataclass
class FittedLearner:
    """A trained model plus the fold-local encoder it was trained behind."""

    spec: LearnerSpec
    encoder: FeatureEncoder
    estimator: object
    train_seed: int

    def predict(self, ds: Dataset) -> np.ndarray:
        return self.estimator.predict(self.encoder.transform(ds))

    def accuracy(self, ds: Dataset) -> float:
        return float((self.predict(ds) == ds.y).mean())


def train_learner(spec: LearnerSpec, ds: Dataset, seed: int) -> FittedLearner:
    """Fit ``spec`` on ``ds``; deterministic given (spec, data, seed)."""
    if ds.n_instances == 0:
        raise ValueError("cannot train on an empty dataset")
    encoder = FeatureEncoder(mode=spec.feature_view).fit(ds)
    estimator = build_estimator(spec, ds, encoder, seed)
    estimator.fit(encoder.transform(ds), ds.y)
    return FittedLearner(spec=spec, encoder=encoder, estimator=estimator, train_seed=seed)
