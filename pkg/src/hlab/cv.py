"""Repeated stratified cross-validation plans.

A plan is a pure function of the dataset and the master seed: repeat ``r``
draws its fold assignment from ``split_seed(master_seed, "repeat", r)``, so
plans are reproducible and independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .util import content_hash, split_seed


@dataclass(frozen=True)
class CvPlan:
    """Fold assignments for ``repeats`` rounds of ``folds``-fold CV.

    ``assignments[r, i]`` is the fold index of dataset row ``i`` in repeat
    ``r``.  Every repeat is stratified: within each class, fold counts
    differ by at most one.
    """

    repeats: int
    folds: int
    assignments: np.ndarray
    seeds: tuple[int, ...]

    @property
    def n_instances(self) -> int:
        return self.assignments.shape[1]

    def test_rows(self, repeat: int, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments[repeat] == fold)

    def train_rows(self, repeat: int, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments[repeat] != fold)

    def iter_splits(self):
        for r in range(self.repeats):
            for f in range(self.folds):
                yield r, f, self.train_rows(r, f), self.test_rows(r, f)

    def content_hash(self) -> str:
        return content_hash(self.assignments, self.repeats, self.folds, *self.seeds)


def make_cv_plan(ds: Dataset, repeats: int, folds: int, master_seed: int) -> CvPlan:
    """Build a stratified plan for ``ds``.

    Classes with fewer instances than ``folds`` simply appear in fewer
    folds.  Dealing starts at a rotating fold offset per class so total
    fold sizes stay balanced too.
    """
    n = ds.n_instances
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if folds > n:
        raise ValueError(f"folds={folds} exceeds the {n} available instances")

    # classes absent from a subset are simply skipped by stratification
    seeds = tuple(split_seed(master_seed, "repeat", r) for r in range(repeats))
    assignments = np.empty((repeats, n), dtype=np.int64)
    for r, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        offset = 0
        for c in range(len(ds.classes)):
            rows = np.flatnonzero(ds.y == c)
            rng.shuffle(rows)
            for j, row in enumerate(rows):
                assignments[r, row] = (offset + j) % folds
            offset = (offset + len(rows)) % folds
    return CvPlan(repeats=repeats, folds=folds, assignments=assignments, seeds=seeds)
