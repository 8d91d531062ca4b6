"""Hardness filtering, AdaBoost.M1, MultiBoost, and filtered compositions.

Filtering removes every instance whose hardness is at or above a threshold
(default 0.75) from training data; evaluation always happens on unfiltered
test data.  Boosting here is the resampling flavor: each round draws a
bootstrap sample from the current weight distribution, trains the base
learner on it, and reweights using the exact weighted error on the full
training set.  MultiBoost wraps the same rounds in wagging restarts with
unit-mean exponential weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curriculum import Schedule, curriculum_train_dt, curriculum_train_mlp
from .data import Dataset
from .errors import FilterError, SpecError
from .hardness import HardnessProfile
from .learners import FittedLearner, LearnerSpec, train_learner
from .util import split_seed

METHOD_KINDS = ("plain", "adaboost", "multiboost", "curriculum")


@dataclass(frozen=True)
class FilterSpec:
    """Hardness threshold; instances with ih >= tau are removed."""

    tau: float = 0.75

    def __post_init__(self):
        if not 0.0 < self.tau <= 1.0:
            raise SpecError("tau must lie in (0, 1]")


def filter_rows(profile: HardnessProfile, tau: float) -> np.ndarray:
    """Row positions that survive filtering at ``tau`` (ih < tau)."""
    return np.flatnonzero(profile.ih < tau)


def filter_by_ih(ds: Dataset, profile: HardnessProfile, spec: FilterSpec = FilterSpec()) -> Dataset:
    """Keep exactly the instances with ih < tau; ids are preserved.

    Raises :class:`FilterError` when fewer than two classes survive.
    """
    if profile.n_instances != ds.n_instances:
        raise SpecError("hardness profile does not cover the dataset")
    rows = filter_rows(profile, spec.tau)
    survivors = np.unique(ds.y[rows])
    if len(survivors) < 2:
        if len(survivors) == 0:
            raise FilterError(
                f"filtering at tau={spec.tau} removes every instance"
            )
        name = ds.classes[int(survivors[0])]
        raise FilterError(
            f"filtering at tau={spec.tau} leaves a single class ({name!r})"
        )
    return ds.subset(rows)


@dataclass
class BoostEnsemble:
    """Weighted-vote committee produced by a boosting run."""

    members: list[tuple[FittedLearner, float]]
    algorithm: str
    iterations_requested: int
    iterations_completed: int

    def predict(self, ds: Dataset) -> np.ndarray:
        if not self.members:
            raise ValueError("ensemble has no members")
        preds = np.stack([m.predict(ds) for m, _ in self.members])
        alphas = np.array([a for _, a in self.members])
        n_labels = int(preds.max()) + 1
        out = np.empty(ds.n_instances, dtype=np.int64)
        for i in range(ds.n_instances):
            out[i] = np.argmax(np.bincount(preds[:, i], weights=alphas, minlength=n_labels))
        return out

    def accuracy(self, ds: Dataset) -> float:
        return float((self.predict(ds) == ds.y).mean())


def predict_ensemble(ens: BoostEnsemble, ds: Dataset) -> np.ndarray:
    return ens.predict(ds)


def _wagging_weights(rng: np.random.Generator, n: int) -> np.ndarray:
    w = rng.exponential(1.0, size=n)
    return w / w.sum()


def boost_round_update(w: np.ndarray, misclassified: np.ndarray):
    """One AdaBoost.M1 weight update.

    Returns ``(eps, alpha, w_next, kept)``: the weighted error under ``w``,
    the member's vote weight (None for a discarded round), the next
    distribution, and whether the round's model joins the ensemble.
    Discarded rounds (eps >= 1/2) and perfect rounds (eps = 0, error
    clamped to 1/(2n) for the vote weight) both reset to uniform.
    """
    n = len(w)
    uniform = np.full(n, 1.0 / n)
    eps = float(w[misclassified].sum())
    if eps >= 0.5:
        return eps, None, uniform, False
    if eps == 0.0:
        clamp = 1.0 / (2.0 * n)
        return eps, math.log((1.0 - clamp) / clamp), uniform, True
    alpha = math.log((1.0 - eps) / eps)
    w_next = w * np.exp(alpha * misclassified)
    return eps, alpha, w_next / w_next.sum(), True


def _boost(base, ds, m, seed, restarts, algorithm, trace=None):
    if m < 1:
        raise SpecError("boosting needs at least one iteration")
    n = ds.n_instances
    rng = np.random.default_rng(seed)
    w = np.full(n, 1.0 / n)
    members: list[tuple[FittedLearner, float]] = []
    for t in range(m):
        sample = rng.choice(n, size=n, replace=True, p=w)
        try:
            model = train_learner(base, ds.subset(sample), split_seed(seed, "round", t))
        except Exception as exc:
            raise SpecError(f"base training failed in round {t}: {exc}") from exc
        mis = model.predict(ds) != ds.y
        eps, alpha, w_next, kept = boost_round_update(w, mis)
        if kept:
            members.append((model, alpha))
        if trace is not None:
            trace.append(
                {
                    "round": t,
                    "eps": eps,
                    "alpha": alpha,
                    "kept": kept,
                    "misclassified": mis.copy(),
                    "weights_before": w.copy(),
                    "weights_after": w_next.copy(),
                }
            )
        w = w_next
        if t + 1 in restarts and t + 1 < m:
            w = _wagging_weights(rng, n)
    if not members:
        # every round exceeded error 0.5; degrade to a single plain model
        model = train_learner(base, ds, split_seed(seed, "fallback"))
        members = [(model, 1.0)]
    return BoostEnsemble(
        members=members,
        algorithm=algorithm,
        iterations_requested=m,
        iterations_completed=len(members),
    )


def adaboost(
    base: LearnerSpec, ds: Dataset, m: int = 10, seed: int = 0, trace=None
) -> BoostEnsemble:
    """AdaBoost.M1 with resampling.

    Rounds with weighted error >= 1/2 are discarded and the distribution
    resets to uniform; perfect rounds keep a member whose vote weight uses
    the error clamped to 1/(2n), then also reset.
    """
    return _boost(base, ds, m, seed, restarts=frozenset(), algorithm="adaboost", trace=trace)


def multiboost(
    base: LearnerSpec, ds: Dataset, m: int = 10, seed: int = 0, trace=None
) -> BoostEnsemble:
    """AdaBoost.M1 wrapped in wagging restarts.

    With ``k = ceil(sqrt(m))``, the weight vector is re-drawn from
    unit-mean exponential wagging weights after rounds ``ceil(j*m/k)``
    for j = 1..k (the final boundary is a no-op).
    """
    if m < 1:
        raise SpecError("boosting needs at least one iteration")
    k = math.ceil(math.sqrt(m))
    restarts = frozenset(math.ceil(j * m / k) for j in range(1, k + 1))
    return _boost(
        base, ds, m, seed, restarts=restarts, algorithm="multiboost", trace=trace
    )


def committee_restarts(m: int) -> list[int]:
    """Wagging restart rounds used by :func:`multiboost` (1-based)."""
    k = math.ceil(math.sqrt(m))
    return sorted({math.ceil(j * m / k) for j in range(1, k + 1)})


def filtered_method(
    method: str,
    ds: Dataset,
    profile: HardnessProfile,
    base: LearnerSpec,
    seed: int,
    tau: float | None = 0.75,
    m: int = 10,
    schedule: Schedule | None = None,
    prune_between: bool = True,
):
    """Optionally filter the training data at ``tau``, then run ``method``.

    The hardness profile must have been computed on ``ds`` itself (the
    training fold), never on test data; the returned model is evaluated
    downstream on untouched test folds.
    """
    if method not in METHOD_KINDS:
        raise SpecError(f"unknown method {method!r}; expected one of {METHOD_KINDS}")
    if tau is not None:
        work = filter_by_ih(ds, profile, FilterSpec(tau))
        work_profile = profile.subset(filter_rows(profile, tau))
    else:
        work, work_profile = ds, profile

    if method == "plain":
        return train_learner(base, work, seed)
    if method == "adaboost":
        return adaboost(base, work, m, seed)
    if method == "multiboost":
        return multiboost(base, work, m, seed)
    sched = schedule if schedule is not None else Schedule()
    if base.kind == "mlp":
        return curriculum_train_mlp(work, work_profile, sched, base, seed).model
    if base.kind == "c45-tree":
        return curriculum_train_dt(
            work, work_profile, sched, base, prune_between=prune_between, seed=seed
        ).model
    raise SpecError(f"curriculum training supports mlp and c45-tree, got {base.kind!r}")
