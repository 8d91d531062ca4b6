"""Hardness-ordered curriculum training.

A schedule starts with the instances at or below an initial hardness
threshold and raises the threshold in fixed steps until every instance is
in the training set.  For MLPs the weights persist across stages and each
stage either trains a fixed number of epochs or trains to convergence; the
final stage is always a convergence pass over the full set.  For decision
trees a tree is induced on the first stage and later stages route the
newly admitted instances to leaves, optionally pruning first, and expand
the receiving leaves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .encode import FeatureEncoder
from .errors import SpecError
from .hardness import HardnessProfile
from .learners import (
    FittedLearner,
    LearnerSpec,
    build_estimator,
    train_learner,
)
from .learners.mlp import (
    MlpClassifier,
    mlp_train_convergence,
    mlp_train_epochs,
    _one_hot,
)

TRIGGERS = ("every_n_epochs", "convergence")

# Tolerance when comparing float hardness against a stage threshold.
_TAU_EPS = 1e-12


@dataclass(frozen=True)
class Schedule:
    """Curriculum policy: initial threshold, step size, stage trigger."""

    initial_ih: float = 0.0
    step: float = 0.1
    trigger: str = "every_n_epochs"
    n: int = 100

    def __post_init__(self):
        if not 0.0 <= self.initial_ih <= 1.0:
            raise SpecError("initial_ih must lie in [0, 1]")
        if self.step <= 0.0:
            raise SpecError("step must be positive")
        if self.trigger not in TRIGGERS:
            raise SpecError(f"trigger must be one of {TRIGGERS}")
        if self.trigger == "every_n_epochs" and self.n < 1:
            raise SpecError("n must be >= 1 for the every_n_epochs trigger")


@dataclass(frozen=True)
class StageRecord:
    stage: int
    threshold: float
    active: int
    action: str


@dataclass
class CurriculumResult:
    model: FittedLearner
    log: list[StageRecord]


def stage_thresholds(sched: Schedule) -> list[float]:
    """[initial, initial + step, ...], capped so the last stage is exactly 1."""
    out = []
    k = 0
    while True:
        t = sched.initial_ih + k * sched.step
        if t >= 1.0 - 1e-9:
            break
        out.append(round(t, 9))
        k += 1
    out.append(1.0)
    return out


def write_stage_log(log, path) -> None:
    with open(path, "w") as fh:
        fh.write("stage\tthreshold\tactive\tepochs_or_converged\n")
        for rec in log:
            fh.write(f"{rec.stage}\t{rec.threshold:g}\t{rec.active}\t{rec.action}\n")


def _active_rows(profile: HardnessProfile, tau: float) -> np.ndarray:
    return np.flatnonzero(profile.ih <= tau + _TAU_EPS)


def curriculum_train_mlp(
    ds: Dataset,
    profile: HardnessProfile,
    sched: Schedule,
    spec: LearnerSpec,
    seed: int,
) -> CurriculumResult:
    """Stage-wise MLP training over a hardness ordering.

    Weights, learning rate and the shuffle stream persist across stages.
    Stages before the last run the schedule's trigger action (the
    convergence trigger resets the learning rate afterwards so the next
    stage can train); the final stage is a convergence pass on the full
    training set.  A degenerate single-stage schedule therefore reproduces
    plain convergence training exactly.
    """
    if spec.kind != "mlp":
        raise SpecError(f"curriculum_train_mlp needs an mlp spec, got {spec.kind!r}")
    if profile.n_instances != ds.n_instances:
        raise SpecError("hardness profile does not cover the dataset")

    classes = np.unique(ds.y)
    if len(classes) == 1:
        return CurriculumResult(model=train_learner(spec, ds, seed), log=[])

    encoder = FeatureEncoder(mode=spec.feature_view).fit(ds)
    X = encoder.transform(ds)
    Y = _one_hot(np.searchsorted(classes, ds.y), len(classes))

    template = build_estimator(spec, ds, encoder, seed)
    lr0 = template.lr
    state = template._init_state(X.shape[1], len(classes))

    thresholds = stage_thresholds(sched)
    log: list[StageRecord] = []
    for si, tau in enumerate(thresholds):
        final = si == len(thresholds) - 1
        rows = np.arange(ds.n_instances) if final else _active_rows(profile, tau)
        if rows.size == 0:
            log.append(StageRecord(si, tau, 0, "skipped"))
            continue
        if final:
            before = state.epochs_run
            mlp_train_convergence(
                state, X[rows], Y[rows],
                lr_decay=template.lr_decay, lr_min=template.lr_min,
                max_epochs=template.max_epochs,
            )
            action = f"converged:{state.epochs_run - before}"
        elif sched.trigger == "every_n_epochs":
            mlp_train_epochs(state, X[rows], Y[rows], sched.n)
            action = f"epochs:{sched.n}"
        else:
            before = state.epochs_run
            mlp_train_convergence(
                state, X[rows], Y[rows],
                lr_decay=template.lr_decay, lr_min=template.lr_min,
                max_epochs=template.max_epochs,
            )
            action = f"converged:{state.epochs_run - before}"
            state.lr = lr0  # re-arm for the next stage
        log.append(StageRecord(si, tau, int(rows.size), action))

    est = MlpClassifier(**template.get_params())
    est.n_features_in_ = X.shape[1]
    est.classes_ = classes
    est.constant_ = None
    est.state_ = state
    est.train_meta_ = {
        "epochs": state.epochs_run,
        "final_lr": state.lr,
        "decay_events": state.decay_events,
    }
    model = FittedLearner(spec=spec, encoder=encoder, estimator=est, train_seed=seed)
    return CurriculumResult(model=model, log=log)


def curriculum_train_dt(
    ds: Dataset,
    profile: HardnessProfile,
    sched: Schedule,
    spec: LearnerSpec,
    prune_between: bool = True,
    seed: int = 0,
) -> CurriculumResult:
    """Stage-wise decision-tree growth over a hardness ordering.

    The first nonempty stage induces a tree normally; each later stage
    takes the newly admitted instances, optionally prunes first, routes
    them to leaves and attempts to expand the leaves they reach.  Internal
    structure above the leaves is never modified.
    """
    if spec.kind != "c45-tree":
        raise SpecError(f"curriculum_train_dt needs a c45-tree spec, got {spec.kind!r}")
    if profile.n_instances != ds.n_instances:
        raise SpecError("hardness profile does not cover the dataset")

    encoder = FeatureEncoder(mode=spec.feature_view).fit(ds)
    X = encoder.transform(ds)

    thresholds = stage_thresholds(sched)
    log: list[StageRecord] = []
    est = None
    prev = np.zeros(ds.n_instances, dtype=bool)
    for si, tau in enumerate(thresholds):
        final = si == len(thresholds) - 1
        mask = (
            np.ones(ds.n_instances, dtype=bool)
            if final
            else profile.ih <= tau + _TAU_EPS
        )
        rows = np.flatnonzero(mask)
        if rows.size == 0:
            log.append(StageRecord(si, tau, 0, "skipped"))
            continue
        if est is None:
            est = build_estimator(spec, ds, encoder, seed)
            # later stages may add classes the first stage has not seen
            est.set_params(class_values=tuple(int(c) for c in np.unique(ds.y)))
            est.fit(X[rows], ds.y[rows])
            action = f"induced:{est.node_count_}"
        else:
            new_rows = np.flatnonzero(mask & ~prev)
            if new_rows.size == 0:
                if prune_between:
                    est = est.pruned()
                    action = f"pruned:{est.node_count_}"
                else:
                    action = f"expanded:{est.node_count_}"
            else:
                est = est.expand_leaves(
                    X[new_rows], ds.y[new_rows], prune_first=prune_between
                )
                action = f"expanded:{est.node_count_}"
        prev = mask
        log.append(StageRecord(si, tau, int(rows.size), action))

    if est is None:
        raise SpecError("no stage had any active instances")
    model = FittedLearner(spec=spec, encoder=encoder, estimator=est, train_seed=seed)
    return CurriculumResult(model=model, log=log)
