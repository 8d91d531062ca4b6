"""Experiment runner: the method grid over datasets with cached hardness.

Every (dataset, method) cell runs the full evaluation CV; training folds
that need instance hardness (filtering, curriculum) compute it with a
nested CV on the training fold only and cache the profile keyed by the
training-fold content hash, so test instances can never influence it and
concurrent workers converge on identical files.  Results append to a
JSONL log keyed by the config hash, which makes interrupted runs resume
for free.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig, MethodSpec
from .cv import make_cv_plan
from .data import Dataset, load_table
from .ensemble import filtered_method
from .hardness import compute_profile, load_profile, profile_provenance, save_profile
from .learners import learner_set_hash, train_learner
from .util import content_hash, split_seed

CACHE_ENV_VAR = "HLAB_CACHE_DIR"


@dataclass
class RunRecord:
    dataset: str
    method: str
    accuracies: list = field(default_factory=list)
    mean_accuracy: float = math.nan
    seconds: float = 0.0
    config_hash: str = ""
    error: str | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "dataset": self.dataset,
                "method": self.method,
                "accuracies": self.accuracies,
                "mean_accuracy": self.mean_accuracy,
                "seconds": self.seconds,
                "config_hash": self.config_hash,
                "error": self.error,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        raw = json.loads(line)
        return cls(
            dataset=raw["dataset"],
            method=raw["method"],
            accuracies=list(raw.get("accuracies", [])),
            mean_accuracy=raw.get("mean_accuracy", math.nan),
            seconds=raw.get("seconds", 0.0),
            config_hash=raw.get("config_hash", ""),
            error=raw.get("error"),
        )


def resolve_cache_dir(out_dir: str, cache_dir: str | None = None) -> str:
    env = os.environ.get(CACHE_ENV_VAR)
    chosen = cache_dir or env or os.path.join(out_dir, "cache")
    os.makedirs(chosen, exist_ok=True)
    return chosen


def fold_profile(train: Dataset, cfg: ExperimentConfig, inner_seed: int, cache_dir: str):
    """Hardness profile of a training fold, disk-cached by content.

    The cache key covers the fold's instances, the learner set and the
    inner CV shape; it contains nothing about test data, so cache entries
    are untouched by anything outside the fold.
    """
    key = content_hash(
        train.content_hash(),
        learner_set_hash(cfg.learners),
        cfg.ih_repeats,
        cfg.ih_folds,
        inner_seed,
    )
    path = os.path.join(cache_dir, f"ih_{key}.tsv")
    plan = make_cv_plan(train, cfg.ih_repeats, cfg.ih_folds, inner_seed)
    expected = profile_provenance(train, cfg.learners, plan)
    if os.path.exists(path):
        return load_profile(path, expected_provenance=expected)
    profile = compute_profile(train, cfg.learners, plan)
    tmp = path + f".tmp.{os.getpid()}"
    save_profile(profile, tmp)
    os.replace(tmp, path)  # atomic under concurrent writers
    return profile


def _train_for_method(
    method: MethodSpec, cfg: ExperimentConfig, train: Dataset, seed: int, profile
):
    base = cfg.resolve_base(method.base)
    tau = float(method.params.get("tau", cfg.tau)) if method.filtered else None
    if method.kind == "plain" and not method.filtered:
        return train_learner(base, train, seed)
    m = int(method.params.get("iterations", cfg.boost_iterations))
    schedule = cfg.schedule_for(method) if method.kind == "curriculum" else None
    return filtered_method(
        method.kind,
        train,
        profile,
        base,
        seed,
        tau=tau,
        m=m,
        schedule=schedule,
        prune_between=bool(method.params.get("prune_between", cfg.prune_between)),
    )


def method_needs_profile(method: MethodSpec) -> bool:
    return method.filtered or method.kind == "curriculum"


def run_cell(args) -> RunRecord:
    """One (dataset, method) cell: every fold trained and scored."""
    cfg, ds_name, ds, method, cache_dir, cfg_hash = args
    start = time.time()
    try:
        plan = make_cv_plan(
            ds, cfg.cv_repeats, cfg.cv_folds, split_seed(cfg.master_seed, "cv", ds_name)
        )
        accs = []
        for r, f, train_rows, test_rows in plan.iter_splits():
            train = ds.subset(train_rows)
            test = ds.subset(test_rows)
            profile = None
            if method_needs_profile(method):
                inner_seed = split_seed(cfg.master_seed, "ih", ds_name, r, f)
                profile = fold_profile(train, cfg, inner_seed, cache_dir)
            seed = split_seed(cfg.master_seed, "run", ds_name, method.name, r, f)
            model = _train_for_method(method, cfg, train, seed, profile)
            accs.append(float((model.predict(test) == test.y).mean()))
        return RunRecord(
            dataset=ds_name,
            method=method.name,
            accuracies=accs,
            mean_accuracy=float(np.mean(accs)),
            seconds=time.time() - start,
            config_hash=cfg_hash,
        )
    except Exception as exc:
        return RunRecord(
            dataset=ds_name,
            method=method.name,
            seconds=time.time() - start,
            config_hash=cfg_hash,
            error=f"{type(exc).__name__}: {exc}",
        )


def load_records(path) -> list[RunRecord]:
    records = []
    if os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    records.append(RunRecord.from_json(line))
    return records


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: str,
    workers: int = 1,
    cache_dir: str | None = None,
    log=None,
) -> list[RunRecord]:
    """Run every configured (dataset, method) cell that is not yet done.

    Returns the full record list in canonical (dataset, method) config
    order, mixing cached and fresh results.  Failures become error
    records rather than aborting the run.
    """
    cfg.validate()
    os.makedirs(out_dir, exist_ok=True)
    cache_dir = resolve_cache_dir(out_dir, cache_dir)
    cfg_hash = cfg.config_hash()
    records_path = os.path.join(out_dir, "records.jsonl")

    existing = {}
    for rec in load_records(records_path):
        if rec.config_hash == cfg_hash and rec.error is None:
            existing[(rec.dataset, rec.method)] = rec

    datasets = {
        name: load_table(path, class_col=cfg.class_cols.get(name))
        for name, path in cfg.datasets.items()
    }

    todo = []
    for ds_name in cfg.datasets:
        for method in cfg.methods:
            if (ds_name, method.name) not in existing:
                todo.append(
                    (cfg, ds_name, datasets[ds_name], method, cache_dir, cfg_hash)
                )

    fresh = {}
    if todo:
        if workers <= 1:
            results = map(run_cell, todo)
        else:
            pool = ProcessPoolExecutor(max_workers=workers)
            results = pool.map(run_cell, todo)
        with open(records_path, "a") as fh:
            for rec in results:
                fresh[(rec.dataset, rec.method)] = rec
                fh.write(rec.to_json() + "\n")
                fh.flush()
                if log is not None:
                    status = "failed" if rec.error else f"{rec.mean_accuracy:.4f}"
                    log(f"{rec.dataset} / {rec.method}: {status} ({rec.seconds:.1f}s)")
        if workers > 1:
            pool.shutdown()

    ordered = []
    for ds_name in cfg.datasets:
        for method in cfg.methods:
            key = (ds_name, method.name)
            ordered.append(existing.get(key) or fresh[key])
    return ordered


def failed_records(records) -> list[RunRecord]:
    return [r for r in records if r.error is not None]
