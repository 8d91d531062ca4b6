"""Paired method comparison and convexity proxies.

The Wilcoxon signed-rank test drops zero differences, gives tied absolute
differences their average rank, and uses the exact null distribution of
the positive-rank sum (computed over all 2^n sign assignments) up to
n_effective = 20; beyond that a normal approximation with tie and
continuity corrections takes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .cv import CvPlan
from .data import Dataset
from .learners import LearnerSpec, train_learner
from .util import split_seed

EXACT_LIMIT = 20

_ALTERNATIVES = {
    "greater": "greater",
    "a_greater": "greater",
    "two-sided": "two-sided",
    "two_sided": "two-sided",
}


@dataclass(frozen=True)
class PairedResults:
    """Per-dataset accuracy pairs for two methods."""

    names: tuple[str, str]
    pairs: np.ndarray  # shape (n, 2)

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] < 1:
            raise ValueError("pairs must have shape (n >= 1, 2)")
        if pairs.min() < 0.0 or pairs.max() > 1.0:
            raise ValueError("accuracies must lie in [0, 1]")
        object.__setattr__(self, "pairs", pairs)

    def differences(self) -> np.ndarray:
        return self.pairs[:, 0] - self.pairs[:, 1]

    def swapped(self) -> "PairedResults":
        return PairedResults(
            names=(self.names[1], self.names[0]), pairs=self.pairs[:, ::-1]
        )


@dataclass(frozen=True)
class TestResult:
    p_value: float
    statistic: float  # positive-rank sum W+
    n_effective: int
    direction: str
    method: str


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) with ties sharing their mean rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_tail_counts(doubled_ranks: np.ndarray, w2: int) -> tuple[int, int]:
    """Subset counts with doubled rank sum >= w2 and <= w2.

    Convolution over the doubled (integer) ranks enumerates the full
    2^n sign-assignment distribution exactly.
    """
    total = int(doubled_ranks.sum())
    poly = np.zeros(total + 1, dtype=np.int64)
    poly[0] = 1
    for r in doubled_ranks:
        r = int(r)
        shifted = np.zeros_like(poly)
        shifted[r:] = poly[: total + 1 - r]
        poly = poly + shifted
    return int(poly[w2:].sum()), int(poly[: w2 + 1].sum())


def wilcoxon_signed_rank(
    pr: PairedResults, alternative: str = "greater", method: str = "auto"
) -> TestResult:
    """Signed-rank test on the paired accuracy differences.

    ``alternative="greater"`` tests whether the first method beats the
    second; ``"two-sided"`` doubles the smaller tail.  ``method`` forces
    ``"exact"`` or ``"normal"``; ``"auto"`` switches at n_effective = 20.
    """
    if alternative not in _ALTERNATIVES:
        raise ValueError(
            f"alternative must be one of {sorted(set(_ALTERNATIVES))}"
        )
    alternative = _ALTERNATIVES[alternative]
    diffs = pr.differences()
    diffs = diffs[diffs != 0.0]
    n = len(diffs)
    if n == 0:
        return TestResult(1.0, 0.0, 0, alternative, "degenerate")

    abs_d = np.abs(diffs)
    ranks = _average_ranks(abs_d)
    w_plus = float(ranks[diffs > 0].sum())

    if method == "auto":
        method = "exact" if n <= EXACT_LIMIT else "normal"
    if method == "exact":
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        w2 = int(round(2.0 * w_plus))
        count_ge, count_le = _exact_tail_counts(doubled, w2)
        denom = float(2**n)
        p_greater = count_ge / denom
        p_less = count_le / denom
        p = p_greater if alternative == "greater" else min(1.0, 2.0 * min(p_greater, p_less))
    elif method == "normal":
        mu = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0
        _, tie_counts = np.unique(abs_d, return_counts=True)
        var -= float((tie_counts**3 - tie_counts).sum()) / 48.0
        sd = math.sqrt(var)
        norm = NormalDist()
        if alternative == "greater":
            z = (w_plus - mu - 0.5) / sd
            p = 1.0 - norm.cdf(z)
        else:
            z = (abs(w_plus - mu) - 0.5) / sd
            p = min(1.0, 2.0 * (1.0 - norm.cdf(z)))
        p = min(max(p, 0.0), 1.0)
    else:
        raise ValueError("method must be 'auto', 'exact' or 'normal'")
    return TestResult(p, w_plus, n, alternative, method)


def win_tie_loss(pr: PairedResults, epsilon: float = 0.0) -> tuple[int, int, int]:
    """Counts of pairs where A beats, ties with, or loses to B within epsilon."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    diffs = pr.differences()
    greater = int((diffs > epsilon).sum())
    less = int((diffs < -epsilon).sum())
    return greater, len(diffs) - greater - less, less


@dataclass(frozen=True)
class ConvexityResult:
    """Relative nonlinear-over-linear accuracy gaps; NaN when undefined."""

    mlp_per: float
    rf_lin: float
    mlp_accuracy: float
    perceptron_accuracy: float
    forest_accuracy: float
    linear_accuracy: float


def cv_accuracy(spec: LearnerSpec, ds: Dataset, plan: CvPlan, seed: int) -> float:
    """Mean held-out accuracy of ``spec`` over every (repeat, fold)."""
    accs = []
    for r, f, train_rows, test_rows in plan.iter_splits():
        model = train_learner(
            spec, ds.subset(train_rows), split_seed(seed, spec.name, r, f)
        )
        accs.append(float((model.predict(ds.subset(test_rows)) == ds.y[test_rows]).mean()))
    return float(np.mean(accs))


def convexity_measures(ds: Dataset, plan: CvPlan, seed: int = 0) -> ConvexityResult:
    """Nonlinearity proxies: MLP vs perceptron and forest vs linear model.

    Each value is (nonlinear - linear) / linear over mean CV accuracy; the
    linear side of the forest comparison is an averaged perceptron.
    """
    a_mlp = cv_accuracy(LearnerSpec("mlp", "cx-mlp"), ds, plan, seed)
    a_per = cv_accuracy(LearnerSpec("perceptron", "cx-per"), ds, plan, seed)
    a_rf = cv_accuracy(LearnerSpec("random-forest", "cx-rf"), ds, plan, seed)
    a_lin = cv_accuracy(
        LearnerSpec("perceptron", "cx-lin", {"averaged": True}), ds, plan, seed
    )
    mlp_per = (a_mlp - a_per) / a_per if a_per > 0 else math.nan
    rf_lin = (a_rf - a_lin) / a_lin if a_lin > 0 else math.nan
    return ConvexityResult(
        mlp_per=mlp_per,
        rf_lin=rf_lin,
        mlp_accuracy=a_mlp,
        perceptron_accuracy=a_per,
        forest_accuracy=a_rf,
        linear_accuracy=a_lin,
    )
