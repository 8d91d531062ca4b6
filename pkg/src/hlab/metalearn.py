"""Classifier output difference and diversity clustering.

COD between two learners is the fraction of held-out instances on which
their predictions differ, pooled over every repeat and fold of a CV plan.
Hierarchical agglomerative clustering over the COD matrix, cut at a
distance threshold, yields clusters of behaviorally similar learners; one
representative (the medoid) per cluster gives a compact diverse set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cv import CvPlan
from .data import Dataset
from .hardness import cv_predictions

LINKAGES = ("average", "single", "complete")


@dataclass(frozen=True)
class CodMatrix:
    names: tuple[str, ...]
    d: np.ndarray

    def validate(self) -> None:
        n = len(self.names)
        if self.d.shape != (n, n):
            raise ValueError("distance matrix shape does not match names")
        if not np.allclose(self.d, self.d.T):
            raise ValueError("distance matrix must be symmetric")
        if np.abs(np.diag(self.d)).max(initial=0.0) > 0:
            raise ValueError("distance matrix must have a zero diagonal")
        if self.d.min(initial=0.0) < 0 or self.d.max(initial=0.0) > 1:
            raise ValueError("COD distances must lie in [0, 1]")

    def distance(self, a: str, b: str) -> float:
        i, j = self.names.index(a), self.names.index(b)
        return float(self.d[i, j])


@dataclass(frozen=True)
class Dendrogram:
    """Merge list in scipy convention: leaves are 0..n-1, merge ``k``
    creates node ``n + k`` from nodes ``left`` and ``right`` at ``height``."""

    leaves: tuple[str, ...]
    merges: tuple[tuple[int, int, float], ...]


def cod_distance(preds_a, preds_b) -> float:
    """Fraction of positions where two prediction vectors differ."""
    a = np.asarray(preds_a)
    b = np.asarray(preds_b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("prediction vectors must be 1-D and equal-length")
    if a.size == 0:
        raise ValueError("prediction vectors must be nonempty")
    return float((a != b).mean())


def cod_matrix(ds: Dataset, learner_set, plan: CvPlan) -> CodMatrix:
    """Pairwise COD over concatenated held-out predictions."""
    if len(learner_set) < 2:
        raise ValueError("need at least 2 learners for a COD matrix")
    preds = cv_predictions(ds, learner_set, plan)
    flat = preds.reshape(len(learner_set), -1)
    n = len(learner_set)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = cod_distance(flat[i], flat[j])
    return CodMatrix(names=tuple(s.name for s in learner_set), d=d)


def _linkage_distance(d, a_members, b_members, linkage):
    block = d[np.ix_(sorted(a_members), sorted(b_members))]
    if linkage == "average":
        return float(block.mean())
    if linkage == "single":
        return float(block.min())
    if linkage == "complete":
        return float(block.max())
    raise ValueError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")


def cluster(codm: CodMatrix, linkage: str = "average") -> Dendrogram:
    """Agglomerative clustering with a deterministic tie-break.

    Among pairs at the minimum distance, the merge goes to the pair whose
    (smallest leaf name, largest leaf name) tuple is lexicographically
    least.
    """
    codm.validate()
    names = codm.names
    n = len(names)
    if n < 2:
        raise ValueError("need at least 2 learners to cluster")
    # node id -> (member leaf indices, min leaf name)
    active: dict[int, set[int]] = {i: {i} for i in range(n)}
    merges = []
    next_id = n
    while len(active) > 1:
        best = None
        best_key = None
        for a in sorted(active):
            for b in sorted(active):
                if b <= a:
                    continue
                dist = _linkage_distance(codm.d, active[a], active[b], linkage)
                lo = min(min(names[i] for i in active[a]), min(names[i] for i in active[b]))
                hi = max(min(names[i] for i in active[a]), min(names[i] for i in active[b]))
                key = (dist, lo, hi)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (a, b)
        a, b = best
        merges.append((a, b, best_key[0]))
        active[next_id] = active.pop(a) | active.pop(b)
        next_id += 1
    return Dendrogram(leaves=names, merges=tuple(merges))


def cut(dend: Dendrogram, threshold: float) -> list[set[str]]:
    """Clusters remaining after dropping merges above ``threshold``.

    Returned as leaf-name sets, ordered by their smallest member name.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    n = len(dend.leaves)
    members: dict[int, set[int]] = {i: {i} for i in range(n)}
    next_id = n
    for left, right, height in dend.merges:
        if height <= threshold and left in members and right in members:
            members[next_id] = members.pop(left) | members.pop(right)
        next_id += 1
    clusters = [
        {dend.leaves[i] for i in group} for group in members.values()
    ]
    return sorted(clusters, key=lambda c: min(c))


def representatives(clusters, codm: CodMatrix) -> list[str]:
    """Medoid of each cluster: minimum summed COD to the other members."""
    if not clusters:
        raise ValueError("clusters must be nonempty")
    out = []
    for group in clusters:
        ordered = sorted(group)
        idx = [codm.names.index(name) for name in ordered]
        sums = codm.d[np.ix_(idx, idx)].sum(axis=1)
        out.append(ordered[int(np.argmin(sums))])
    return out


def to_newick(dend: Dendrogram) -> str:
    """Newick string with ultrametric branch lengths."""
    n = len(dend.leaves)
    height = {i: 0.0 for i in range(n)}
    label: dict[int, str] = {i: dend.leaves[i] for i in range(n)}
    node_id = n
    for left, right, h in dend.merges:
        l_branch = h - height[left]
        r_branch = h - height[right]
        label[node_id] = (
            f"({label[left]}:{l_branch:.6g},{label[right]}:{r_branch:.6g})"
        )
        height[node_id] = h
        node_id += 1
    return label[node_id - 1] + ";"
