"""Instance hardness from cross-validated ensemble voting.

Every instance is predicted once per (learner, repeat) by a model that
never saw it during training.  Hardness is one minus the fraction of
correct predictions over all trials, i.e. the estimated misclassification
likelihood under a uniform prior over the learner set.  Learners and
repeats weigh equally, and results are independent of the order learners
are listed in.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .cv import CvPlan
from .data import Dataset
from .errors import HlabError, ParseError, ProvenanceError
from .learners import learner_set_hash, train_learner, validate_learner_set
from .util import content_hash, split_seed

_PROFILE_HEADER = "instance_id\tih\tn_trials\tn_correct"
_MATRIX_HEADER = "instance_id\tlearner\trepeat\tcorrect"


@dataclass
class CorrectnessMatrix:
    """0/1 held-out correctness per (instance, learner, repeat)."""

    learner_names: tuple[str, ...]
    correct: np.ndarray  # shape (n_instances, n_learners, n_repeats), int8
    provenance: str
    dataset_hash: str = ""
    learners_hash: str = ""

    @property
    def n_instances(self) -> int:
        return self.correct.shape[0]

    @property
    def n_trials(self) -> int:
        return self.correct.shape[1] * self.correct.shape[2]

    def validate(self) -> None:
        if self.correct.ndim != 3:
            raise ValueError("correctness matrix must be 3-dimensional")
        if self.correct.shape[1] != len(self.learner_names):
            raise ValueError("learner axis does not match the name list")
        bad = (self.correct != 0) & (self.correct != 1)
        if bad.any():
            raise ValueError("correctness entries must be 0 or 1")


@dataclass
class HardnessProfile:
    """Per-instance hardness plus the trial record it came from."""

    ih: np.ndarray
    matrix: CorrectnessMatrix
    provenance: str
    ids: np.ndarray

    @property
    def n_instances(self) -> int:
        return len(self.ih)

    @property
    def dataset_hash(self) -> str:
        return self.matrix.dataset_hash

    @property
    def learners_hash(self) -> str:
        return self.matrix.learners_hash

    def subset(self, rows) -> "HardnessProfile":
        rows = np.asarray(rows, dtype=np.int64)
        return HardnessProfile(
            ih=self.ih[rows].copy(),
            matrix=CorrectnessMatrix(
                learner_names=self.matrix.learner_names,
                correct=self.matrix.correct[rows].copy(),
                provenance=self.matrix.provenance + ":subset",
                dataset_hash=self.matrix.dataset_hash + ":subset",
                learners_hash=self.matrix.learners_hash,
            ),
            provenance=self.provenance + ":subset",
            ids=self.ids[rows].copy(),
        )


def profile_provenance(ds: Dataset, learner_set, plan: CvPlan) -> str:
    return content_hash(
        ds.content_hash(), learner_set_hash(learner_set), plan.content_hash()
    )


def cv_predictions(ds: Dataset, learner_set, plan: CvPlan) -> np.ndarray:
    """Held-out predictions, shape (n_learners, repeats, n_instances).

    Per-learner training seeds derive from the repeat seed and the learner
    *name*, so reordering the learner list cannot change any prediction.
    """
    validate_learner_set(learner_set)
    if plan.n_instances != ds.n_instances:
        raise ValueError("plan was built for a different dataset size")
    preds = np.empty((len(learner_set), plan.repeats, ds.n_instances), dtype=np.int64)
    for r, f, train_rows, test_rows in plan.iter_splits():
        train = ds.subset(train_rows)
        test = ds.subset(test_rows)
        for li, spec in enumerate(learner_set):
            seed = split_seed(plan.seeds[r], spec.name, f)
            try:
                model = train_learner(spec, train, seed)
                preds[li, r, test_rows] = model.predict(test)
            except Exception as exc:
                raise HlabError(
                    f"training failed for learner={spec.name!r} "
                    f"repeat={r} fold={f}: {exc}"
                ) from exc
    return preds


def correctness_matrix(ds: Dataset, learner_set, plan: CvPlan) -> CorrectnessMatrix:
    preds = cv_predictions(ds, learner_set, plan)
    correct = (preds == ds.y[None, None, :]).astype(np.int8)
    return CorrectnessMatrix(
        learner_names=tuple(s.name for s in learner_set),
        correct=np.transpose(correct, (2, 0, 1)).copy(),
        provenance=profile_provenance(ds, learner_set, plan),
        dataset_hash=ds.content_hash(),
        learners_hash=learner_set_hash(learner_set),
    )


def instance_hardness(matrix: CorrectnessMatrix) -> HardnessProfile:
    """IH per instance: 1 - (correct trials) / (all trials)."""
    matrix.validate()
    n_correct = matrix.correct.sum(axis=(1, 2))
    ih = 1.0 - n_correct / matrix.n_trials
    return HardnessProfile(
        ih=ih,
        matrix=matrix,
        provenance=matrix.provenance,
        ids=np.arange(matrix.n_instances, dtype=np.int64),
    )


def compute_profile(ds: Dataset, learner_set, plan: CvPlan) -> HardnessProfile:
    profile = instance_hardness(correctness_matrix(ds, learner_set, plan))
    profile.ids = ds.ids.copy()
    return profile


def hardness_ordering(profile: HardnessProfile) -> np.ndarray:
    """Instance ids sorted by ascending hardness, ties by ascending id."""
    order = np.lexsort((profile.ids, profile.ih))
    return profile.ids[order]


def save_profile(profile: HardnessProfile, path) -> None:
    m = profile.matrix
    n_correct = m.correct.sum(axis=(1, 2))
    with open(path, "w") as fh:
        fh.write(
            f"# provenance={profile.provenance} "
            f"dataset={m.dataset_hash} learners={m.learners_hash}\n"
        )
        fh.write(_PROFILE_HEADER + "\n")
        for i in range(profile.n_instances):
            fh.write(
                f"{int(profile.ids[i])}\t{float(profile.ih[i])!r}\t{m.n_trials}\t{int(n_correct[i])}\n"
            )
        fh.write(_MATRIX_HEADER + "\n")
        for li, name in enumerate(m.learner_names):
            for r in range(m.correct.shape[2]):
                for i in range(profile.n_instances):
                    fh.write(
                        f"{int(profile.ids[i])}\t{name}\t{r}\t{int(m.correct[i, li, r])}\n"
                    )


def _parse_head(stripped):
    fields = {}
    for token in stripped.lstrip("#").strip().split():
        if "=" not in token:
            return None
        key, _, value = token.partition("=")
        fields[key] = value
    if "provenance" not in fields:
        return None
    return fields


def load_profile(
    path,
    expected_provenance=None,
    expected_dataset=None,
    expected_learners=None,
    force=False,
) -> HardnessProfile:
    """Read a cached profile; verify provenance when hashes are supplied.

    A mismatch raises :class:`ProvenanceError` unless ``force`` is set,
    in which case it downgrades to a warning.
    """
    offset = 0
    lineno = 0

    def fail(msg):
        raise ParseError(msg, line=lineno, offset=offset)

    with open(path, "rb") as fh:
        raw = fh.read()
    lines = raw.decode("utf-8", errors="replace").splitlines(keepends=True)

    head = None
    ids = []
    ih_vals = []
    trials = []
    corrects = []
    matrix_rows = []
    section = "head"
    for line in lines:
        lineno += 1
        stripped = line.rstrip("\n")
        if section == "head":
            if not stripped.startswith("#"):
                fail("missing provenance comment")
            head = _parse_head(stripped)
            if head is None:
                fail("malformed provenance comment")
            section = "profile_header"
        elif section == "profile_header":
            if stripped != _PROFILE_HEADER:
                fail("bad profile header")
            section = "profile"
        elif section == "profile":
            if stripped == _MATRIX_HEADER:
                section = "matrix"
            else:
                parts = stripped.split("\t")
                if len(parts) != 4:
                    fail("bad profile row")
                try:
                    ids.append(int(parts[0]))
                    ih_vals.append(float(parts[1]))
                    trials.append(int(parts[2]))
                    corrects.append(int(parts[3]))
                except ValueError:
                    fail("unparseable profile row")
        elif section == "matrix":
            parts = stripped.split("\t")
            if len(parts) != 4:
                fail("bad matrix row")
            try:
                matrix_rows.append((int(parts[0]), parts[1], int(parts[2]), int(parts[3])))
            except ValueError:
                fail("unparseable matrix row")
        offset += len(line.encode("utf-8"))

    if section != "matrix":
        fail("file truncated before the matrix section")
    n = len(ids)
    if n == 0:
        fail("no instances in profile")
    if len(set(trials)) != 1:
        fail("inconsistent trial counts")

    names = []
    for _, name, _, _ in matrix_rows:
        if name not in names:
            names.append(name)
    repeats = 1 + max((r for _, _, r, _ in matrix_rows), default=0)
    if len(matrix_rows) != n * len(names) * repeats:
        fail("file truncated inside the matrix section")
    id_pos = {v: i for i, v in enumerate(ids)}
    name_pos = {v: i for i, v in enumerate(names)}
    correct = np.zeros((n, len(names), repeats), dtype=np.int8)
    seen = np.zeros_like(correct, dtype=bool)
    for iid, name, r, c in matrix_rows:
        if iid not in id_pos or c not in (0, 1):
            fail("matrix row references unknown instance or bad flag")
        pos = (id_pos[iid], name_pos[name], r)
        if seen[pos]:
            fail("duplicate matrix entry")
        seen[pos] = True
        correct[pos] = c
    if not seen.all():
        fail("matrix section incomplete")

    matrix = CorrectnessMatrix(
        learner_names=tuple(names),
        correct=correct,
        provenance=head["provenance"],
        dataset_hash=head.get("dataset", ""),
        learners_hash=head.get("learners", ""),
    )
    recomputed = 1.0 - correct.sum(axis=(1, 2)) / matrix.n_trials
    if not np.allclose(recomputed, np.asarray(ih_vals), atol=1e-12):
        raise ParseError("stored ih values disagree with the trial record")

    mismatches = []
    for label, expected, actual in (
        ("provenance", expected_provenance, matrix.provenance),
        ("dataset", expected_dataset, matrix.dataset_hash),
        ("learner set", expected_learners, matrix.learners_hash),
    ):
        if expected is not None and expected != actual:
            mismatches.append(f"{label} hash {actual} != expected {expected}")
    if mismatches:
        message = "profile does not match the current inputs: " + "; ".join(mismatches)
        if force:
            warnings.warn(message)
        else:
            raise ProvenanceError(message)

    return HardnessProfile(
        ih=np.asarray(ih_vals),
        matrix=matrix,
        provenance=matrix.provenance,
        ids=np.asarray(ids, dtype=np.int64),
    )
