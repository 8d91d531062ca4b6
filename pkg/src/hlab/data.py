"""Datasets with mixed numeric/categorical features and controlled synthesis.

A :class:`Dataset` stores features columnwise in a single float matrix:
numeric columns hold raw values, categorical columns hold integer category
codes, and NaN marks a missing cell in either kind.  Labels are integer
codes into ``classes``.  Instance ids are explicit so that subsets (e.g.
after hardness filtering) keep their original identities.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ParseError
from .util import content_hash

MISSING_MARKERS = ("?", "")


@dataclass(frozen=True)
class Feature:
    """One column of the schema: numeric, or categorical with its levels."""

    name: str
    categories: tuple[str, ...] | None = None

    @property
    def is_categorical(self) -> bool:
        return self.categories is not None


class Instance(NamedTuple):
    id: int
    features: np.ndarray
    label: int


@dataclass
class Dataset:
    """An immutable-by-convention labeled dataset.

    Attributes
    ----------
    name : str
        Display name, usually derived from the source file.
    features : list of Feature
        Per-column schema.
    classes : tuple of str
        Ordered class names; labels index into this tuple.
    X : ndarray of shape (n, d), float64
        Feature values; categorical cells hold category codes, NaN = missing.
    y : ndarray of shape (n,), int64
        Class codes.
    ids : ndarray of shape (n,), int64
        Stable instance ids (0..n-1 for freshly loaded data).
    class_name : str
        Name of the label column, used when saving.
    meta : dict
        Free-form metadata, e.g. the flip list of a synthetic dataset.
    """

    name: str
    features: list[Feature]
    classes: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    ids: np.ndarray
    class_name: str = "class"
    meta: dict = field(default_factory=dict)

    @property
    def n_instances(self) -> int:
        return len(self.y)

    @property
    def n_features(self) -> int:
        return len(self.features)

    def instance(self, row: int) -> Instance:
        return Instance(int(self.ids[row]), self.X[row].copy(), int(self.y[row]))

    def __iter__(self):
        for i in range(self.n_instances):
            yield self.instance(i)

    def subset(self, rows) -> "Dataset":
        """New dataset restricted to the given row positions; ids preserved."""
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(
            name=self.name,
            features=self.features,
            classes=self.classes,
            X=self.X[rows].copy(),
            y=self.y[rows].copy(),
            ids=self.ids[rows].copy(),
            class_name=self.class_name,
            meta=dict(self.meta),
        )

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=len(self.classes))

    def content_hash(self) -> str:
        return content_hash(
            self.X,
            self.y,
            "|".join(self.classes),
            "|".join(
                f.name + (":" + ",".join(f.categories) if f.categories else ":num")
                for f in self.features
            ),
        )

    def validate(self) -> None:
        """Check the structural invariants of a freshly built dataset."""
        n, d = self.X.shape
        if len(self.y) != n or len(self.ids) != n:
            raise ValueError("X, y and ids disagree on the number of instances")
        if d != len(self.features):
            raise ValueError("X width does not match the schema arity")
        if len(set(self.ids.tolist())) != n:
            raise ValueError("instance ids are not unique")
        if len(np.unique(self.y)) < 2:
            raise ValueError("single-class dataset")
        if self.y.min() < 0 or self.y.max() >= len(self.classes):
            raise ValueError("label out of range of the class list")
        for j, feat in enumerate(self.features):
            if feat.is_categorical:
                col = self.X[:, j]
                valid = col[~np.isnan(col)]
                if valid.size and (valid.min() < 0 or valid.max() >= len(feat.categories)):
                    raise ValueError(f"category code out of range in column {feat.name}")


def _is_missing(cell: str) -> bool:
    return cell.strip() in MISSING_MARKERS


def _parse_rows(rows, header, class_idx, name, first_line):
    """Shared column-typing path for both file formats (CSV schema inference)."""
    n_cols = len(header)
    feature_idx = [j for j in range(n_cols) if j != class_idx]
    cells = []
    for lineno, row in rows:
        if len(row) != n_cols:
            raise ParseError(
                f"expected {n_cols} columns, got {len(row)}", line=lineno
            )
        cells.append((lineno, row))
    if not cells:
        raise ParseError("empty file: no data rows", line=first_line)

    columns = []
    for j in feature_idx:
        raw = [row[j].strip() for _, row in cells]
        numeric = True
        for v in raw:
            if _is_missing(v):
                continue
            try:
                float(v)
            except ValueError:
                numeric = False
                break
        if numeric:
            col = np.array(
                [math.nan if _is_missing(v) else float(v) for v in raw]
            )
            columns.append((Feature(header[j]), col))
        else:
            cats: list[str] = []
            codes = np.empty(len(raw))
            for i, v in enumerate(raw):
                if _is_missing(v):
                    codes[i] = math.nan
                elif v in cats:
                    codes[i] = cats.index(v)
                else:
                    cats.append(v)
                    codes[i] = len(cats) - 1
            columns.append((Feature(header[j], tuple(cats)), codes))

    classes: list[str] = []
    y = np.empty(len(cells), dtype=np.int64)
    for i, (lineno, row) in enumerate(cells):
        v = row[class_idx].strip()
        if _is_missing(v):
            raise ParseError("missing class label", line=lineno)
        if v not in classes:
            classes.append(v)
        y[i] = classes.index(v)
    if len(classes) < 2:
        raise ParseError(f"single-class dataset (only class {classes[0]!r})")

    features = [f for f, _ in columns]
    X = np.column_stack([c for _, c in columns]) if columns else np.empty((len(cells), 0))
    return Dataset(
        name=name,
        features=features,
        classes=tuple(classes),
        X=X,
        y=y,
        ids=np.arange(len(cells), dtype=np.int64),
        class_name=header[class_idx],
    )


def _load_csv(path, class_col):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", line=1) from None
        header = [h.strip() for h in header]
        if class_col is None:
            class_idx = len(header) - 1
        else:
            if class_col not in header:
                raise ParseError(f"class column {class_col!r} not in header", line=1)
            class_idx = header.index(class_col)
        rows = [(lineno, row) for lineno, row in enumerate(reader, start=2) if row]
    name = os.path.splitext(os.path.basename(path))[0]
    return _parse_rows(rows, header, class_idx, name, first_line=2)


def _load_annotated(path, class_col):
    """Attribute-annotated text: @relation/@attribute declarations, then @data."""
    relation = None
    attrs: list[tuple[str, tuple[str, ...] | None]] = []
    data_rows: list[tuple[int, list[str]]] = []
    in_data = False
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            lowered = stripped.lower()
            if in_data:
                data_rows.append((lineno, [c.strip() for c in stripped.split(",")]))
            elif lowered.startswith("@relation"):
                relation = stripped.split(None, 1)[1].strip() if " " in stripped else "data"
            elif lowered.startswith("@attribute"):
                body = stripped.split(None, 1)[1].strip()
                if "{" in body:
                    attr_name, _, rest = body.partition("{")
                    cats = tuple(c.strip() for c in rest.rstrip("}").split(","))
                    attrs.append((attr_name.strip(), cats))
                else:
                    parts = body.rsplit(None, 1)
                    if len(parts) != 2 or parts[1].lower() not in (
                        "numeric",
                        "real",
                        "integer",
                    ):
                        raise ParseError(f"unsupported attribute type: {body}", line=lineno)
                    attrs.append((parts[0].strip(), None))
            elif lowered.startswith("@data"):
                in_data = True
            else:
                raise ParseError(f"unexpected declaration: {stripped}", line=lineno)
    if not attrs:
        raise ParseError("no attribute declarations found")
    names = [a for a, _ in attrs]
    if class_col is None:
        class_idx = len(attrs) - 1
    else:
        if class_col not in names:
            raise ParseError(f"class column {class_col!r} not declared")
        class_idx = names.index(class_col)

    cats_by_idx = {j: c for j, (_, c) in enumerate(attrs)}
    class_cats = cats_by_idx[class_idx]
    if class_cats is None:
        raise ParseError("class attribute must be categorical")

    n_cols = len(attrs)
    cells = []
    for lineno, row in data_rows:
        if len(row) != n_cols:
            raise ParseError(f"expected {n_cols} columns, got {len(row)}", line=lineno)
        cells.append((lineno, row))
    if not cells:
        raise ParseError("empty file: no data rows")

    features = []
    cols = []
    for j in range(n_cols):
        if j == class_idx:
            continue
        declared = cats_by_idx[j]
        raw = [row[j] for _, row in cells]
        if declared is None:
            col = np.empty(len(raw))
            for i, v in enumerate(raw):
                if _is_missing(v):
                    col[i] = math.nan
                else:
                    try:
                        col[i] = float(v)
                    except ValueError:
                        raise ParseError(
                            f"non-numeric value {v!r} in numeric attribute {names[j]!r}",
                            line=cells[i][0],
                        ) from None
            features.append(Feature(names[j]))
        else:
            col = np.empty(len(raw))
            lookup = {c: k for k, c in enumerate(declared)}
            for i, v in enumerate(raw):
                if _is_missing(v):
                    col[i] = math.nan
                elif v in lookup:
                    col[i] = lookup[v]
                else:
                    raise ParseError(
                        f"undeclared category {v!r} for attribute {names[j]!r}",
                        line=cells[i][0],
                    )
            features.append(Feature(names[j], declared))
        cols.append(col)

    y = np.empty(len(cells), dtype=np.int64)
    class_lookup = {c: k for k, c in enumerate(class_cats)}
    present = set()
    for i, (lineno, row) in enumerate(cells):
        v = row[class_idx]
        if _is_missing(v):
            raise ParseError("missing class label", line=lineno)
        if v not in class_lookup:
            raise ParseError(f"undeclared class {v!r}", line=lineno)
        y[i] = class_lookup[v]
        present.add(v)
    if len(present) < 2:
        raise ParseError(f"single-class dataset (only class {next(iter(present))!r})")

    X = np.column_stack(cols) if cols else np.empty((len(cells), 0))
    return Dataset(
        name=relation or "data",
        features=features,
        classes=class_cats,
        X=X,
        y=y,
        ids=np.arange(len(cells), dtype=np.int64),
        class_name=names[class_idx],
    )


def load_table(path, format=None, class_col=None) -> Dataset:
    """Load ``path`` as a Dataset.

    Parameters
    ----------
    format : {"csv", "annotated"}, optional
        Defaults by extension: ``.arff`` -> annotated, everything else csv.
    class_col : str, optional
        Name of the label column; defaults to the last column.
    """
    if format is None:
        format = "annotated" if str(path).lower().endswith(".arff") else "csv"
    if format == "csv":
        return _load_csv(path, class_col)
    if format == "annotated":
        return _load_annotated(path, class_col)
    raise ValueError(f"unknown format {format!r}")


def _format_cell(value: float, feature: Feature) -> str:
    value = float(value)
    if math.isnan(value):
        return "?"
    if feature.is_categorical:
        return feature.categories[int(value)]
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)  # repr round-trips float64 exactly


def save_table(ds: Dataset, path, format=None) -> None:
    """Write a Dataset back to disk; inverse of :func:`load_table`."""
    if format is None:
        format = "annotated" if str(path).lower().endswith(".arff") else "csv"
    if format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f.name for f in ds.features] + [ds.class_name])
            for i in range(ds.n_instances):
                row = [
                    _format_cell(ds.X[i, j], f) for j, f in enumerate(ds.features)
                ]
                row.append(ds.classes[ds.y[i]])
                writer.writerow(row)
    elif format == "annotated":
        with open(path, "w") as fh:
            fh.write(f"@relation {ds.name}\n")
            for f in ds.features:
                if f.is_categorical:
                    fh.write(f"@attribute {f.name} {{{','.join(f.categories)}}}\n")
                else:
                    fh.write(f"@attribute {f.name} numeric\n")
            fh.write(f"@attribute {ds.class_name} {{{','.join(ds.classes)}}}\n")
            fh.write("@data\n")
            for i in range(ds.n_instances):
                row = [
                    _format_cell(ds.X[i, j], f) for j, f in enumerate(ds.features)
                ]
                row.append(ds.classes[ds.y[i]])
                fh.write(",".join(row) + "\n")
    else:
        raise ValueError(f"unknown format {format!r}")


def synth_gaussians(
    n_per_class: int,
    dims: int = 2,
    separation: float = 3.0,
    noise_rate: float = 0.0,
    seed: int = 0,
    name: str = "synth",
) -> Dataset:
    """Two spherical unit-variance Gaussians with optional label noise.

    Cluster centers sit at -separation/2 and +separation/2 along the first
    axis.  ``round(noise_rate * n)`` labels are flipped uniformly at random;
    the flipped ids and their original labels land in ``meta``.
    """
    if not 0 <= noise_rate < 0.5:
        raise ValueError("noise_rate must be in [0, 0.5)")
    if n_per_class < 1 or dims < 1:
        raise ValueError("n_per_class and dims must be positive")
    rng = np.random.default_rng(seed)
    n = 2 * n_per_class
    X = rng.normal(size=(n, dims))
    X[:n_per_class, 0] -= separation / 2.0
    X[n_per_class:, 0] += separation / 2.0
    y = np.repeat(np.array([0, 1], dtype=np.int64), n_per_class)

    n_flips = int(round(noise_rate * n))
    flipped = np.sort(rng.choice(n, size=n_flips, replace=False)) if n_flips else np.empty(0, dtype=np.int64)
    original = y[flipped].copy()
    y[flipped] = 1 - y[flipped]

    return Dataset(
        name=name,
        features=[Feature(f"x{j}") for j in range(dims)],
        classes=("a", "b"),
        X=X,
        y=y,
        ids=np.arange(n, dtype=np.int64),
        meta={
            "flipped_ids": np.asarray(flipped, dtype=np.int64),
            "original_labels": np.asarray(original, dtype=np.int64),
        },
    )


def flips_sidecar_path(dataset_path) -> str:
    base, _ = os.path.splitext(str(dataset_path))
    return base + ".flips.tsv"


def save_flips(ds: Dataset, path) -> None:
    """Write the synthetic flip list next to a dataset file."""
    flipped = ds.meta.get("flipped_ids", np.empty(0, dtype=np.int64))
    original = ds.meta.get("original_labels", np.empty(0, dtype=np.int64))
    with open(path, "w") as fh:
        fh.write("instance_id\toriginal_label\n")
        for i, lab in zip(flipped, original):
            fh.write(f"{int(i)}\t{ds.classes[int(lab)]}\n")


def load_flips(path, classes) -> tuple[np.ndarray, np.ndarray]:
    ids = []
    labels = []
    lookup = {c: k for k, c in enumerate(classes)}
    with open(path) as fh:
        header = fh.readline()
        if header.strip() != "instance_id\toriginal_label":
            raise ParseError("bad flips sidecar header", line=1)
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2 or parts[1] not in lookup:
                raise ParseError("bad flips sidecar row", line=lineno)
            ids.append(int(parts[0]))
            labels.append(lookup[parts[1]])
    return np.asarray(ids, dtype=np.int64), np.asarray(labels, dtype=np.int64)
