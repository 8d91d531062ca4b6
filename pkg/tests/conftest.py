import numpy as np
import pytest

from hlab.data import Dataset, Feature


def build_dataset(X, y, features=None, classes=None, name="test"):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if features is None:
        features = [Feature(f"x{j}") for j in range(X.shape[1])]
    if classes is None:
        classes = tuple(chr(ord("a") + c) for c in range(int(y.max()) + 1))
    return Dataset(
        name=name,
        features=features,
        classes=classes,
        X=X,
        y=y,
        ids=np.arange(len(y), dtype=np.int64),
    )


def xor_dataset(n_per_cluster=10, spread=0.05, seed=0):
    """Four tight clusters in XOR layout; separable only nonlinearly."""
    rng = np.random.default_rng(seed)
    centers = [(0, 0, 0), (1, 1, 0), (0, 1, 1), (1, 0, 1)]
    xs, ys = [], []
    for cx, cy, label in centers:
        pts = rng.normal((cx, cy), spread, size=(n_per_cluster, 2))
        xs.append(pts)
        ys.extend([label] * n_per_cluster)
    return build_dataset(np.vstack(xs), np.array(ys))


@pytest.fixture
def mixed_dataset():
    """Numeric + categorical features with a missing cell of each kind."""
    features = [
        Feature("size"),
        Feature("color", ("red", "green", "blue")),
    ]
    X = np.array(
        [
            [1.0, 0.0],
            [2.0, 1.0],
            [np.nan, 2.0],
            [4.0, np.nan],
            [5.0, 0.0],
            [6.0, 1.0],
        ]
    )
    y = np.array([0, 0, 0, 1, 1, 1], dtype=np.int64)
    return build_dataset(X, y, features=features, classes=("a", "b"))
