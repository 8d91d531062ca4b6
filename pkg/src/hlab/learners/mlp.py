"""Single-hidden-layer MLP trained by online backpropagation.

Training state is explicit (:class:`MlpState`) so callers can train in
increments: weights, the current learning rate and the shuffle RNG stream
all persist across calls.  Two successive 50-epoch calls are identical to
one 100-epoch call.

Convergence training follows a diminishing-learning-rate rule: start at
``lr``, multiply by ``lr_decay`` after any epoch whose mean squared error
did not decrease, stop once the learning rate drops below ``lr_min``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..validation import check_array, check_X_y
from .base import ConstantFallbackMixin
from ._kernels import mlp_epoch

# Improvements smaller than this count as "did not decrease", which keeps
# the decay loop from stalling on float-noise-level progress.
_IMPROVEMENT_EPS = 1e-12


@dataclass
class MlpState:
    """Mutable training state; single-owner while training."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    lr: float
    rng: np.random.Generator
    last_epoch_error: float = np.inf
    epochs_run: int = 0
    decay_events: int = 0

    @property
    def n_features(self) -> int:
        return self.W1.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.W2.shape[0]

    def copy(self) -> "MlpState":
        return MlpState(
            W1=self.W1.copy(),
            b1=self.b1.copy(),
            W2=self.W2.copy(),
            b2=self.b2.copy(),
            lr=self.lr,
            rng=_clone_rng(self.rng),
            last_epoch_error=self.last_epoch_error,
            epochs_run=self.epochs_run,
            decay_events=self.decay_events,
        )


def _clone_rng(rng: np.random.Generator) -> np.random.Generator:
    clone = np.random.default_rng(0)
    clone.bit_generator.state = rng.bit_generator.state
    return clone


def default_hidden(n_features: int, n_classes: int) -> int:
    return max(3, (n_features + n_classes) // 2)


def init_mlp_state(
    n_features: int,
    n_classes: int,
    seed: int,
    hidden: int | None = None,
    lr: float = 0.3,
) -> MlpState:
    """Fresh state with uniform(-0.5, 0.5) weights drawn from ``seed``."""
    h = hidden if hidden is not None else default_hidden(n_features, n_classes)
    rng = np.random.default_rng(seed)
    return MlpState(
        W1=rng.uniform(-0.5, 0.5, size=(h, n_features)),
        b1=rng.uniform(-0.5, 0.5, size=h),
        W2=rng.uniform(-0.5, 0.5, size=(n_classes, h)),
        b2=rng.uniform(-0.5, 0.5, size=n_classes),
        lr=lr,
        rng=rng,
    )


def _one_hot(y_pos: np.ndarray, n_classes: int) -> np.ndarray:
    Y = np.zeros((len(y_pos), n_classes))
    Y[np.arange(len(y_pos)), y_pos] = 1.0
    return Y


def mlp_train_epochs(state: MlpState, X: np.ndarray, Y: np.ndarray, epochs: int) -> MlpState:
    """Run exactly ``epochs`` backprop epochs, continuing from ``state``."""
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if X.shape[1] != state.n_features or Y.shape[1] != state.n_outputs:
        raise ValueError("data shape does not match the MLP state")
    n = X.shape[0]
    for _ in range(epochs):
        order = state.rng.permutation(n)
        sq = mlp_epoch(state.W1, state.b1, state.W2, state.b2, X, Y, order, state.lr)
        state.last_epoch_error = sq / (n * state.n_outputs)
        state.epochs_run += 1
    return state


def mlp_train_convergence(
    state: MlpState,
    X: np.ndarray,
    Y: np.ndarray,
    lr_decay: float = 0.3,
    lr_min: float = 0.001,
    max_epochs: int = 5000,
) -> MlpState:
    """Train until the decaying learning rate drops below ``lr_min``.

    After each epoch the mean squared error is compared with the previous
    epoch's; no decrease multiplies the learning rate by ``lr_decay``.
    Past ``max_epochs`` the rate decays every epoch regardless, which
    bounds the loop while preserving the final-rate invariant.
    """
    n = X.shape[0]
    prev = np.inf
    epochs_here = 0
    while state.lr >= lr_min:
        order = state.rng.permutation(n)
        sq = mlp_epoch(state.W1, state.b1, state.W2, state.b2, X, Y, order, state.lr)
        err = sq / (n * state.n_outputs)
        state.epochs_run += 1
        epochs_here += 1
        improved = err < prev - _IMPROVEMENT_EPS
        if not improved or epochs_here >= max_epochs:
            state.lr *= lr_decay
            state.decay_events += 1
        prev = err
        state.last_epoch_error = err
    return state


def mlp_decision_values(state: MlpState, X: np.ndarray) -> np.ndarray:
    hidden = 1.0 / (1.0 + np.exp(-(X @ state.W1.T + state.b1)))
    return 1.0 / (1.0 + np.exp(-(hidden @ state.W2.T + state.b2)))


class MlpClassifier(ConstantFallbackMixin, ClassifierMixin, BaseEstimator):
    """Estimator facade over the convergence training rule.

    Parameters
    ----------
    hidden : int, optional
        Hidden layer width; defaults to ``max(3, (features + classes) / 2)``.
    lr : float
        Initial learning rate.
    lr_decay : float
        Multiplier applied when an epoch fails to reduce training error.
    lr_min : float
        Training stops when the learning rate falls below this.
    max_epochs : int
        Safety bound; beyond it the rate decays every epoch.
    """

    def __init__(
        self,
        hidden: int | None = None,
        lr: float = 0.3,
        lr_decay: float = 0.3,
        lr_min: float = 0.001,
        max_epochs: int = 5000,
        random_state: int | None = None,
    ):
        self.hidden = hidden
        self.lr = lr
        self.lr_decay = lr_decay
        self.lr_min = lr_min
        self.max_epochs = max_epochs
        self.random_state = random_state

    def _init_state(self, n_features: int, n_classes: int) -> MlpState:
        seed = 0 if self.random_state is None else self.random_state
        return init_mlp_state(
            n_features, n_classes, seed=seed, hidden=self.hidden, lr=self.lr
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.n_features_in_ = X.shape[1]
        if self._begin_fit(y):
            self.train_meta_ = {"epochs": 0, "final_lr": self.lr, "decay_events": 0}
            return self
        y_pos = np.searchsorted(self.classes_, y)
        Y = _one_hot(y_pos, len(self.classes_))
        state = self._init_state(X.shape[1], len(self.classes_))
        mlp_train_convergence(
            state, X, Y, lr_decay=self.lr_decay, lr_min=self.lr_min,
            max_epochs=self.max_epochs,
        )
        self.state_ = state
        self.train_meta_ = {
            "epochs": state.epochs_run,
            "final_lr": state.lr,
            "decay_events": state.decay_events,
        }
        return self

    def predict(self, X):
        X = check_array(X)
        const = self._maybe_constant(X)
        if const is not None:
            return const
        values = mlp_decision_values(self.state_, X)
        return self.classes_[np.argmax(values, axis=1)]
