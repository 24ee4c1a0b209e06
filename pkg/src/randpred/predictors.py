"""Reference point predictors.

The nonconformity measures treat the point predictor as a black box with a
``fit(examples)`` / ``predict(features)`` surface, so anything honouring
that protocol can be plugged in.  Two deterministic references are
provided: ordinary least squares for regression and a hinge-loss linear
classifier for binary classification.
"""

from __future__ import annotations

import math
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .core import Example

__all__ = [
    "PointPredictor",
    "LeastSquaresRegressor",
    "MeanRegressor",
    "HingeLossLinearClassifier",
    "ConstantClassifier",
]


@runtime_checkable
class PointPredictor(Protocol):
    """Protocol for pluggable point predictors.

    ``predict`` must be deterministic given the fitted state, and the
    fitted state must not change after ``fit`` returns.
    """

    def fit(self, examples: Sequence[Example]) -> "PointPredictor": ...

    def predict(self, features) -> float: ...


class MeanRegressor:
    """Constant predictor returning the mean training label."""

    def __init__(self):
        self._mean = None

    def fit(self, examples):
        if not examples:
            raise ValueError("cannot fit on an empty training sequence")
        self._mean = float(np.mean([e.label for e in examples]))
        return self

    def predict(self, features) -> float:
        if self._mean is None:
            raise RuntimeError("predictor is not fitted")
        return self._mean


class LeastSquaresRegressor:
    """Ordinary least squares with an intercept.

    A rank-deficient design matrix (too few rows, collinear features) falls
    back to the mean-label constant predictor; ``fallback_reason`` records
    when that happened.
    """

    def __init__(self):
        self._coef = None
        self._intercept = None
        self._fallback = None
        self.fallback_reason = None

    def fit(self, examples):
        if not examples:
            raise ValueError("cannot fit on an empty training sequence")
        X = np.array([e.features for e in examples], dtype=float)
        y = np.array([e.label for e in examples], dtype=float)
        design = np.column_stack([X, np.ones(len(examples))])
        rank = np.linalg.matrix_rank(design)
        if rank < design.shape[1]:
            self._fallback = MeanRegressor().fit(examples)
            self.fallback_reason = (
                f"rank-deficient design (rank {rank} < {design.shape[1]}); "
                "using the mean-label constant predictor"
            )
            return self
        beta, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
        self._coef = beta[:-1]
        self._intercept = float(beta[-1])
        return self

    def predict(self, features) -> float:
        if self._fallback is not None:
            return self._fallback.predict(features)
        if self._coef is None:
            raise RuntimeError("predictor is not fitted")
        return float(np.dot(self._coef, np.asarray(features, dtype=float)) + self._intercept)


class ConstantClassifier:
    """Degenerate classifier that always predicts one class with an
    infinite margin score.  Used as the single-class fallback."""

    def __init__(self, label: int):
        if label not in (-1, 1):
            raise ValueError(f"label must be -1 or +1, got {label!r}")
        self._label = label

    def fit(self, examples):
        return self

    def predict(self, features) -> float:
        return math.inf if self._label > 0 else -math.inf


class HingeLossLinearClassifier:
    """Large-margin linear classifier trained by full-batch hinge-loss
    subgradient descent for a fixed number of epochs.

    The score is the raw affine output w.x + b, so the functional margin is
    1 in score units.  Zero initialization keeps training deterministic; a
    seed switches to small random initial weights.  Training on a
    single-class sequence falls back to :class:`ConstantClassifier`.
    """

    def __init__(self, learning_rate=0.5, epochs=200, l2=1e-3, seed=None):
        if learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if epochs < 1:
            raise ValueError("epochs must be at least 1")
        if l2 < 0:
            raise ValueError("l2 must be nonnegative")
        self.learning_rate = float(learning_rate)
        self.epochs = int(epochs)
        self.l2 = float(l2)
        self.seed = seed
        self._weights = None
        self._bias = None
        self._fallback = None
        self.fallback_reason = None

    def fit(self, examples):
        if not examples:
            raise ValueError("cannot fit on an empty training sequence")
        labels = {int(e.label) for e in examples}
        if not labels <= {-1, 1}:
            raise ValueError(f"classification labels must be -1 or +1, got {sorted(labels)}")
        if len(labels) == 1:
            only = labels.pop()
            self._fallback = ConstantClassifier(only)
            self.fallback_reason = (
                f"single-class training sequence (all labels {only:+d}); "
                "using a constant classifier with infinite margin score"
            )
            return self

        X = np.array([e.features for e in examples], dtype=float)
        y = np.array([e.label for e in examples], dtype=float)
        n, d = X.shape
        if self.seed is None:
            w = np.zeros(d)
        else:
            w = 0.01 * np.random.default_rng(self.seed).standard_normal(d)
        b = 0.0
        for _ in range(self.epochs):
            margins = y * (X @ w + b)
            violating = margins < 1.0
            grad_w = self.l2 * w
            grad_b = 0.0
            if np.any(violating):
                grad_w = grad_w - (y[violating, None] * X[violating]).sum(axis=0) / n
                grad_b = -y[violating].sum() / n
            w = w - self.learning_rate * grad_w
            b = b - self.learning_rate * grad_b
        self._weights = w
        self._bias = float(b)
        return self

    def predict(self, features) -> float:
        if self._fallback is not None:
            return self._fallback.predict(features)
        if self._weights is None:
            raise RuntimeError("classifier is not fitted")
        return float(np.dot(self._weights, np.asarray(features, dtype=float)) + self._bias)
