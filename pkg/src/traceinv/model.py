"""The minimal neuron: 1 input, 1 output, tanh activation, MSE loss.

The network computes ``yhat_i = tanh(w * x_i + b)`` and is trained by
full-batch gradient descent on the mean squared error.  With
``d/dz tanh(z) = 1 - tanh(z)^2`` the exact partial derivatives are

    d mse / d w = (1/n) * sum_i 2 * x_i * (yhat_i - y_i) * (1 - yhat_i^2)
    d mse / d b = (1/n) * sum_i 2 *       (yhat_i - y_i) * (1 - yhat_i^2)

and each epoch applies ``w -= eta * dw; b -= eta * db``.  ``train``
records the parameters *before* each update, so epoch j of the trace
holds the values used in epoch j's forward pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .trace import ParamTrace, TraceDebug

# training aborts once |w| or |b| leaves this range
DIVERGENCE_LIMIT = 1e6


class TrainingDivergedError(RuntimeError):
    """Parameters became non-finite or unreasonably large during training."""

    def __init__(self, epoch, w, b):
        self.epoch = epoch
        super().__init__(
            f"training diverged at epoch {epoch}: w={w!r}, b={b!r} "
            f"(limit {DIVERGENCE_LIMIT:g})"
        )


@dataclass
class Dataset:
    """Paired input/label vectors; the secret the attack tries to recover."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        self.xs = np.atleast_1d(np.asarray(self.xs, dtype=float))
        self.ys = np.atleast_1d(np.asarray(self.ys, dtype=float))
        if self.xs.ndim != 1 or self.ys.ndim != 1:
            raise ValueError("xs and ys must be 1-d")
        if len(self.xs) != len(self.ys):
            raise ValueError(
                f"xs and ys must have equal length, got {len(self.xs)} and {len(self.ys)}"
            )
        if len(self.xs) == 0:
            raise ValueError("dataset must contain at least one instance")
        if not (np.all(np.isfinite(self.xs)) and np.all(np.isfinite(self.ys))):
            raise ValueError("dataset values must be finite")

    @property
    def n(self):
        return len(self.xs)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.xs, other.xs) and np.array_equal(self.ys, other.ys)


@dataclass(frozen=True)
class Params:
    """Weight and bias of the neuron."""

    w: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.w) and np.isfinite(self.b)):
            raise ValueError(f"parameters must be finite, got w={self.w}, b={self.b}")


@dataclass(frozen=True)
class TrainConfig:
    """Learning rate, number of recorded epochs, and initial parameters."""

    eta: float
    epochs: int
    init: Params = field(default_factory=lambda: Params(0.5, 0.5))

    def __post_init__(self):
        if not np.isfinite(self.eta) or self.eta <= 0:
            raise ValueError(f"eta must be finite and > 0, got {self.eta}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


def forward(params, xs):
    """Network outputs tanh(w*x + b) for a vector of inputs.

    Outputs lie in (-1, 1); note that in floating point tanh saturates to
    exactly +-1.0 once |w*x + b| exceeds about 19.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if len(xs) == 0:
        raise ValueError("input vector must be non-empty")
    if not np.all(np.isfinite(xs)):
        raise ValueError("inputs must be finite")
    return np.tanh(params.w * xs + params.b)


def mse(yhat, ys):
    """Mean squared error between computed and real labels."""
    yhat = np.atleast_1d(np.asarray(yhat, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if len(yhat) != len(ys):
        raise ValueError(
            f"length mismatch: yhat has {len(yhat)}, ys has {len(ys)}"
        )
    if len(ys) == 0:
        raise ValueError("vectors must be non-empty")
    return float(np.mean((yhat - ys) ** 2))


def gradients(params, data):
    """Exact partial derivatives (d mse/d w, d mse/d b) at ``params``."""
    yhat = forward(params, data.xs)
    base = 2.0 * (yhat - data.ys) * (1.0 - yhat**2)
    dw = float(np.mean(data.xs * base))
    db = float(np.mean(base))
    return dw, db


def train(data, cfg, debug=False):
    """Run full-batch gradient descent and return the parameter trace.

    The trace records (w, b) before each of the ``cfg.epochs`` updates;
    with ``debug=True`` it also carries each epoch's predictions and loss.
    Raises TrainingDivergedError (naming the offending epoch) if the
    parameters blow up.
    """
    w, b = cfg.init.w, cfg.init.b
    ws = np.empty(cfg.epochs)
    bs = np.empty(cfg.epochs)
    yhat_rows = np.empty((cfg.epochs, data.n)) if debug else None
    losses = np.empty(cfg.epochs) if debug else None

    for j in range(cfg.epochs):
        ws[j] = w
        bs[j] = b
        yhat = np.tanh(w * data.xs + b)
        if debug:
            yhat_rows[j] = yhat
            losses[j] = float(np.mean((yhat - data.ys) ** 2))
        if j == cfg.epochs - 1:
            break  # the update after the last recorded epoch is unobservable
        base = 2.0 * (yhat - data.ys) * (1.0 - yhat**2)
        w = w - cfg.eta * float(np.mean(data.xs * base))
        b = b - cfg.eta * float(np.mean(base))
        if not (np.isfinite(w) and np.isfinite(b)) or max(abs(w), abs(b)) > DIVERGENCE_LIMIT:
            raise TrainingDivergedError(j + 1, w, b)

    trace_debug = TraceDebug(yhat_rows, losses) if debug else None
    return ParamTrace(eta=cfg.eta, n=data.n, ws=ws, bs=bs, debug=trace_debug)
