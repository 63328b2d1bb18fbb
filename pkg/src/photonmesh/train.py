"""RMSProp training loop with seeded shuffling and per-epoch metrics.

Runs are fully deterministic given (seed, config, dataset): shuffling uses one
generator seeded once per run, batch gradients reduce in fixed order, and the
optimizer update is elementwise.  Wall-clock seconds and peak memory are
recorded per epoch but are the only nondeterministic fields.
"""

from __future__ import annotations

import json
import resource
import time
from dataclasses import dataclass

import numpy as np

from .model import Model, cross_entropy_loss, model_backward, model_forward


@dataclass
class TrainConfig:
    learning_rate: float = 5e-4
    batch_size: int = 512
    epochs: int = 150
    seed: int = 0
    rho: float = 0.999  # squared-gradient decay; long horizon suits short runs
    eps: float = 1e-8

    def __post_init__(self):
        # zero is allowed as the documented no-op edge case
        if self.learning_rate < 0:
            raise ValueError("learning_rate must not be negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class OptimizerState:
    v: np.ndarray  # running average of squared gradients, >= 0

    @classmethod
    def zeros(cls, n: int) -> "OptimizerState":
        return cls(np.zeros(n, dtype=np.float64))


def rmsprop_step(
    params: np.ndarray, grads: np.ndarray, state: OptimizerState, cfg: TrainConfig
):
    """v <- rho*v + (1-rho)*g^2; p <- p - lr*g/(sqrt(v)+eps).  In place."""
    if params.shape != grads.shape or params.shape != state.v.shape:
        raise ValueError("params, grads and optimizer state must have equal length")
    state.v *= cfg.rho
    state.v += (1.0 - cfg.rho) * grads * grads
    params -= cfg.learning_rate * grads / (np.sqrt(state.v) + cfg.eps)
    return params, state


@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    val_acc: float
    secs: float
    peak_mem_bytes: int

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "epoch": self.epoch,
                "train_loss": self.train_loss,
                "val_acc": self.val_acc,
                "secs": self.secs,
                "peak_mem_bytes": self.peak_mem_bytes,
            }
        )


def peak_rss_bytes() -> int:
    # ru_maxrss is kilobytes on Linux
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


def evaluate(m: Model, X, y, chunk: int = 1024) -> float:
    """Fraction of samples whose argmax logit equals the label."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.shape[0] == 0:
        raise ValueError("cannot evaluate on an empty split")
    hits = 0
    for lo in range(0, X.shape[0], chunk):
        logits, _ = model_forward(m, X[lo : lo + chunk])
        hits += int(np.sum(np.argmax(logits, axis=1) == y[lo : lo + chunk]))
    return hits / X.shape[0]


def fit_arrays(
    m: Model,
    train_X,
    train_y,
    cfg: TrainConfig,
    val_X=None,
    val_y=None,
) -> list[EpochMetrics]:
    """Epoch loop over raw arrays; mutates the model parameters in place."""
    train_X = np.asarray(train_X, dtype=np.float64)
    train_y = np.asarray(train_y)
    n = train_X.shape[0]
    if n == 0:
        raise ValueError("training split is empty")
    rng = np.random.default_rng(cfg.seed)
    state = OptimizerState.zeros(m.num_params)
    metrics = []
    for epoch in range(cfg.epochs):
        t0 = time.perf_counter()
        perm = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, cfg.batch_size):
            idx = perm[lo : lo + cfg.batch_size]  # last partial batch is kept
            logits, caches = model_forward(m, train_X[idx])
            loss = cross_entropy_loss(logits, train_y[idx])
            grads = model_backward(m, caches, train_y[idx])
            rmsprop_step(m.params, grads, state, cfg)
            total += loss.value * idx.size
        val_acc = evaluate(m, val_X, val_y) if val_X is not None else float("nan")
        metrics.append(
            EpochMetrics(
                epoch=epoch,
                train_loss=total / n,
                val_acc=val_acc,
                secs=time.perf_counter() - t0,
                peak_mem_bytes=peak_rss_bytes(),
            )
        )
    return metrics


def train(m: Model, dataset, splits, cfg: TrainConfig) -> list[EpochMetrics]:
    """Train on a Dataset/Splits pair; validation accuracy per epoch."""
    X, y = dataset.features, dataset.labels
    return fit_arrays(
        m,
        X[splits.train],
        y[splits.train],
        cfg,
        val_X=X[splits.val],
        val_y=y[splits.val],
    )
