"""Reference fusions: fixed-subset averaging and logistic regression.

The logistic regression is fit by full-batch gradient descent with a
backtracking line search on the L2-regularized negative log-likelihood of
the bonafide class. Inputs are standardized per detector; the reported
weights fold the standardization back so they apply to raw scores. The
fused score omits the sigmoid: EER and minDCF are invariant to monotone
transforms, and the linear score is numerically safer.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import fusion, metrics
from .errors import ConfigError, DataError
from .fusion import FusionObjectives
from .score_data import ScoreMatrix

PRUNE_MODES = ("by_weight", "by_individual_eer")

DEFAULT_L2_LAMBDA = 1e-3
DEFAULT_MAX_ITERS = 10_000
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class LogRegModel:
    """Linear fusion model in raw score space plus training metadata."""

    weights: np.ndarray
    bias: float
    iterations: int
    final_loss: float
    final_grad_norm: float
    converged: bool
    loss_trace: tuple[float, ...]


@dataclass(frozen=True)
class PruneRecord:
    active: tuple[int, ...]
    eer: float
    params: int


@dataclass(frozen=True)
class PruneSweep:
    """Drop-one-at-a-time records from the full pool down to one detector."""

    mode: str
    records: tuple[PruneRecord, ...]


def average_fusion(subset: Iterable[int], matrix: ScoreMatrix) -> FusionObjectives:
    """Objectives of the equal-weight average over a detector subset."""
    ids = sorted(set(int(i) for i in subset))
    if not ids:
        raise ConfigError("average fusion needs a non-empty subset")
    bits = np.zeros(matrix.n_detectors, dtype=bool)
    for i in ids:
        if not 0 <= i < matrix.n_detectors:
            raise ConfigError(f"detector id {i} outside pool of size {matrix.n_detectors}")
        bits[i] = True
    return fusion.evaluate(bits, matrix)


def _standardize(scores: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean = scores.mean(axis=1, keepdims=True)
    std = scores.std(axis=1, keepdims=True)
    std[std == 0.0] = 1.0
    return (scores - mean) / std, mean.ravel(), std.ravel()


def _fit_standardized(
    features: np.ndarray,
    targets: np.ndarray,
    l2_lambda: float,
    max_iters: int,
    tol: float,
) -> tuple[np.ndarray, float, int, float, float, bool, list[float]]:
    """Gradient descent on the z-scored design matrix (features: T x D)."""
    t, d = features.shape
    w = np.zeros(d)
    b = 0.0

    def loss_and_grad(w: np.ndarray, b: float) -> tuple[float, np.ndarray, float]:
        z = features @ w + b
        # log(1 + exp(-yz)) with y in {-1, +1}
        yz = np.where(targets > 0.5, z, -z)
        loss = float(np.logaddexp(0.0, -yz).mean() + 0.5 * l2_lambda * (w @ w))
        p = np.empty_like(z)
        pos = z >= 0
        p[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        expz = np.exp(z[~pos])
        p[~pos] = expz / (1.0 + expz)
        resid = p - targets
        grad_w = features.T @ resid / t + l2_lambda * w
        grad_b = float(resid.mean())
        return loss, grad_w, grad_b

    loss, grad_w, grad_b = loss_and_grad(w, b)
    trace = [loss]
    iterations = 0
    grad_norm = float(np.sqrt(grad_w @ grad_w + grad_b**2))
    step = 1.0
    while iterations < max_iters and grad_norm >= tol:
        # backtracking from a slightly enlarged previous step
        step = min(step * 2.0, 64.0)
        sq = grad_norm**2
        while True:
            w_new = w - step * grad_w
            b_new = b - step * grad_b
            loss_new, grad_w_new, grad_b_new = loss_and_grad(w_new, b_new)
            if loss_new <= loss - 1e-4 * step * sq or step < 1e-16:
                break
            step *= 0.5
        w, b, loss, grad_w, grad_b = w_new, b_new, loss_new, grad_w_new, grad_b_new
        grad_norm = float(np.sqrt(grad_w @ grad_w + grad_b**2))
        trace.append(loss)
        iterations += 1
    return w, b, iterations, loss, grad_norm, grad_norm < tol, trace


def logreg_fit(
    matrix: ScoreMatrix,
    l2_lambda: float = DEFAULT_L2_LAMBDA,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> LogRegModel:
    """Fit the logistic regression fusion on a score matrix.

    The optimization starts from zero weights and is deterministic; ``seed``
    is accepted for interface stability but unused by the convex solver.
    Non-convergence is reported as a warning and the model still returned.
    """
    del seed
    if l2_lambda < 0:
        raise ConfigError(f"l2_lambda must be non-negative, got {l2_lambda}")
    features, mean, std = _standardize(matrix.scores)
    targets = matrix.labels.bonafide_mask.astype(np.float64)
    w_std, b_std, iters, loss, grad_norm, converged, trace = _fit_standardized(
        features.T, targets, l2_lambda, max_iters, tol
    )
    if not converged:
        warnings.warn(
            f"logistic regression did not converge in {iters} iterations "
            f"(final gradient norm {grad_norm:.3e})",
            RuntimeWarning,
            stacklevel=2,
        )
    weights = w_std / std
    bias = float(b_std - np.sum(w_std * mean / std))
    return LogRegModel(
        weights=weights,
        bias=bias,
        iterations=iters,
        final_loss=loss,
        final_grad_norm=grad_norm,
        converged=converged,
        loss_trace=tuple(trace),
    )


def logreg_fuse(model: LogRegModel, matrix: ScoreMatrix) -> np.ndarray:
    """Linear fused score per trial: w . s + b."""
    if model.weights.shape[0] != matrix.n_detectors:
        raise DataError(
            f"model dimension {model.weights.shape[0]} does not match pool size {matrix.n_detectors}"
        )
    return model.weights @ matrix.scores + model.bias


def _submatrix_arrays(matrix: ScoreMatrix, active: list[int]) -> np.ndarray:
    return matrix.scores[np.array(active, dtype=int)]


def prune_sweep(
    matrix_dev: ScoreMatrix,
    matrix_eval: ScoreMatrix,
    mode: str,
    l2_lambda: float = DEFAULT_L2_LAMBDA,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> PruneSweep:
    """Progressively drop one detector at a time from the logreg fusion.

    ``by_weight`` drops the detector with the smallest absolute standardized
    weight in a model refit on the survivors; ``by_individual_eer`` drops
    the survivor whose single-detector dev EER is worst. Each record holds
    the eval EER of the refit fusion and the surviving parameter total.
    """
    if mode not in PRUNE_MODES:
        raise ConfigError(f"prune mode must be one of {PRUNE_MODES}, got {mode!r}")
    if matrix_dev.pool.names != matrix_eval.pool.names:
        raise DataError("dev and eval matrices must share the detector pool")

    dev_targets = matrix_dev.labels.bonafide_mask.astype(np.float64)
    individual_dev_eer = np.array(
        [metrics.eer(matrix_dev.scores[i], matrix_dev.labels) for i in range(matrix_dev.n_detectors)]
    )

    active = list(range(matrix_dev.n_detectors))
    records: list[PruneRecord] = []
    while active:
        dev_scores = _submatrix_arrays(matrix_dev, active)
        features, mean, std = _standardize(dev_scores)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            w_std, b_std, *_ = _fit_standardized(features.T, dev_targets, l2_lambda, max_iters, tol)
        raw_w = w_std / std
        raw_b = float(b_std - np.sum(w_std * mean / std))
        fused_eval = raw_w @ _submatrix_arrays(matrix_eval, active) + raw_b
        records.append(
            PruneRecord(
                active=tuple(active),
                eer=metrics.eer(fused_eval, matrix_eval.labels),
                params=fusion.param_count(active, matrix_dev.pool),
            )
        )
        if len(active) == 1:
            break
        if mode == "by_weight":
            drop = active[int(np.argmin(np.abs(w_std)))]
        else:
            drop = active[int(np.argmax(individual_dev_eer[active]))]
        active.remove(drop)
    return PruneSweep(mode=mode, records=tuple(records))
