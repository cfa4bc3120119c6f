"""Chromosome encodings, fused score computation, and objective evaluation.

Two encodings over a pool of D detectors:

* binary: boolean vector, selected detectors are averaged with equal weight
* real: vector of genes in [0, 1]; genes below the cut-off are zeroed, the
  rest are normalized to sum to 1 and used as fusion weights

Genes are stored unnormalized; weight normalization happens only when a
chromosome is turned into effective weights at evaluation time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import metrics
from .errors import DataError
from .score_data import DetectorPool, ScoreMatrix

DEFAULT_CUTOFF = 0.001


@dataclass(frozen=True)
class EffectiveWeights:
    """Normalized fusion weights and the detector ids they cover."""

    weights: np.ndarray
    support: tuple[int, ...]


@dataclass(frozen=True)
class FusionObjectives:
    """The two minimization objectives of a candidate fusion."""

    eer: float
    params: int

    def as_tuple(self) -> tuple[float, int]:
        return (self.eer, self.params)


def is_binary(chromosome: np.ndarray) -> bool:
    return chromosome.dtype == np.bool_


def _check_length(chromosome: np.ndarray, d: int) -> None:
    if chromosome.ndim != 1 or chromosome.shape[0] != d:
        raise DataError(f"chromosome length {chromosome.shape} does not match pool size {d}")


def fuse_binary(bits: np.ndarray, matrix: ScoreMatrix) -> np.ndarray:
    """Average the score rows of the selected detectors."""
    _check_length(bits, matrix.n_detectors)
    if not bits.any():
        raise DataError("binary chromosome selects no detector (missing repair)")
    return matrix.scores[bits].mean(axis=0)


def effective_weights(genes: np.ndarray, cutoff: float = DEFAULT_CUTOFF) -> EffectiveWeights:
    """Zero genes below the cut-off and normalize the rest to sum to 1."""
    if not 0.0 < cutoff < 1.0:
        raise DataError(f"cutoff must lie in (0, 1), got {cutoff}")
    kept = np.where(genes >= cutoff, genes, 0.0)
    total = kept.sum()
    if total <= 0.0:
        raise DataError("all genes fall below the cut-off (missing repair)")
    weights = kept / total
    support = tuple(int(i) for i in np.flatnonzero(kept))
    return EffectiveWeights(weights=weights, support=support)


def fuse_real(genes: np.ndarray, matrix: ScoreMatrix, cutoff: float = DEFAULT_CUTOFF) -> np.ndarray:
    """Weighted sum of detector scores under the effective weights."""
    _check_length(genes, matrix.n_detectors)
    return effective_weights(genes, cutoff).weights @ matrix.scores


def param_count(support: Iterable[int], pool: DetectorPool) -> int:
    """Total parameter count of the given detector ids (plain sum)."""
    return int(sum(pool.detectors[i].param_count for i in support))


def evaluate(chromosome: np.ndarray, matrix: ScoreMatrix, cutoff: float = DEFAULT_CUTOFF) -> FusionObjectives:
    """Evaluate both objectives of a chromosome against a score matrix.

    Pure function of its inputs: repeated calls return identical values.
    The encoding is inferred from the dtype (bool selects the binary path).
    """
    if is_binary(chromosome):
        _check_length(chromosome, matrix.n_detectors)
        if not chromosome.any():
            raise DataError("binary chromosome selects no detector (missing repair)")
        fused = matrix.scores[chromosome].mean(axis=0)
        support: Iterable[int] = np.flatnonzero(chromosome)
    else:
        _check_length(chromosome, matrix.n_detectors)
        ew = effective_weights(chromosome, cutoff)
        fused = ew.weights @ matrix.scores
        support = ew.support
    return FusionObjectives(
        eer=metrics.eer(fused, matrix.labels),
        params=param_count(support, matrix.pool),
    )


def repair_binary(bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Make an all-zero selection feasible by setting one random gene."""
    if not bits.any():
        bits = bits.copy()
        bits[int(rng.integers(bits.shape[0]))] = True
    return bits


def repair_real(genes: np.ndarray, cutoff: float = DEFAULT_CUTOFF) -> np.ndarray:
    """Make an all-below-cutoff gene vector feasible.

    The largest gene is raised to exactly the cut-off, keeping the repair
    deterministic and minimal.
    """
    if (genes < cutoff).all():
        genes = genes.copy()
        genes[int(np.argmax(genes))] = cutoff
    return genes


def format_chromosome(chromosome: np.ndarray) -> str:
    """Serialize for front CSVs: 0/1 string or comma-separated decimals."""
    if is_binary(chromosome):
        return "".join("1" if b else "0" for b in chromosome)
    return ",".join(f"{g:.6g}" for g in chromosome)


def parse_chromosome(text: str, encoding: str) -> np.ndarray:
    """Inverse of :func:`format_chromosome` for a known encoding."""
    if encoding == "binary":
        if not set(text) <= {"0", "1"}:
            raise DataError(f"binary chromosome must be a 0/1 string, got {text!r}")
        return np.array([c == "1" for c in text], dtype=bool)
    if encoding == "real":
        try:
            return np.array([float(f) for f in text.split(",")], dtype=np.float64)
        except ValueError as exc:
            raise DataError(f"cannot parse real chromosome {text!r}") from exc
    raise DataError(f"unknown encoding {encoding!r}")
