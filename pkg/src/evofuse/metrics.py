"""Detection error metrics: DET operating points, EER, and minDCF.

The decision rule is ``score >= threshold`` accepts a trial as bonafide.
At a threshold ``t``:

* FAR: fraction of spoof trials with score >= t (falsely accepted)
* FRR: fraction of bonafide trials with score < t (falsely rejected)

Trials sharing a score value cross the decision boundary together, so
operating points are computed at the distinct score values plus one
sentinel threshold below the minimum and one above the maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .score_data import TrialLabels


@dataclass(frozen=True)
class CostModel:
    """Detection cost parameters for minDCF.

    Defaults are a documented project choice; override them to match a
    specific evaluation protocol.
    """

    c_miss: float = 1.0
    c_fa: float = 10.0
    p_target: float = 0.05

    def __post_init__(self) -> None:
        if self.c_miss <= 0 or self.c_fa <= 0:
            raise DataError("cost model: c_miss and c_fa must be positive")
        if not 0.0 < self.p_target < 1.0:
            raise DataError("cost model: p_target must lie in (0, 1)")

    @property
    def normalizer(self) -> float:
        return min(self.c_miss * self.p_target, self.c_fa * (1.0 - self.p_target))


@dataclass(frozen=True)
class DetCurve:
    """Operating points along strictly increasing thresholds.

    The first point is always (far=1, frr=0) and the last (far=0, frr=1).
    """

    thresholds: np.ndarray
    far: np.ndarray
    frr: np.ndarray

    def __len__(self) -> int:
        return len(self.thresholds)


def _bonafide_mask(labels: TrialLabels | np.ndarray) -> np.ndarray:
    if isinstance(labels, TrialLabels):
        return labels.bonafide_mask
    return np.asarray(labels, dtype=bool)


def _split_scores(scores: np.ndarray, labels: TrialLabels | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1:
        raise DataError(f"scores must be a vector, got shape {scores.shape}")
    if not np.isfinite(scores).all():
        raise DataError("scores contain non-finite values")
    mask = _bonafide_mask(labels)
    if mask.shape != scores.shape:
        raise DataError(f"scores ({scores.shape[0]}) and labels ({mask.shape[0]}) differ in length")
    bona = scores[mask]
    spoof = scores[~mask]
    if bona.size == 0 or spoof.size == 0:
        raise DataError("need at least one bonafide and one spoof trial")
    return bona, spoof


def det_points(scores: np.ndarray, labels: TrialLabels | np.ndarray) -> DetCurve:
    """Compute the DET operating points of a score vector.

    Args:
        scores: per-trial detection scores, higher means more bonafide.
        labels: trial labels, or a boolean mask that is True for bonafide.

    Returns:
        DetCurve with one point per distinct operating point. Consecutive
        thresholds that leave the error rates unchanged are collapsed, so
        a constant score vector yields exactly the two sentinel points.
    """
    bona, spoof = _split_scores(scores, labels)
    distinct = np.unique(np.concatenate([bona, spoof]))
    thresholds = np.concatenate(([distinct[0] - 1.0], distinct, [distinct[-1] + 1.0]))

    bona_sorted = np.sort(bona)
    spoof_sorted = np.sort(spoof)
    # counts below each threshold; score >= t accepts, so FAR needs the rest
    far = (spoof.size - np.searchsorted(spoof_sorted, thresholds, side="left")) / spoof.size
    frr = np.searchsorted(bona_sorted, thresholds, side="left") / bona.size

    keep = np.ones(len(thresholds), dtype=bool)
    keep[1:] = (np.diff(far) != 0.0) | (np.diff(frr) != 0.0)
    return DetCurve(thresholds=thresholds[keep], far=far[keep], frr=frr[keep])


def eer(scores: np.ndarray, labels: TrialLabels | np.ndarray) -> float:
    """Equal error rate via the interpolated FAR/FRR crossing.

    FAR - FRR decreases monotonically along the curve from +1 to -1. If a
    point with FAR == FRR exists its common value is returned; otherwise
    the linear interpolants of FAR and FRR between the two points that
    bracket the sign change are intersected.

    Scores are never flipped: an anti-correlated detector legitimately
    reports an EER above 0.5.
    """
    curve = det_points(scores, labels)
    diff = curve.far - curve.frr
    exact = np.flatnonzero(diff == 0.0)
    if exact.size:
        return float(curve.far[exact[0]])
    i = int(np.flatnonzero((diff[:-1] > 0.0) & (diff[1:] < 0.0))[0])
    u = diff[i] / (diff[i] - diff[i + 1])
    return float(curve.far[i] + (curve.far[i + 1] - curve.far[i]) * u)


def min_dcf(scores: np.ndarray, labels: TrialLabels | np.ndarray, cost: CostModel | None = None) -> float:
    """Minimum normalized detection cost over all operating points.

    DCF(t) = c_miss * p_target * FRR(t) + c_fa * (1 - p_target) * FAR(t),
    minimized over the DET curve and divided by the cost of the best
    trivial system (accept-all or reject-all).
    """
    if cost is None:
        cost = CostModel()
    curve = det_points(scores, labels)
    dcf = cost.c_miss * cost.p_target * curve.frr + cost.c_fa * (1.0 - cost.p_target) * curve.far
    return float(dcf.min() / cost.normalizer)
