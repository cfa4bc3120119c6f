"""Loading, validation, and alignment of detector scores and trial labels.

On-disk formats are plain UTF-8 text (LF or CRLF):

* detector manifest: CSV with header ``name,param_count,score_file``,
  ``param_count`` in raw integer parameters
* score file (one per detector): ``trial_id score`` per line, whitespace
  separated, score a decimal real
* label file: ``trial_id label`` per line, label ``bonafide`` or ``spoof``

Scores follow the convention that a higher value means more bonafide-like.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

BONAFIDE = "bonafide"
SPOOF = "spoof"


@dataclass(frozen=True)
class DetectorMeta:
    """One detector of the fusion pool.

    ``id`` is the gene index, assigned contiguously in manifest order.
    ``param_count`` is the raw number of model parameters.
    """

    id: int
    name: str
    param_count: int
    score_path: Path


@dataclass(frozen=True)
class DetectorPool:
    """Ordered collection of detectors; the order is the canonical gene order."""

    detectors: tuple[DetectorMeta, ...]

    def __post_init__(self) -> None:
        if not self.detectors:
            raise DataError("detector pool is empty")
        names = [d.name for d in self.detectors]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DataError(f"duplicate detector names: {', '.join(dupes)}")
        for i, det in enumerate(self.detectors):
            if det.id != i:
                raise DataError(f"detector ids must be contiguous from 0, got {det.id} at position {i}")
            if det.param_count <= 0:
                raise DataError(f"detector {det.name!r}: param_count must be positive, got {det.param_count}")

    def __len__(self) -> int:
        return len(self.detectors)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.detectors)

    @property
    def param_counts(self) -> np.ndarray:
        return np.array([d.param_count for d in self.detectors], dtype=np.int64)

    @property
    def total_param_count(self) -> int:
        return int(sum(d.param_count for d in self.detectors))

    def index_of(self, name: str) -> int:
        for det in self.detectors:
            if det.name == name:
                return det.id
        raise DataError(f"unknown detector name {name!r}")


@dataclass(frozen=True)
class TrialLabels:
    """Trial identifiers with their bonafide/spoof class assignment."""

    trial_ids: tuple[str, ...]
    bonafide_mask: np.ndarray

    def __post_init__(self) -> None:
        mask = np.asarray(self.bonafide_mask, dtype=bool)
        object.__setattr__(self, "bonafide_mask", mask)
        if len(self.trial_ids) != mask.shape[0]:
            raise DataError("trial_ids and labels differ in length")
        if len(set(self.trial_ids)) != len(self.trial_ids):
            raise DataError("duplicate trial ids in labels")
        if self.n_bonafide == 0 or self.n_spoof == 0:
            raise DataError("labels must contain at least one bonafide and one spoof trial")
        mask.flags.writeable = False

    def __len__(self) -> int:
        return len(self.trial_ids)

    @property
    def n_bonafide(self) -> int:
        return int(self.bonafide_mask.sum())

    @property
    def n_spoof(self) -> int:
        return int(len(self.trial_ids) - self.n_bonafide)


@dataclass(frozen=True)
class ScoreMatrix:
    """D x T matrix of detector scores aligned over trials.

    Row order matches the pool, column order matches the trial labels.
    The score array is frozen after construction and safe to share
    read-only across concurrent evaluators.
    """

    pool: DetectorPool
    labels: TrialLabels
    scores: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.scores, dtype=np.float64)
        object.__setattr__(self, "scores", arr)
        if arr.ndim != 2 or arr.shape != (len(self.pool), len(self.labels)):
            raise DataError(
                f"score matrix shape {arr.shape} does not match "
                f"{len(self.pool)} detectors x {len(self.labels)} trials"
            )
        if not np.isfinite(arr).all():
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise DataError(
                f"non-finite score for detector {self.pool.detectors[bad[0]].name!r}, "
                f"trial {self.labels.trial_ids[bad[1]]!r}"
            )
        arr.flags.writeable = False

    @property
    def n_detectors(self) -> int:
        return len(self.pool)

    @property
    def n_trials(self) -> int:
        return len(self.labels)


def _read_lines(path: Path) -> list[str]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return text.splitlines()


def load_manifest(path: str | Path) -> DetectorPool:
    """Load a detector manifest CSV into a pool.

    Detector ids are assigned in file order. Relative score paths are
    resolved against the manifest's directory.
    """
    path = Path(path)
    lines = _read_lines(path)
    reader = csv.DictReader(lines)
    expected = ["name", "param_count", "score_file"]
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != expected:
        raise DataError(f"{path}: manifest header must be {','.join(expected)}")
    detectors: list[DetectorMeta] = []
    for lineno, row in enumerate(reader, start=2):
        name = (row["name"] or "").strip()
        if not name:
            raise DataError(f"{path}:{lineno}: empty detector name")
        try:
            params = int((row["param_count"] or "").strip())
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: param_count is not an integer") from exc
        if params <= 0:
            raise DataError(f"{path}:{lineno}: param_count must be positive, got {params}")
        score_file = (row["score_file"] or "").strip()
        if not score_file:
            raise DataError(f"{path}:{lineno}: empty score_file")
        score_path = Path(score_file)
        if not score_path.is_absolute():
            score_path = path.parent / score_path
        detectors.append(DetectorMeta(id=len(detectors), name=name, param_count=params, score_path=score_path))
    if not detectors:
        raise DataError(f"{path}: manifest contains no detectors")
    return DetectorPool(detectors=tuple(detectors))


def load_labels(path: str | Path) -> TrialLabels:
    """Load a trial label file."""
    path = Path(path)
    trial_ids: list[str] = []
    mask: list[bool] = []
    seen: set[str] = set()
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 2:
            raise DataError(f"{path}:{lineno}: expected 'trial_id label', got {line!r}")
        trial_id, label = fields
        if label not in (BONAFIDE, SPOOF):
            raise DataError(f"{path}:{lineno}: unknown label {label!r} (expected {BONAFIDE} or {SPOOF})")
        if trial_id in seen:
            raise DataError(f"{path}:{lineno}: duplicate trial id {trial_id!r}")
        seen.add(trial_id)
        trial_ids.append(trial_id)
        mask.append(label == BONAFIDE)
    if not trial_ids:
        raise DataError(f"{path}: label file is empty")
    return TrialLabels(trial_ids=tuple(trial_ids), bonafide_mask=np.array(mask, dtype=bool))


def load_score_file(path: str | Path) -> dict[str, float]:
    """Load one detector score file as a trial_id -> score mapping."""
    path = Path(path)
    scores: dict[str, float] = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 2:
            raise DataError(f"{path}:{lineno}: expected 'trial_id score', got {line!r}")
        trial_id, raw = fields
        try:
            value = float(raw)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: score is not a number: {raw!r}") from exc
        if not np.isfinite(value):
            raise DataError(f"{path}:{lineno}: non-finite score {raw!r} for trial {trial_id!r}")
        if trial_id in scores:
            raise DataError(f"{path}:{lineno}: duplicate trial id {trial_id!r}")
        scores[trial_id] = value
    return scores


def assemble_matrix(pool: DetectorPool, labels: TrialLabels, znorm: bool = False) -> ScoreMatrix:
    """Assemble the aligned D x T score matrix for a pool and label set.

    Alignment is by trial id: every detector file must contain a score for
    every labelled trial (extra trials in score files are ignored). With
    ``znorm`` each detector row is shifted to mean 0 and scaled to unit
    standard deviation; raw scores are the default.
    """
    matrix = np.empty((len(pool), len(labels)), dtype=np.float64)
    for det in pool.detectors:
        file_scores = load_score_file(det.score_path)
        missing = [t for t in labels.trial_ids if t not in file_scores]
        if missing:
            raise DataError(
                f"detector {det.name!r} ({det.score_path}) is missing a score "
                f"for trial {missing[0]!r} ({len(missing)} missing in total)"
            )
        matrix[det.id] = [file_scores[t] for t in labels.trial_ids]
    if znorm:
        mean = matrix.mean(axis=1, keepdims=True)
        std = matrix.std(axis=1, keepdims=True)
        std[std == 0.0] = 1.0
        matrix = (matrix - mean) / std
    return ScoreMatrix(pool=pool, labels=labels, scores=matrix)


def score_stats(matrix: ScoreMatrix) -> list[dict[str, float | str]]:
    """Per-detector score summary used by validation reports."""
    stats = []
    for det in matrix.pool.detectors:
        row = matrix.scores[det.id]
        stats.append(
            {
                "name": det.name,
                "param_count": det.param_count,
                "min": float(row.min()),
                "max": float(row.max()),
                "mean": float(row.mean()),
            }
        )
    return stats


def write_manifest(pool: DetectorPool, path: str | Path, score_file_for: dict[str, str] | None = None) -> None:
    """Write a pool back to the manifest CSV format.

    ``score_file_for`` overrides the recorded score path per detector name,
    which allows writing relative paths next to freshly written score files.
    """
    path = Path(path)
    rows = ["name,param_count,score_file"]
    for det in pool.detectors:
        score_file = score_file_for[det.name] if score_file_for else str(det.score_path)
        rows.append(f"{det.name},{det.param_count},{score_file}")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


def write_labels(labels: TrialLabels, path: str | Path) -> None:
    """Write labels in the trial_id/label text format."""
    lines = [
        f"{trial_id} {BONAFIDE if bona else SPOOF}"
        for trial_id, bona in zip(labels.trial_ids, labels.bonafide_mask)
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_score_file(trial_ids: tuple[str, ...], scores: np.ndarray, path: str | Path) -> None:
    """Write one detector's scores; ``repr`` keeps floats bit-exact on reload."""
    lines = [f"{trial_id} {score!r}" for trial_id, score in zip(trial_ids, map(float, scores))]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
