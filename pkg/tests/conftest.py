"""Shared fixtures for the test suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from evofuse import score_data, synthgen

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def pool_manifest_path() -> Path:
    return FIXTURES / "asvspoof5_pool.csv"


@pytest.fixture(scope="session")
def fixture_pool(pool_manifest_path: Path) -> score_data.DetectorPool:
    return score_data.load_manifest(pool_manifest_path)


@pytest.fixture
def make_matrix():
    """Build an in-memory ScoreMatrix from raw arrays."""

    def _make(
        scores: np.ndarray,
        bonafide_mask: np.ndarray,
        param_counts: list[int] | None = None,
    ) -> score_data.ScoreMatrix:
        scores = np.asarray(scores, dtype=np.float64)
        d, t = scores.shape
        if param_counts is None:
            param_counts = [(i + 1) * 1_000_000 for i in range(d)]
        detectors = tuple(
            score_data.DetectorMeta(
                id=i, name=f"det{i:02d}", param_count=param_counts[i], score_path=Path(f"det{i:02d}.txt")
            )
            for i in range(d)
        )
        labels = score_data.TrialLabels(
            trial_ids=tuple(f"t{k:05d}" for k in range(t)),
            bonafide_mask=np.asarray(bonafide_mask, dtype=bool),
        )
        return score_data.ScoreMatrix(
            pool=score_data.DetectorPool(detectors=detectors), labels=labels, scores=scores
        )

    return _make


@pytest.fixture(scope="session")
def s1_matrix() -> score_data.ScoreMatrix:
    matrix, _ = synthgen.generate(synthgen.scenario_s1())
    return matrix


@pytest.fixture(scope="session")
def small_s1_matrix() -> score_data.ScoreMatrix:
    matrix, _ = synthgen.generate(synthgen.scenario_s1(n_bonafide=400, n_spoof=400, seed=23))
    return matrix
