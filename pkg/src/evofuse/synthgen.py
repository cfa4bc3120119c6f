"""Synthetic detector score generation with analytically known error rates.

Each detector follows a Gaussian class-conditional model: spoof scores are
N(0, 1) and bonafide scores N(d', 1). The unit variance is split into a
shared factor (one draw per trial, common to all detectors) and detector
noise::

    score = d' * is_bonafide + rho * z_trial + sqrt(1 - rho^2) * noise

so two detectors with loadings rho_i, rho_j correlate with rho_i * rho_j.
A single detector has EER = Phi(-d'/2), and any weighted average of
detectors remains Gaussian, which gives the fused EER in closed form. These
closed forms serve as ground-truth oracles for fusion experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .score_data import DetectorMeta, DetectorPool, ScoreMatrix, TrialLabels


@dataclass(frozen=True)
class SynthDetectorSpec:
    """Parameters of one synthetic detector."""

    d_prime: float
    rho: float
    param_count: int
    name: str = ""

    def __post_init__(self) -> None:
        if self.d_prime < 0:
            raise ConfigError(f"d_prime must be non-negative, got {self.d_prime}")
        if not 0.0 <= self.rho < 1.0:
            raise ConfigError(f"rho must lie in [0, 1), got {self.rho}")
        if self.param_count <= 0:
            raise ConfigError(f"param_count must be positive, got {self.param_count}")


@dataclass(frozen=True)
class SynthScenario:
    detectors: tuple[SynthDetectorSpec, ...]
    n_bonafide: int
    n_spoof: int
    seed: int
    name: str = "custom"

    def __post_init__(self) -> None:
        if not self.detectors:
            raise ConfigError("scenario needs at least one detector")
        if self.n_bonafide < 1 or self.n_spoof < 1:
            raise ConfigError("trial counts must be at least 1 per class")


@dataclass(frozen=True)
class GroundTruthRow:
    name: str
    d_prime: float
    analytic_eer: float
    param_count: int


@dataclass(frozen=True)
class GroundTruth:
    """Per-detector analytic EERs plus the equal-weight average fusion."""

    rows: tuple[GroundTruthRow, ...]
    average_d_prime: float
    average_eer: float


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def analytic_eer(d_prime: float) -> float:
    """EER of a single Gaussian detector: Phi(-d'/2)."""
    if d_prime < 0:
        raise ConfigError(f"d_prime must be non-negative, got {d_prime}")
    return norm_cdf(-d_prime / 2.0)


def fused_effective_dprime(specs: tuple[SynthDetectorSpec, ...], weights: np.ndarray | None = None) -> float:
    """Class separation of a weighted average, in its own noise units.

    With weights w summing to 1, the fused separation is sum(w_i d'_i) and
    the fused variance (sum(w_i rho_i))^2 + sum(w_i^2 (1 - rho_i^2)).
    """
    if weights is None:
        weights = np.full(len(specs), 1.0 / len(specs))
    weights = np.asarray(weights, dtype=np.float64)
    d = np.array([s.d_prime for s in specs])
    rho = np.array([s.rho for s in specs])
    separation = float(weights @ d)
    variance = float((weights @ rho) ** 2 + (weights**2 @ (1.0 - rho**2)))
    return separation / math.sqrt(variance)


def fused_analytic_eer(specs: tuple[SynthDetectorSpec, ...], weights: np.ndarray | None = None) -> float:
    """Closed-form EER of a weighted average of the given detectors."""
    return norm_cdf(-fused_effective_dprime(specs, weights) / 2.0)


def generate(scenario: SynthScenario) -> tuple[ScoreMatrix, GroundTruth]:
    """Draw a score matrix for a scenario, bit-identical under its seed."""
    rng = np.random.default_rng(scenario.seed)
    d = len(scenario.detectors)
    t = scenario.n_bonafide + scenario.n_spoof

    bona_mask = np.zeros(t, dtype=bool)
    bona_mask[: scenario.n_bonafide] = True
    shared = rng.standard_normal(t)
    noise = rng.standard_normal((d, t))

    scores = np.empty((d, t), dtype=np.float64)
    for i, spec in enumerate(scenario.detectors):
        scores[i] = spec.d_prime * bona_mask + spec.rho * shared + math.sqrt(1.0 - spec.rho**2) * noise[i]

    trial_ids = tuple(
        [f"b{k:06d}" for k in range(scenario.n_bonafide)] + [f"s{k:06d}" for k in range(scenario.n_spoof)]
    )
    labels = TrialLabels(trial_ids=trial_ids, bonafide_mask=bona_mask)

    detectors = []
    for i, spec in enumerate(scenario.detectors):
        name = spec.name or f"synth{i:02d}"
        detectors.append(
            DetectorMeta(id=i, name=name, param_count=spec.param_count, score_path=Path(f"scores/{name}.txt"))
        )
    pool = DetectorPool(detectors=tuple(detectors))
    matrix = ScoreMatrix(pool=pool, labels=labels, scores=scores)

    rows = tuple(
        GroundTruthRow(
            name=pool.detectors[i].name,
            d_prime=spec.d_prime,
            analytic_eer=analytic_eer(spec.d_prime),
            param_count=spec.param_count,
        )
        for i, spec in enumerate(scenario.detectors)
    )
    avg_dprime = fused_effective_dprime(scenario.detectors)
    truth = GroundTruth(rows=rows, average_d_prime=avg_dprime, average_eer=norm_cdf(-avg_dprime / 2.0))
    return matrix, truth


# Named scenarios used throughout the test and demo tooling. S1 is a mixed
# pool where stronger detectors are mostly but not always larger, so the
# accuracy/size trade-off has a non-trivial front. SEP is linearly separable.
_S1_SPECS = (
    (0.5, 0.5, 10_000_000),
    (0.7, 0.5, 16_000_000),
    (0.9, 0.5, 25_000_000),
    (1.1, 0.5, 40_000_000),
    (1.3, 0.5, 63_000_000),
    (1.5, 0.5, 100_000_000),
    (1.8, 0.5, 160_000_000),
    (2.0, 0.5, 250_000_000),
    (2.2, 0.5, 400_000_000),
    (2.5, 0.5, 200_000_000),
    (2.8, 0.5, 1_000_000_000),
    (3.0, 0.5, 630_000_000),
)

_SEP_SPECS = (
    (8.0, 0.0, 100_000_000),
    (8.0, 0.0, 200_000_000),
    (8.0, 0.0, 300_000_000),
)


def scenario_s1(n_bonafide: int = 2500, n_spoof: int = 2500, seed: int = 13) -> SynthScenario:
    """Twelve mixed-strength detectors with shared-factor correlation 0.5."""
    specs = tuple(
        SynthDetectorSpec(d_prime=d, rho=r, param_count=p, name=f"s1-{i:02d}")
        for i, (d, r, p) in enumerate(_S1_SPECS)
    )
    return SynthScenario(detectors=specs, n_bonafide=n_bonafide, n_spoof=n_spoof, seed=seed, name="s1")


def scenario_sep(n_bonafide: int = 2000, n_spoof: int = 2000, seed: int = 17) -> SynthScenario:
    """Three independent, linearly separable detectors (d' = 8)."""
    specs = tuple(
        SynthDetectorSpec(d_prime=d, rho=r, param_count=p, name=f"sep-{i:02d}")
        for i, (d, r, p) in enumerate(_SEP_SPECS)
    )
    return SynthScenario(detectors=specs, n_bonafide=n_bonafide, n_spoof=n_spoof, seed=seed, name="sep")


NAMED_SCENARIOS = {"s1": scenario_s1, "sep": scenario_sep}
