"""NSGA-II search over fusion configurations.

Both objectives (EER, parameter count) are minimized. The engine follows
the canonical elitist scheme: binary tournament selection on rank and
crowding, uniform crossover, bit-flip or polynomial mutation, and (mu+lambda)
survivor truncation of the combined parent/offspring pool.

Bookkeeping (sorting, crowding, selection) is vectorized; objective
evaluation is a pure function per individual and may run on a thread pool
without affecting results. A single root seed derives independent RNG
streams for seeding, selection, crossover, and mutation, so runs are
bit-reproducible regardless of evaluation parallelism.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import fusion
from .errors import ConfigError, DataError
from .fusion import DEFAULT_CUTOFF, FusionObjectives
from .score_data import DetectorPool, ScoreMatrix

ENCODINGS = ("binary", "real")
DEFAULT_CROSSOVER_RATE = {"binary": 0.7, "real": 0.5}
DEFAULT_MUTATION_RATE = {"binary": 1.0 / 36.0, "real": 0.01}
DEFAULT_EER_REF = 0.20


@dataclass
class Individual:
    chromosome: np.ndarray
    objectives: FusionObjectives
    rank: int = 0
    crowding: float = 0.0


@dataclass(frozen=True)
class FrontMember:
    objectives: FusionObjectives
    chromosome: np.ndarray


@dataclass(frozen=True)
class ParetoFront:
    """Mutually non-dominated members, sorted by ascending EER."""

    members: tuple[FrontMember, ...]
    encoding: str

    def __len__(self) -> int:
        return len(self.members)

    def objective_array(self) -> np.ndarray:
        return np.array([[m.objectives.eer, m.objectives.params] for m in self.members], dtype=np.float64)


@dataclass(frozen=True)
class RunConfig:
    """Hyperparameters of one optimization run.

    ``crossover_rate`` and ``mutation_rate`` default per encoding (0.7 and
    1/36 for binary, 0.5 and 0.01 for real) when left as None. The
    reference point defaults to 20% EER and the total pool parameter count.
    """

    encoding: str
    population_size: int = 100
    max_generations: int = 500
    crossover_rate: float | None = None
    mutation_rate: float | None = None
    eta_m: float = 15.0
    cutoff: float = DEFAULT_CUTOFF
    epsilon: float = 1e-5
    patience: int = 30
    rng_seed: int = 0
    reference_point: tuple[float, float] | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.encoding not in ENCODINGS:
            raise ConfigError(f"encoding must be one of {ENCODINGS}, got {self.encoding!r}")
        if self.population_size < 2:
            raise ConfigError(f"population_size must be at least 2, got {self.population_size}")
        if self.max_generations < 1:
            raise ConfigError(f"max_generations must be at least 1, got {self.max_generations}")
        for rate, label in ((self.crossover_rate, "crossover_rate"), (self.mutation_rate, "mutation_rate")):
            if rate is not None and not 0.0 <= rate <= 1.0:
                raise ConfigError(f"{label} must lie in [0, 1], got {rate}")
        if self.eta_m < 0:
            raise ConfigError(f"eta_m must be non-negative, got {self.eta_m}")
        if not 0.0 < self.cutoff < 1.0:
            raise ConfigError(f"cutoff must lie in (0, 1), got {self.cutoff}")
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.patience < 1:
            raise ConfigError(f"patience must be at least 1, got {self.patience}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.reference_point is not None and any(r <= 0 for r in self.reference_point):
            raise ConfigError(f"reference point must be positive, got {self.reference_point}")

    @property
    def resolved_crossover_rate(self) -> float:
        return DEFAULT_CROSSOVER_RATE[self.encoding] if self.crossover_rate is None else self.crossover_rate

    @property
    def resolved_mutation_rate(self) -> float:
        return DEFAULT_MUTATION_RATE[self.encoding] if self.mutation_rate is None else self.mutation_rate

    def resolved_reference(self, pool: DetectorPool) -> tuple[float, float]:
        if self.reference_point is not None:
            return self.reference_point
        return (DEFAULT_EER_REF, float(pool.total_param_count))


@dataclass(frozen=True)
class RunReport:
    config: RunConfig
    reference_point: tuple[float, float]
    front: ParetoFront
    hv_trace: tuple[float, ...]
    generations_run: int
    wall_time: float
    seed_front_hv: float


def fast_nondominated_sort(points: np.ndarray) -> list[np.ndarray]:
    """Partition objective pairs into non-domination fronts.

    A point dominates another when it is no worse in both objectives and
    strictly better in at least one. Front 0 holds the points dominated by
    nobody; front k the points dominated only by earlier fronts.

    Args:
        points: (n, 2) array of objective values, both minimized.

    Returns:
        List of index arrays, one per front, each in ascending index order.
    """
    pts = np.asarray(points, dtype=np.float64)
    n = pts.shape[0]
    if n == 0:
        return []
    if not np.isfinite(pts).all():
        raise DataError("objective values must be finite")
    # pairwise 2-D comparisons beat the general broadcast by a wide margin
    a, b = pts[:, 0], pts[:, 1]
    le0 = a[:, None] <= a[None, :]
    le1 = b[:, None] <= b[None, :]
    both_equal = (a[:, None] == a[None, :]) & (b[:, None] == b[None, :])
    dominates = le0 & le1 & ~both_equal
    counts = dominates.sum(axis=0)

    fronts: list[np.ndarray] = []
    unassigned = np.ones(n, dtype=bool)
    current = np.flatnonzero(counts == 0)
    while current.size:
        fronts.append(current)
        unassigned[current] = False
        counts = counts - dominates[current].sum(axis=0)
        current = np.flatnonzero(unassigned & (counts == 0))
    return fronts


def crowding_distance(front_points: np.ndarray) -> np.ndarray:
    """Crowding distances of one front's objective pairs.

    Boundary points of each objective's sort get +infinity; interior points
    accumulate the normalized span of their neighbours. An objective with
    zero span contributes nothing to interior points.
    """
    pts = np.asarray(front_points, dtype=np.float64)
    m = pts.shape[0]
    if m <= 2:
        return np.full(m, np.inf)
    dist = np.zeros(m)
    for k in range(pts.shape[1]):
        order = np.argsort(pts[:, k], kind="stable")
        vals = pts[order, k]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = vals[-1] - vals[0]
        if span > 0:
            dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return dist


def tournament_select(population: list[Individual], rng: np.random.Generator) -> Individual:
    """Binary tournament on two distinct individuals.

    Lower rank wins; on equal rank the higher crowding distance wins; on a
    full tie the first drawn individual wins.
    """
    n = len(population)
    if n == 0:
        raise ConfigError("cannot select from an empty population")
    if n == 1:
        return population[0]
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    if j >= i:
        j += 1
    a, b = population[i], population[j]
    if a.rank != b.rank:
        return a if a.rank < b.rank else b
    if a.crowding != b.crowding:
        return a if a.crowding > b.crowding else b
    return a


def uniform_crossover(
    parent_a: np.ndarray,
    parent_b: np.ndarray,
    crossover_rate: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform crossover: with probability ``crossover_rate`` each gene
    position swaps between the two offspring with probability 0.5."""
    if parent_a.shape != parent_b.shape or parent_a.dtype != parent_b.dtype:
        raise DataError("parents must share encoding and length")
    child_a, child_b = parent_a.copy(), parent_b.copy()
    if rng.random() < crossover_rate:
        swap = rng.random(parent_a.shape[0]) < 0.5
        child_a[swap], child_b[swap] = parent_b[swap], parent_a[swap]
    return child_a, child_b


def bitflip_mutation(bits: np.ndarray, mutation_rate: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently; repair an all-zero result."""
    flips = rng.random(bits.shape[0]) < mutation_rate
    return fusion.repair_binary(bits ^ flips, rng)


def polynomial_mutation(
    genes: np.ndarray,
    mutation_rate: float,
    eta_m: float,
    rng: np.random.Generator,
    cutoff: float = DEFAULT_CUTOFF,
) -> np.ndarray:
    """Bounded polynomial mutation on [0, 1].

    Each gene mutates independently with probability ``mutation_rate``.
    Larger ``eta_m`` concentrates the perturbation around the current value.
    A result with every gene below the cut-off is repaired.
    """
    n = genes.shape[0]
    mutate = rng.random(n) < mutation_rate
    u = rng.random(n)
    out = genes.copy()
    if mutate.any():
        x = out[mutate]
        um = u[mutate]
        exponent = eta_m + 1.0
        low = um < 0.5
        delta = np.empty_like(x)
        delta[low] = (2.0 * um[low] + (1.0 - 2.0 * um[low]) * (1.0 - x[low]) ** exponent) ** (
            1.0 / exponent
        ) - 1.0
        delta[~low] = 1.0 - (
            2.0 * (1.0 - um[~low]) + 2.0 * (um[~low] - 0.5) * x[~low] ** exponent
        ) ** (1.0 / exponent)
        out[mutate] = np.clip(x + delta, 0.0, 1.0)
    return fusion.repair_real(out, cutoff)


def seed_population(pool: DetectorPool, config: RunConfig, rng: np.random.Generator) -> list[np.ndarray]:
    """Build the hybrid initial population.

    The first chromosome is the all-detector average fusion, the next D are
    the single-detector configurations, and the remainder is random. All
    chromosomes are repaired to feasibility.
    """
    d = len(pool)
    n = config.population_size
    if n < d + 1:
        raise ConfigError(f"population_size must be at least D+1 = {d + 1} to hold the seeds, got {n}")
    chroms: list[np.ndarray] = []
    if config.encoding == "binary":
        chroms.append(np.ones(d, dtype=bool))
        for i in range(d):
            one_hot = np.zeros(d, dtype=bool)
            one_hot[i] = True
            chroms.append(one_hot)
        for _ in range(n - d - 1):
            chroms.append(fusion.repair_binary(rng.random(d) < 0.5, rng))
    else:
        chroms.append(np.full(d, max(1.0 / d, config.cutoff)))
        for i in range(d):
            one_hot = np.zeros(d)
            one_hot[i] = 1.0
            chroms.append(one_hot)
        for _ in range(n - d - 1):
            chroms.append(fusion.repair_real(rng.random(d), config.cutoff))
    return chroms


def hypervolume_2d(front: ParetoFront | np.ndarray, reference: tuple[float, float]) -> float:
    """Exact dominated area of a two-objective front, normalized to [0, 1].

    Objectives are divided by the reference point; members at or beyond the
    reference in either coordinate are clipped out. The remaining staircase
    is integrated exactly. An empty front evaluates to 0.
    """
    if isinstance(front, ParetoFront):
        pts = front.objective_array()
    else:
        pts = np.asarray(front, dtype=np.float64)
    if pts.size == 0:
        return 0.0
    ref = np.asarray(reference, dtype=np.float64)
    if (ref <= 0).any():
        raise ConfigError(f"reference point must be positive, got {reference}")
    norm = pts / ref
    norm = norm[(norm[:, 0] < 1.0) & (norm[:, 1] < 1.0)]
    if norm.shape[0] == 0:
        return 0.0
    # lexicographic order and a correctly-rounded sum make the result a
    # pure, monotone function of the point set
    order = np.lexsort((norm[:, 1], norm[:, 0]))
    x = norm[order, 0]
    y_floor = np.minimum.accumulate(norm[order, 1])
    prev = np.concatenate(([1.0], y_floor[:-1]))
    return math.fsum((1.0 - x) * np.maximum(prev - y_floor, 0.0))


def _evaluate_population(
    chroms: list[np.ndarray], matrix: ScoreMatrix, cutoff: float, workers: int
) -> list[Individual]:
    if workers == 1:
        objs = [fusion.evaluate(c, matrix, cutoff) for c in chroms]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            objs = list(pool.map(lambda c: fusion.evaluate(c, matrix, cutoff), chroms))
    return [Individual(chromosome=c, objectives=o) for c, o in zip(chroms, objs)]


def _objective_array(individuals: list[Individual]) -> np.ndarray:
    return np.array([[ind.objectives.eer, ind.objectives.params] for ind in individuals], dtype=np.float64)


def _rank_and_truncate(individuals: list[Individual], n_survivors: int) -> list[Individual]:
    """Assign rank and crowding, then fill survivors front by front.

    The front that straddles the cut is truncated by descending crowding
    distance (stable, so ties keep their pool order), except that copies
    sharing an objective pair with an earlier front member are dropped
    before any distinct point. Preferring distinct points keeps the whole
    non-dominated set alive whenever it fits within the population, which
    in turn keeps the hypervolume trace non-decreasing.
    """
    pts = _objective_array(individuals)
    fronts = fast_nondominated_sort(pts)
    survivors: list[Individual] = []
    for rank, front in enumerate(fronts):
        dist = crowding_distance(pts[front])
        for local, idx in enumerate(front):
            individuals[idx].rank = rank
            individuals[idx].crowding = float(dist[local])
        if len(survivors) + front.size <= n_survivors:
            survivors.extend(individuals[idx] for idx in front)
        else:
            room = n_survivors - len(survivors)
            seen: set[tuple[float, float]] = set()
            duplicate = np.zeros(front.size, dtype=bool)
            for local, idx in enumerate(front):
                key = (pts[idx, 0], pts[idx, 1])
                duplicate[local] = key in seen
                seen.add(key)
            order = np.lexsort((-dist, duplicate))[:room]
            survivors.extend(individuals[front[idx]] for idx in sorted(order, key=lambda k: front[k]))
        if len(survivors) >= n_survivors:
            break
    return survivors


def _mutate(chrom: np.ndarray, config: RunConfig, rng: np.random.Generator) -> np.ndarray:
    if config.encoding == "binary":
        return bitflip_mutation(chrom, config.resolved_mutation_rate, rng)
    return polynomial_mutation(chrom, config.resolved_mutation_rate, config.eta_m, rng, config.cutoff)


def _make_offspring(
    population: list[Individual],
    config: RunConfig,
    select_rng: np.random.Generator,
    cross_rng: np.random.Generator,
    mut_rng: np.random.Generator,
) -> list[np.ndarray]:
    n = config.population_size
    children: list[np.ndarray] = []
    for _ in range(math.ceil(n / 2)):
        parent_a = tournament_select(population, select_rng)
        parent_b = tournament_select(population, select_rng)
        child_a, child_b = uniform_crossover(
            parent_a.chromosome, parent_b.chromosome, config.resolved_crossover_rate, cross_rng
        )
        children.append(_mutate(child_a, config, mut_rng))
        children.append(_mutate(child_b, config, mut_rng))
    return children[:n]


def _rank0_points(population: list[Individual]) -> np.ndarray:
    return _objective_array([ind for ind in population if ind.rank == 0])


def _extract_front(population: list[Individual], encoding: str) -> ParetoFront:
    """Rank-0 members deduplicated by objective pair, sorted by EER."""
    seen: set[tuple[float, int]] = set()
    members: list[FrontMember] = []
    for ind in population:
        if ind.rank != 0:
            continue
        key = ind.objectives.as_tuple()
        if key in seen:
            continue
        seen.add(key)
        members.append(FrontMember(objectives=ind.objectives, chromosome=ind.chromosome.copy()))
    members.sort(key=lambda m: (m.objectives.eer, m.objectives.params))
    return ParetoFront(members=tuple(members), encoding=encoding)


def evolve(matrix: ScoreMatrix, config: RunConfig) -> RunReport:
    """Run one seeded NSGA-II optimization against a score matrix.

    Generation 1 evaluates the seeded initial population; every subsequent
    generation produces N offspring and truncates the combined pool back to
    N. The hypervolume of the rank-0 front is recorded once per generation,
    and the run stops at ``max_generations`` or once the improvement stays
    below ``epsilon`` for ``patience`` consecutive generations.
    """
    start = time.perf_counter()
    d = matrix.n_detectors
    if config.population_size < d + 1:
        raise ConfigError(
            f"population_size must be at least D+1 = {d + 1} to hold the seeds, got {config.population_size}"
        )
    reference = config.resolved_reference(matrix.pool)
    n = config.population_size

    root = np.random.SeedSequence(config.rng_seed)
    seed_rng, select_rng, cross_rng, mut_rng = (np.random.default_rng(s) for s in root.spawn(4))

    chroms = seed_population(matrix.pool, config, seed_rng)
    population = _evaluate_population(chroms, matrix, config.cutoff, config.workers)
    seed_front_hv = hypervolume_2d(_objective_array(population[: d + 1]), reference)
    population = _rank_and_truncate(population, n)

    hv_trace = [hypervolume_2d(_rank0_points(population), reference)]
    stagnant = 0
    while len(hv_trace) < config.max_generations and stagnant < config.patience:
        child_chroms = _make_offspring(population, config, select_rng, cross_rng, mut_rng)
        offspring = _evaluate_population(child_chroms, matrix, config.cutoff, config.workers)
        population = _rank_and_truncate(population + offspring, n)
        hv = hypervolume_2d(_rank0_points(population), reference)
        stagnant = stagnant + 1 if (hv - hv_trace[-1]) < config.epsilon else 0
        hv_trace.append(hv)

    return RunReport(
        config=config,
        reference_point=reference,
        front=_extract_front(population, config.encoding),
        hv_trace=tuple(hv_trace),
        generations_run=len(hv_trace),
        wall_time=time.perf_counter() - start,
        seed_front_hv=seed_front_hv,
    )


def derive_run_seeds(root_seed: int, n_runs: int) -> list[int]:
    """Derive well-mixed per-run seeds from one root seed."""
    state = np.random.SeedSequence(root_seed).generate_state(n_runs, dtype=np.uint64)
    return [int(s) for s in state]


def run_many(matrix: ScoreMatrix, config: RunConfig, n_runs: int) -> tuple[list[RunReport], ParetoFront]:
    """Execute independent runs with derived seeds and aggregate the fronts."""
    if n_runs < 1:
        raise ConfigError(f"number of runs must be at least 1, got {n_runs}")
    reports = []
    for seed in derive_run_seeds(config.rng_seed, n_runs):
        reports.append(evolve(matrix, replace(config, rng_seed=seed)))
    return reports, super_pareto([r.front for r in reports])


def super_pareto(fronts: list[ParetoFront]) -> ParetoFront:
    """Global non-dominated set of the union of several fronts.

    Members are deduplicated by objective pair (first encountered wins)
    and sorted by ascending EER. Mixing encodings is an error.
    """
    if not fronts:
        raise ConfigError("need at least one front to aggregate")
    encodings = {f.encoding for f in fronts}
    if len(encodings) > 1:
        raise ConfigError(f"cannot aggregate fronts with mixed encodings: {sorted(encodings)}")
    members = [m for f in fronts for m in f.members]
    if not members:
        return ParetoFront(members=(), encoding=fronts[0].encoding)
    pts = np.array([[m.objectives.eer, m.objectives.params] for m in members], dtype=np.float64)
    le = (pts[:, None, :] <= pts[None, :, :]).all(axis=-1)
    lt = (pts[:, None, :] < pts[None, :, :]).any(axis=-1)
    dominated = (le & lt).any(axis=0)
    seen: set[tuple[float, int]] = set()
    kept: list[FrontMember] = []
    for i, member in enumerate(members):
        if dominated[i]:
            continue
        key = member.objectives.as_tuple()
        if key in seen:
            continue
        seen.add(key)
        kept.append(member)
    kept.sort(key=lambda m: (m.objectives.eer, m.objectives.params))
    return ParetoFront(members=tuple(kept), encoding=fronts[0].encoding)
