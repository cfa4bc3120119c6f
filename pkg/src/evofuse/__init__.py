"""Multi-objective evolutionary score fusion for deepfake speech detectors.

The package searches over fusions of black-box detector scores with NSGA-II,
jointly minimizing equal error rate and total parameter count, and ships the
metrics, baselines, and synthetic data generation needed to evaluate the
resulting Pareto fronts.
"""

__version__ = "0.1.0"

from .baselines import LogRegModel, PruneSweep, average_fusion, logreg_fit, logreg_fuse, prune_sweep
from .errors import ConfigError, DataError, EvofuseError
from .fusion import (
    EffectiveWeights,
    FusionObjectives,
    effective_weights,
    evaluate,
    fuse_binary,
    fuse_real,
    param_count,
)
from .metrics import CostModel, DetCurve, det_points, eer, min_dcf
from .nsga2 import (
    Individual,
    ParetoFront,
    RunConfig,
    RunReport,
    crowding_distance,
    evolve,
    fast_nondominated_sort,
    hypervolume_2d,
    run_many,
    seed_population,
    super_pareto,
    tournament_select,
)
from .score_data import (
    DetectorMeta,
    DetectorPool,
    ScoreMatrix,
    TrialLabels,
    assemble_matrix,
    load_labels,
    load_manifest,
)
from .synthgen import SynthDetectorSpec, SynthScenario, analytic_eer, fused_analytic_eer, generate

__all__ = [
    "__version__",
    "ConfigError",
    "CostModel",
    "DataError",
    "DetCurve",
    "DetectorMeta",
    "DetectorPool",
    "EffectiveWeights",
    "EvofuseError",
    "FusionObjectives",
    "Individual",
    "LogRegModel",
    "ParetoFront",
    "PruneSweep",
    "RunConfig",
    "RunReport",
    "ScoreMatrix",
    "SynthDetectorSpec",
    "SynthScenario",
    "TrialLabels",
    "analytic_eer",
    "assemble_matrix",
    "average_fusion",
    "crowding_distance",
    "det_points",
    "eer",
    "effective_weights",
    "evaluate",
    "evolve",
    "fast_nondominated_sort",
    "fuse_binary",
    "fuse_real",
    "fused_analytic_eer",
    "generate",
    "hypervolume_2d",
    "load_labels",
    "load_manifest",
    "logreg_fit",
    "logreg_fuse",
    "min_dcf",
    "param_count",
    "prune_sweep",
    "run_many",
    "seed_population",
    "super_pareto",
    "tournament_select",
]
