"""drsteer: interactive steering of 2-D dimensionality reductions.

Fit a linear (PCA) or autoencoder projection, then explore it: project
feature edits onto the plane without refitting, drag points and solve for
feature values that realize the move (optionally under locks and bounds),
trace per-feature prolines, and rasterize which plane regions a constrained
point can reach.
"""

from .autoencoder import (
    AEModel,
    FeasibilityResult,
    TrainConfig,
    TrainingDivergedError,
    check_feasibility,
    train_autoencoder,
)
from .constraints import ConstraintError, ConstraintSet, lock_tolerances
from .dataset import CsvParseError, Dataset, FeatureStats, compute_stats, dataset_from_matrix, load_csv
from .evaluation import (
    BenchConfig,
    BenchRow,
    NeighborhoodScore,
    gen_gaussian,
    knn,
    neighborhood_correlation,
    run_benchmark,
    write_report,
)
from .interactions import (
    FeasibilityMap,
    PlaneBounds,
    Proline,
    ProjectionMark,
    compute_feasibility_map,
    compute_proline,
    projection_marks,
    proline_lengths,
    snap_position,
)
from .pca import DegenerateFitError, PCAModel, fit_pca
from .solver import InfeasibleBoundsError, QPProblem, QPSolution, least_norm, solve_qp

__all__ = [
    "AEModel",
    "BenchConfig",
    "BenchRow",
    "ConstraintError",
    "ConstraintSet",
    "CsvParseError",
    "Dataset",
    "DegenerateFitError",
    "FeasibilityMap",
    "FeasibilityResult",
    "FeatureStats",
    "InfeasibleBoundsError",
    "NeighborhoodScore",
    "PCAModel",
    "PlaneBounds",
    "Proline",
    "ProjectionMark",
    "QPProblem",
    "QPSolution",
    "TrainConfig",
    "TrainingDivergedError",
    "check_feasibility",
    "compute_feasibility_map",
    "compute_proline",
    "compute_stats",
    "dataset_from_matrix",
    "fit_pca",
    "gen_gaussian",
    "knn",
    "least_norm",
    "lock_tolerances",
    "load_csv",
    "neighborhood_correlation",
    "projection_marks",
    "proline_lengths",
    "run_benchmark",
    "snap_position",
    "solve_qp",
    "train_autoencoder",
    "write_report",
]

__version__ = "0.1.0"
