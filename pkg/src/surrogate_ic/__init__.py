"""Information-criterion optimization through annealed smooth surrogates."""

__version__ = "0.1.0"

from .cluster import ClusterAssignment, extract_clusters
from .continuation import ContinuationSchedule, PathRecord, SolutionPath, continuation_solve
from .estimators import SurrogateFusionClustering, SurrogateICRegression
from .models import GaussMeansData, LinRegData
from .objective import Mode, PenaltySpec, SurrogateObjective
from .oracle import exhaustive_partition_ic, exhaustive_subset_ic
from .rootfind import DifferentiableTarget, lagrange_step, solve_root
from .smoothers import Family, Smoother

__all__ = [
    "ClusterAssignment",
    "ContinuationSchedule",
    "DifferentiableTarget",
    "Family",
    "GaussMeansData",
    "LinRegData",
    "Mode",
    "PathRecord",
    "PenaltySpec",
    "Smoother",
    "SolutionPath",
    "SurrogateFusionClustering",
    "SurrogateICRegression",
    "SurrogateObjective",
    "continuation_solve",
    "exhaustive_partition_ic",
    "exhaustive_subset_ic",
    "extract_clusters",
    "lagrange_step",
    "solve_root",
]
