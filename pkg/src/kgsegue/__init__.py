"""Knowledge-graph segues between songs."""

from .kgraph import KnowledgeGraph, TypeRegistry, load_snapshot, save_snapshot
from .pathfind import Path, PathConstraints, find_paths
from .score import DEFAULT_WEIGHTS, ScoredPath, Weights, interestingness
from .segue import Segue, find_best_target, find_segue, load_templates
from .stats import CorpusStats, PairSample, compute_stats

__all__ = [
    "DEFAULT_WEIGHTS",
    "CorpusStats",
    "KnowledgeGraph",
    "PairSample",
    "Path",
    "PathConstraints",
    "ScoredPath",
    "Segue",
    "TypeRegistry",
    "Weights",
    "compute_stats",
    "find_best_target",
    "find_paths",
    "find_segue",
    "interestingness",
    "load_snapshot",
    "load_templates",
    "save_snapshot",
]

__version__ = "0.1.0"
