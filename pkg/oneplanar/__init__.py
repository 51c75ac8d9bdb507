"""Decide 1-planarity of undirected graphs, exactly or through parameterized kernels."""

from oneplanar.core.engine import OnePlanarEngine, emit_report, run
from oneplanar.core.graph import Graph
from oneplanar.core.solver import ConstraintSet, decide
from oneplanar.utils.types import Report, RunConfig, Strategy, Verdict

__all__ = [
    "ConstraintSet",
    "Graph",
    "OnePlanarEngine",
    "Report",
    "RunConfig",
    "Strategy",
    "Verdict",
    "decide",
    "emit_report",
    "run",
]
