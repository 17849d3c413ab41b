"""Fully dynamic approximate effective resistances on multigraphs."""

from .dynamic import DynamicSC
from .engine import EngineConfig, ErEngine
from .graph import DynamicMultigraph, read_graph, write_graph
from .numerics import (
    SolveOptions,
    WeightedGraphView,
    assemble,
    effective_resistance,
    pinv_dense,
    sparsify_by_leverage,
)
from .schur import TerminalSet, exact_schur, sample_schur_sketch

__all__ = [
    "DynamicMultigraph",
    "DynamicSC",
    "EngineConfig",
    "ErEngine",
    "SolveOptions",
    "TerminalSet",
    "WeightedGraphView",
    "assemble",
    "effective_resistance",
    "exact_schur",
    "pinv_dense",
    "read_graph",
    "sample_schur_sketch",
    "sparsify_by_leverage",
    "write_graph",
]

__version__ = "0.1.0"
