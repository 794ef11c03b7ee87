"""Exact computation of generalized correction terms d(Y, s, V) and d*(Y, s, V)."""
from .catalog import build_example_hyp, build_s1s2, build_trefoil_surgery
from .dinv import DValue, d_bot, d_invariant, d_star, d_table, d_top
from .functors import Subspace
from .hfmodel import HFModel, change_h1_basis, connected_sum, reverse_orientation, validate

__all__ = [
    "DValue", "HFModel", "Subspace",
    "build_example_hyp", "build_s1s2", "build_trefoil_surgery",
    "change_h1_basis", "connected_sum", "d_bot", "d_invariant", "d_star", "d_table", "d_top",
    "reverse_orientation", "validate",
]
__version__ = "0.1.0"
