"""Dirac operators on regular rooted metric trees.

Geometry lives in :mod:`diractree.tree`, vertex conditions in
:mod:`diractree.vertex_conditions`, the half-line reduction in
:mod:`diractree.halfline` and :mod:`diractree.decomposition`, the
brute-force matrix oracle in :mod:`diractree.discretize`.
"""
from .tree import GeneratingSequences, TailRule, TreeError, new_tree, truncate
from .halfline import HalflineSpec, dispersion, eigenvalues, secular, transfer
from .decomposition import multiplicity, predicted_spectrum, verify_decomposition

__version__ = "0.1.0"

__all__ = [
    "GeneratingSequences",
    "TailRule",
    "TreeError",
    "new_tree",
    "truncate",
    "HalflineSpec",
    "dispersion",
    "eigenvalues",
    "secular",
    "transfer",
    "multiplicity",
    "predicted_spectrum",
    "verify_decomposition",
]
