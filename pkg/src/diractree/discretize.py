"""Staggered-grid Dirac matrices on truncated trees and on weighted half-lines.

The upper component lives on cell nodes and the lower on cell midpoints, so
the first-order coupling is a one-sided difference in each direction and no
doubled modes appear. Vertex conditions are built in by sharing one upper
node between all edges at a vertex; the lower-component balance at that
node then is the discrete Kirchhoff row. Dirichlet ends (root, leaves, wall)
simply drop their upper node.

In the weighted inner product the operator is ``W^{-1} K`` with ``K``
symmetric. Everything returned here is the congruent Hermitian matrix
``W^{-1/2} K W^{-1/2}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .halfline import HalflineSpec, dispersion
from .tree import TreeTruncation

__all__ = [
    "DimensionCapError",
    "DiscreteOperator",
    "EigenDecomposition",
    "assemble_tree_operator",
    "assemble_halfline_operator",
    "assemble_interval_operator",
    "eigen_solve",
    "positive_part",
    "residual_norm",
    "spectrum_in_window",
    "calibrate_error",
]

DEFAULT_CAP = 6000


class DimensionCapError(RuntimeError):
    pass


@dataclass
class DiscreteOperator:
    matrix: np.ndarray
    weights: np.ndarray
    cells: list = field(default_factory=list)
    spacing: list = field(default_factory=list)
    # per unknown: 1 (upper, node) or 2 (lower, midpoint)
    component: Optional[np.ndarray] = None
    # per unknown: host edge (-1 for shared vertex nodes) and position along it
    edge: Optional[np.ndarray] = None
    position: Optional[np.ndarray] = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0, atol=atol))


@dataclass
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _cells(length: float, h: float) -> int:
    return max(int(round(length / h)), 1)


def _assemble(n_vertices: int, dirichlet: set, edges: Sequence[tuple], c: float) -> DiscreteOperator:
    """Core builder. ``edges`` holds ``(tail, head, length, n_cells, weight)``."""
    c2 = c * c
    vnode = {}
    w1 = []
    comp = []
    host = []
    pos = []
    for v in range(n_vertices):
        if v not in dirichlet:
            vnode[v] = len(w1)
            w1.append(0.0)
            host.append(-1)
            pos.append(0.0)
    interior = []
    for e, (tail, head, length, n, g) in enumerate(edges):
        h = length / n
        for v in (tail, head):
            if v in vnode:
                w1[vnode[v]] += 0.5 * g * h
        idx = []
        for i in range(1, n):
            idx.append(len(w1))
            w1.append(g * h)
            host.append(e)
            pos.append(i * h)
        interior.append(idx)
    n1 = len(w1)
    w2 = []
    rows = []
    cols = []
    vals = []
    for e, (tail, head, length, n, g) in enumerate(edges):
        h = length / n
        nodes = [vnode.get(tail)] + interior[e] + [vnode.get(head)]
        for i in range(n):
            m = n1 + len(w2)
            w2.append(g * h)
            host.append(e)
            pos.append((i + 0.5) * h)
            left, right = nodes[i], nodes[i + 1]
            if left is not None:
                rows.append(left); cols.append(m); vals.append(-c * g)
            if right is not None:
                rows.append(right); cols.append(m); vals.append(c * g)
    weights = np.array(w1 + w2)
    dim = weights.size
    H = np.zeros((dim, dim))
    H[np.arange(n1), np.arange(n1)] = c2
    H[np.arange(n1, dim), np.arange(n1, dim)] = -c2
    r = np.array(rows, dtype=int)
    q = np.array(cols, dtype=int)
    scaled = np.array(vals) / np.sqrt(weights[r] * weights[q])
    # (r, q) pairs are unique, so plain assignment is exact
    H[r, q] = scaled
    H[q, r] = scaled
    comp = np.array([1] * n1 + [2] * (dim - n1))
    return DiscreteOperator(
        matrix=H,
        weights=weights,
        cells=[e[3] for e in edges],
        spacing=[e[2] / e[3] for e in edges],
        component=comp,
        edge=np.array(host),
        position=np.array(pos),
    )


def _check_h(lengths: Sequence[float], h: float) -> None:
    if not h > 0:
        raise ValueError("h must be > 0")
    if h > 0.5 * min(lengths):
        raise ValueError(f"h={h} exceeds half the shortest edge ({min(lengths)})")


def assemble_tree_operator(truncation: TreeTruncation, c: float, h: float) -> DiscreteOperator:
    """Dirac matrix on the whole truncated tree; root and leaves carry ``psi_1 = 0``."""
    _check_h([e.length for e in truncation.edges], h)
    dirichlet = {v.id for v in truncation.vertices if v.id == truncation.root or truncation.is_leaf(v.id)}
    edges = [(e.tail, e.head, e.length, _cells(e.length, h), 1.0) for e in truncation.edges]
    return _assemble(len(truncation.vertices), dirichlet, edges, c)


def assemble_halfline_operator(spec: HalflineSpec, h: float) -> DiscreteOperator:
    """Dirac matrix of a truncated ``M_k``.

    Each interval carries the relative branching weight ``g``; the jump
    ``diag(sqrt(b), 1/sqrt(b))`` then appears through the weighted couplings
    at the shared breakpoint node.
    """
    lengths = spec.lengths
    _check_h(lengths, h)
    g = spec.weights()
    m = len(lengths)
    edges = [(i, i + 1, L, _cells(L, h), float(g[i])) for i, L in enumerate(lengths)]
    return _assemble(m + 1, {0, m}, edges, spec.c)


def assemble_interval_operator(length: float, c: float, h: float) -> DiscreteOperator:
    """Single interval with ``psi_1 = 0`` at both ends."""
    return assemble_halfline_operator(HalflineSpec(0, c, 0.0, (), (), length), h)


def eigen_solve(op: DiscreteOperator, cap: int = DEFAULT_CAP) -> EigenDecomposition:
    if op.dimension > cap:
        raise DimensionCapError(f"dimension {op.dimension} exceeds cap {cap}")
    w, V = scipy.linalg.eigh(op.matrix)
    return EigenDecomposition(w, V)


def spectrum_in_window(op: DiscreteOperator, lo: float, hi: float, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Eigenvalues in ``(lo, hi]`` without forming eigenvectors."""
    if op.dimension > cap:
        raise DimensionCapError(f"dimension {op.dimension} exceeds cap {cap}")
    return scipy.linalg.eigh(op.matrix, eigvals_only=True, subset_by_value=(lo, hi))


def positive_part(decomp: EigenDecomposition) -> DiscreteOperator:
    """``V max(Lambda, 0) V*`` as a new operator."""
    lam = np.where(decomp.eigenvalues > 0, decomp.eigenvalues, 0.0)
    V = decomp.eigenvectors
    M = (V * lam) @ V.conj().T
    M = 0.5 * (M + M.conj().T)
    return DiscreteOperator(matrix=M, weights=np.ones(M.shape[0]))


def residual_norm(op: DiscreteOperator, vector, lam: float) -> float:
    v = np.asarray(vector)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("zero vector")
    return float(np.linalg.norm(op.matrix @ v - lam * v) / nv)


def calibrate_error(c: float, h: float, length: float, window: Sequence[float]) -> float:
    """Largest single-interval eigenvalue error at spacing ``h`` inside ``window``.

    Discrete and exact eigenvalues are paired by mode number. If no exact
    eigenvalue falls in the window, the lowest positive mode is used.
    """
    lo, hi = window
    op = assemble_interval_operator(length, c, h)
    w = np.linalg.eigvalsh(op.matrix)
    rest = -c * c
    pos = np.sort(w[w > rest + 0.5 * c * c])
    neg = np.sort(w[w < rest - 1e-9 * c * c])[::-1]
    n = np.arange(1, pos.size + 1)
    exact = dispersion(n * np.pi / length, c)
    errs = [abs(d - x) for d, x in zip(pos, exact) if lo <= x <= hi]
    errs += [abs(d + x) for d, x in zip(neg, exact) if lo <= -x <= hi]
    if not errs:
        errs = [abs(pos[0] - exact[0])]
    return float(max(errs))
