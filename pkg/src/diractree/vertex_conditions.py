"""Vertex matching conditions ``A f1 + B f2 = 0`` and the half-line jumps.

At an interior vertex with ``b_k`` outgoing edges there are ``v_k = b_k + 1``
edge ends. ``f1`` collects the upper spinor component at each end, ``f2`` the
lower one with the sign flipped on outgoing edges, so that ``A`` encodes
continuity of the upper component and the last row of ``B`` a Kirchhoff
balance of the lower one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .tree import TreeTruncation

__all__ = [
    "VertexConditionPair",
    "ValidationReport",
    "HalflineMatching",
    "build_vertex_pair",
    "validate",
    "gauge_rotation",
    "gauge_transform",
    "halfline_matching",
    "boundary_vectors",
    "condition_residual",
]

SYMMETRY_ATOL = 1e-12


@dataclass(frozen=True)
class VertexConditionPair:
    A: np.ndarray
    B: np.ndarray

    @property
    def v_k(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class ValidationReport:
    v_k: int
    rank: int
    symmetric: bool
    max_asymmetry: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "v_k": self.v_k,
            "rank": self.rank,
            "symmetric": self.symmetric,
            "max_asymmetry": self.max_asymmetry,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class HalflineMatching:
    """Jump ``psi(t_j+) = J psi(t_j-)`` at a branching radius."""

    factor: int
    J: np.ndarray


def build_vertex_pair(b_k: int) -> VertexConditionPair:
    if b_k < 1:
        raise ValueError(f"b_k must be >= 1, got {b_k}")
    v = b_k + 1
    A = np.zeros((v, v), dtype=np.int64)
    idx = np.arange(v - 1)
    A[idx, idx] = 1
    A[idx, idx + 1] = -1
    B = np.zeros((v, v), dtype=np.int64)
    B[-1, :] = 1
    return VertexConditionPair(A, B)


def validate(pair: VertexConditionPair) -> ValidationReport:
    """Full row rank of ``(A|B)`` and ``A B^T == B A^T``.

    The achievable rank of the ``v_k x 2 v_k`` block is ``v_k``; that is what
    a pass requires.
    """
    A = np.asarray(pair.A)
    B = np.asarray(pair.B)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise ValueError(f"A and B must be square of equal size, got {A.shape} and {B.shape}")
    v = A.shape[0]
    rank = int(np.linalg.matrix_rank(np.hstack([A, B])))
    asym = A @ B.conj().T - B @ A.conj().T
    max_asym = float(np.max(np.abs(asym))) if asym.size else 0.0
    symmetric = max_asym <= SYMMETRY_ATOL
    return ValidationReport(v, rank, symmetric, max_asym, symmetric and rank == v)


def gauge_rotation(thetas: Sequence[float]) -> np.ndarray:
    """Orthogonal ``2v x 2v`` map of ``(f1, f2)`` induced by per-edge ``exp(i theta alpha)``.

    With ``alpha = [[0, -i], [i, 0]]`` the block ``exp(i theta alpha)`` is the
    real rotation ``[[cos, sin], [-sin, cos]]`` acting on ``(f1^s, f2^s)``.
    """
    th = np.asarray(thetas, dtype=float)
    C = np.diag(np.cos(th))
    S = np.diag(np.sin(th))
    return np.block([[C, S], [-S, C]])


def gauge_transform(pair: VertexConditionPair, thetas: Sequence[float]) -> VertexConditionPair:
    """Rewrite the condition in rotated boundary coordinates ``g = R f``.

    ``(A|B) f = 0`` becomes ``(A|B) R^{-1} g = 0``; the returned pair is that
    block split back into its ``f1`` and ``f2`` halves.
    """
    v = pair.v_k
    if len(thetas) != v:
        raise ValueError(f"need {v} angles, got {len(thetas)}")
    R = gauge_rotation(thetas)
    AB = np.hstack([pair.A, pair.B]).astype(float) @ R.T
    return VertexConditionPair(AB[:, :v], AB[:, v:])


def halfline_matching(b_j: int) -> HalflineMatching:
    """``J = diag(sqrt(b), 1/sqrt(b))``: upper component scaled up, lower down."""
    if b_j < 2:
        raise ValueError(f"b_j must be >= 2, got {b_j}")
    s = float(np.sqrt(b_j))
    return HalflineMatching(int(b_j), np.diag([s, 1.0 / s]))


def boundary_vectors(truncation: TreeTruncation, vertex: int,
                     traces: Mapping[int, tuple]) -> tuple:
    """Assemble ``(f1, f2)`` at an interior vertex.

    ``traces[edge_id] = (start, end)`` where ``start`` and ``end`` are the
    spinor values ``(psi1, psi2)`` at the edge's tail and head. Outgoing edges
    contribute their ``start``, the incoming edge its ``end`` (last slot).
    """
    if vertex == truncation.root or truncation.is_leaf(vertex):
        raise ValueError(f"vertex {vertex} is not interior")
    edges = list(truncation.children[vertex])
    incoming = truncation.incoming(vertex)
    missing = [e for e in edges + [incoming] if e not in traces]
    if missing:
        raise KeyError(f"missing traces for edges {missing}")
    f1 = []
    f2 = []
    for e in edges:
        start = traces[e][0]
        f1.append(start[0])
        f2.append(-start[1])
    end = traces[incoming][1]
    f1.append(end[0])
    f2.append(end[1])
    return np.asarray(f1), np.asarray(f2)


def condition_residual(pair: VertexConditionPair, f1, f2) -> np.ndarray:
    return pair.A @ np.asarray(f1) + pair.B @ np.asarray(f2)
