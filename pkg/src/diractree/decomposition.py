"""Symmetry reduction of the tree operator into weighted half-line operators.

Every vertex ``v`` of generation ``k >= 1`` splits the functions supported
on ``T_v`` into ``b_k`` sibling-Fourier channels. The symmetric channel
joins the parent, and each of the ``b_k - 1`` twisted channels is a copy of
``M_k``. Counting vertices gives the multiplicity
``r_k = b_0...b_{k-1} (b_k - 1)`` of ``M_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import discretize, halfline
from .tree import GeneratingSequences, TreeError, branching_function, truncate

__all__ = [
    "SpectralEntry",
    "SpectralResult",
    "DecompositionReport",
    "multiplicity",
    "multiplicity_table",
    "sibling_dft",
    "predicted_spectrum",
    "match_multisets",
    "verify_decomposition",
    "SymmetrizationResult",
    "symmetrization_isometry",
]


def multiplicity(tree: GeneratingSequences, k: int) -> int:
    """Number of copies of ``M_k``; ``M_0`` occurs once."""
    if k < 0:
        raise TreeError(f"k must be >= 0, got {k}")
    if k == 0:
        return 1
    return tree.product(k - 1) * (tree.branching(k) - 1)


def multiplicity_table(tree: GeneratingSequences, depth: int) -> dict:
    return {k: multiplicity(tree, k) for k in range(depth)}


def sibling_dft(b_k: int) -> np.ndarray:
    """``U[j, s] = exp(2 pi i (j-1) s / b) / sqrt(b)`` for ``j, s = 1..b``.

    Column ``s = b`` is the constant (symmetric) channel.
    """
    if b_k < 2:
        raise ValueError(f"b_k must be >= 2, got {b_k}")
    j = np.arange(b_k)[:, None]
    s = np.arange(1, b_k + 1)[None, :]
    return np.exp(2j * np.pi * j * s / b_k) / np.sqrt(b_k)


@dataclass(frozen=True)
class SpectralEntry:
    eigenvalue: float
    multiplicity: int
    source: str
    residual: float


@dataclass
class SpectralResult:
    entries: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.entries = sorted(self.entries, key=lambda e: (e.eigenvalue, e.source))

    def values(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity."""
        return np.array([e.eigenvalue for e in self.entries for _ in range(e.multiplicity)])

    def sources(self) -> list:
        return [e.source for e in self.entries for _ in range(e.multiplicity)]

    def count(self) -> int:
        return sum(e.multiplicity for e in self.entries)


def predicted_spectrum(tree: GeneratingSequences, c: float, depth: int, window: Sequence[float],
                       scan_step: Optional[float] = None, tol: float = 1e-12,
                       positive_only: bool = False) -> SpectralResult:
    """Union of ``M_k`` spectra (``k < depth``) weighted by ``r_k``.

    All operators share the wall at ``t_depth``. With ``positive_only`` the
    window is clipped from below at ``c^2 - tol`` (spectrum of the positive part).
    """
    lo, hi = float(window[0]), float(window[1])
    if positive_only:
        lo = max(lo, c * c - tol)
    if depth < 1:
        raise TreeError("depth must be >= 1")
    entries = []
    for k in range(depth):
        spec = halfline.HalflineSpec.from_tree(tree, k, depth, c)
        r = multiplicity(tree, k)
        for lam in halfline.eigenvalues(spec, (lo, hi), scan_step, tol):
            entries.append(SpectralEntry(lam, r, f"M_{k}", abs(halfline.secular(spec, lam))))
    meta = {"c": c, "depth": depth, "window": [lo, hi], "tol": tol,
            "multiplicities": multiplicity_table(tree, depth)}
    return SpectralResult(entries, meta)


@dataclass
class DecompositionReport:
    passed: bool
    tol_match: float
    pairs: list
    unmatched_full: list
    unmatched_predicted: list
    max_distance: float
    full_count: int
    predicted_count: int
    calibrated_error: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "tol_match": self.tol_match,
            "calibrated_error": self.calibrated_error,
            "max_distance": self.max_distance,
            "full_count": self.full_count,
            "predicted_count": self.predicted_count,
            "pairs": self.pairs,
            "unmatched_full": self.unmatched_full,
            "unmatched_predicted": self.unmatched_predicted,
        }


def match_multisets(a: Sequence[float], b: Sequence[float], tol: float) -> tuple:
    """Pair sorted ``a`` and ``b`` greedily; returns ``(pairs, rest_a, rest_b)``.

    ``pairs`` holds index pairs into the sorted inputs. In one dimension the
    sorted sweep finds a perfect matching whenever one exists.
    """
    ia = np.argsort(a, kind="stable")
    ib = np.argsort(b, kind="stable")
    i = j = 0
    pairs, rest_a, rest_b = [], [], []
    while i < len(ia) and j < len(ib):
        x, y = a[ia[i]], b[ib[j]]
        if abs(x - y) <= tol:
            pairs.append((ia[i], ib[j]))
            i += 1
            j += 1
        elif x < y:
            rest_a.append(ia[i])
            i += 1
        else:
            rest_b.append(ib[j])
            j += 1
    rest_a.extend(ia[i:])
    rest_b.extend(ib[j:])
    return pairs, list(rest_a), list(rest_b)


def verify_decomposition(tree: GeneratingSequences, c: float, depth: int, h: float,
                         window: Sequence[float], tol_match: Optional[float] = None,
                         scan_step: Optional[float] = None, tol: float = 1e-12,
                         cap: int = discretize.DEFAULT_CAP) -> DecompositionReport:
    """Compare the discrete full-tree spectrum with the multiplicity-weighted union.

    ``tol_match`` defaults to five times the single-interval discretization
    error at the same ``h`` on an interval of length ``t_depth``. Both sides
    are collected on the window widened by ``tol_match``; leftovers outside
    the nominal window are edge effects and do not count against the match.
    """
    lo, hi = float(window[0]), float(window[1])
    radius = tree.radius(depth)
    calibrated = discretize.calibrate_error(c, h, radius, (lo, hi))
    if tol_match is None:
        tol_match = 5.0 * calibrated
    op = discretize.assemble_tree_operator(truncate(tree, depth), c, h)
    full = discretize.spectrum_in_window(op, lo - tol_match, hi + tol_match, cap)
    pred = predicted_spectrum(tree, c, depth, (lo - tol_match, hi + tol_match), scan_step, tol)
    pv = pred.values()
    ps = pred.sources()

    pairs, rest_f, rest_p = match_multisets(full, pv, tol_match)
    inside = lambda x: lo <= x <= hi  # noqa: E731
    unmatched_full = [float(full[i]) for i in rest_f if inside(full[i])]
    unmatched_pred = [{"eigenvalue": float(pv[i]), "source": ps[i]} for i in rest_p if inside(pv[i])]
    table = []
    for i, j in pairs:
        if inside(full[i]) or inside(pv[j]):
            table.append({"full": float(full[i]), "predicted": float(pv[j]), "source": ps[j],
                          "distance": float(abs(full[i] - pv[j]))})
    table.sort(key=lambda p: (p["predicted"], p["source"], p["full"]))
    max_d = max((p["distance"] for p in table), default=0.0)
    return DecompositionReport(
        passed=not unmatched_full and not unmatched_pred,
        tol_match=float(tol_match),
        pairs=table,
        unmatched_full=sorted(unmatched_full),
        unmatched_predicted=sorted(unmatched_pred, key=lambda d: (d["eigenvalue"], d["source"])),
        max_distance=float(max_d),
        full_count=int(sum(1 for x in full if inside(x))),
        predicted_count=int(sum(1 for x in pv if inside(x))),
        calibrated_error=calibrated,
    )


@dataclass
class SymmetrizationResult:
    """Lifted tree function, half-line spinor and the two squared norms."""

    f_edges: dict
    psi: np.ndarray
    psi_nodes: np.ndarray
    tree_norm_sq: float
    halfline_norm_sq: float

    @property
    def discrepancy(self) -> float:
        scale = max(self.tree_norm_sq, self.halfline_norm_sq, 1e-300)
        return abs(self.tree_norm_sq - self.halfline_norm_sq) / scale


def symmetrization_isometry(tree: GeneratingSequences, depth: int,
                            phi: Callable[[np.ndarray], np.ndarray],
                            order: int = 24) -> SymmetrizationResult:
    """Check ``||f||_tree == ||sqrt(g) phi||_{[0, t_N]}`` for a radial spinor ``phi``.

    ``phi(t)`` maps radii of shape ``(n,)`` to values of shape ``(2, n)``.
    The tree side integrates ``phi(|x|)`` edge by edge over the explicit
    truncation. The half-line side samples ``sqrt(g) phi`` with ``g`` from
    :func:`branching_function`. Gauss-Legendre rules of ``order`` points per
    interval integrate polynomial inputs exactly.
    """
    trunc = truncate(tree, depth)
    x, wq = np.polynomial.legendre.leggauss(order)
    radii = tree.radii(depth)

    f_edges = {}
    tree_parts = []
    for e in trunc.edges:
        a = radii[e.generation]
        s = a + 0.5 * e.length * (x + 1.0)
        vals = np.asarray(phi(s), dtype=complex)
        f_edges[e.id] = vals
        tree_parts.append(0.5 * e.length * float(np.sum(wq * np.sum(np.abs(vals) ** 2, axis=0))))

    nodes = []
    psi = []
    half_parts = []
    for n in range(depth):
        a, b = radii[n], radii[n + 1]
        s = a + 0.5 * (b - a) * (x + 1.0)
        g = np.array([branching_function(tree, si) for si in s], dtype=float)
        vals = np.sqrt(g) * np.asarray(phi(s), dtype=complex)
        nodes.append(s)
        psi.append(vals)
        half_parts.append(0.5 * (b - a) * float(np.sum(wq * np.sum(np.abs(vals) ** 2, axis=0))))

    return SymmetrizationResult(
        f_edges=f_edges,
        psi=np.concatenate(psi, axis=1),
        psi_nodes=np.concatenate(nodes),
        tree_norm_sq=float(np.sum(tree_parts)),
        halfline_norm_sq=float(np.sum(half_parts)),
    )
