"""Weighted half-line Dirac operators ``M_k`` and their truncated spectra.

On each interval the eigenvalue equation ``M psi = lam psi`` is the linear
system ``psi' = G(lam) psi`` with a trace-free ``G``, so the propagator over an
interval is a closed-form 2x2 exponential. At a branching radius ``t_j`` the
spinor jumps by ``diag(sqrt(b_j), 1/sqrt(b_j))``. The truncated operator has
``psi_1 = 0`` at both ends, and its eigenvalues are the zeros of the terminal
upper component.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .tree import GeneratingSequences, TreeError

__all__ = [
    "HalflineSpec",
    "coefficient_matrix",
    "transfer",
    "secular",
    "eigenvalues",
    "dispersion",
]


@dataclass(frozen=True)
class HalflineSpec:
    """One truncated operator ``M_k`` on ``(start, terminal)``."""

    k: int
    c: float
    start: float
    breakpoints: tuple
    factors: tuple
    terminal: float

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(x) for x in self.breakpoints))
        object.__setattr__(self, "factors", tuple(int(x) for x in self.factors))
        if not self.c > 0:
            raise ValueError("c must be > 0")
        if len(self.breakpoints) != len(self.factors):
            raise ValueError("one factor per breakpoint")
        pts = (self.start,) + self.breakpoints + (self.terminal,)
        if any(not b > a for a, b in zip(pts, pts[1:])):
            raise ValueError(f"breakpoints must increase strictly inside (start, terminal): {pts}")
        if any(f < 1 for f in self.factors):
            raise ValueError("factors must be >= 1")

    @classmethod
    def from_tree(cls, tree: GeneratingSequences, k: int, depth: int, c: float) -> "HalflineSpec":
        """``M_k`` on ``(t_k, t_N)`` with jumps ``b_j`` at ``t_j``, ``k < j < N``."""
        tree.check_depth(depth)
        if not 0 <= k < depth:
            raise TreeError(f"need 0 <= k < depth, got k={k}, depth={depth}")
        t = tree.radii(depth)
        return cls(
            k=k,
            c=float(c),
            start=t[k],
            breakpoints=tuple(t[k + 1:depth]),
            factors=tuple(tree.branching(j) for j in range(k + 1, depth)),
            terminal=t[depth],
        )

    @property
    def lengths(self) -> list:
        pts = (self.start,) + self.breakpoints + (self.terminal,)
        return [b - a for a, b in zip(pts, pts[1:])]

    def weights(self) -> list:
        """Relative branching function on each interval (1 on the first)."""
        g = [1]
        for f in self.factors:
            g.append(g[-1] * f)
        return g


def coefficient_matrix(lam: float, c: float) -> np.ndarray:
    """``G(lam)`` with ``psi' = G psi`` equivalent to ``M psi = lam psi``."""
    c2 = c * c
    return np.array([[0.0, (lam + c2) / c], [-(lam - c2) / c, 0.0]])


def transfer(lam, c: float, length: float) -> np.ndarray:
    """``exp(G(lam) * length)``; vectorized over ``lam`` (trailing axes 2x2).

    ``G^2 = -w2 I`` with ``w2 = (lam^2 - c^4)/c^2``, so the exponential is
    ``C I + S G`` where ``C``, ``S`` are cos/sin (``w2 > 0``), cosh/sinh
    (``w2 < 0``) or the polynomial ``1``, ``length`` (``w2 == 0``).
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    lam = np.asarray(lam, dtype=float)
    c2 = c * c
    a = (lam + c2) / c
    b = (lam - c2) / c
    w2 = a * b
    w = np.sqrt(np.abs(w2))
    x = w * length
    C = np.ones_like(lam)
    S = np.full_like(lam, float(length))
    osc = w2 > 0
    hyp = w2 < 0
    C = np.where(osc, np.cos(x), C)
    # sinc keeps sin(x)/w well-defined as w -> 0
    S = np.where(osc, length * np.sinc(x / np.pi), S)
    xh = np.where(hyp, x, 0.0)
    C = np.where(hyp, np.cosh(xh), C)
    with np.errstate(invalid="ignore", divide="ignore"):
        sh = np.where(xh > 1e-8, np.sinh(xh) / np.where(w > 0, w, 1.0), length * (1.0 + xh * xh / 6.0))
    S = np.where(hyp, sh, S)
    out = np.empty(lam.shape + (2, 2))
    out[..., 0, 0] = C
    out[..., 0, 1] = a * S
    out[..., 1, 0] = -b * S
    out[..., 1, 1] = C
    return out


def _propagate(spec: HalflineSpec, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    psi = np.zeros(lam.shape + (2,))
    psi[..., 1] = 1.0
    lengths = spec.lengths
    for i, L in enumerate(lengths):
        T = transfer(lam, spec.c, L)
        psi = np.einsum("...ij,...j->...i", T, psi)
        if i < len(spec.factors):
            s = np.sqrt(spec.factors[i])
            psi[..., 0] *= s
            psi[..., 1] /= s
    return psi


def secular(spec: HalflineSpec, lam):
    """Terminal upper component ``psi_1(T)`` for ``psi(start) = (0, 1)``."""
    out = _propagate(spec, lam)[..., 0]
    return float(out) if np.ndim(out) == 0 else out


def _roots_on_grid(spec: HalflineSpec, grid: np.ndarray, tol: float) -> list:
    f = secular(spec, grid)
    roots = list(grid[f == 0.0])
    sign = np.sign(f)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    for i in idx:
        roots.append(brentq(lambda x: secular(spec, x), grid[i], grid[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps))
    return roots


def _dedupe(values: list, tol: float) -> list:
    out = []
    for v in sorted(values):
        if out and v - out[-1] <= tol:
            continue
        out.append(v)
    return out


def eigenvalues(spec: HalflineSpec, window: Sequence[float], scan_step: Optional[float] = None,
                tol: float = 1e-12, max_halvings: int = 6) -> list:
    """Sorted eigenvalues of the truncated ``M_k`` inside ``window``.

    Sign changes of :func:`secular` are bracketed on a uniform grid and
    refined to width ``tol``. The grid is halved until the root count
    repeats. ``-c^2``, where the upper component stays identically zero, is
    detected directly rather than as a sign change.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    step = (hi - lo) / 2000 if scan_step is None else float(scan_step)
    if step <= 0:
        raise ValueError("scan_step must be > 0")

    prev = None
    for _ in range(max_halvings + 1):
        n = max(int(np.ceil((hi - lo) / step)), 1)
        grid = np.linspace(lo, hi, n + 1)
        roots = _dedupe(_roots_on_grid(spec, grid, tol), tol)
        if prev is not None and len(roots) == len(prev):
            break
        prev = roots
        step /= 2
    roots = [r for r in roots if lo <= r <= hi]

    rest = -spec.c ** 2
    if lo <= rest <= hi and secular(spec, rest) == 0.0:
        roots = [r for r in roots if abs(r - rest) > max(tol, 1e-9)] + [rest]
    return sorted(roots)


def dispersion(k_momentum, c: float):
    """Relativistic energy ``sqrt(c^2 k^2 + c^4)``."""
    return np.sqrt(c * c * np.square(k_momentum) + c ** 4)
