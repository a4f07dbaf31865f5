"""Weyl quasi-modes on long edges and the lower edge of the positive spectrum.

The quasi-mode on an edge of length scale ``l`` is
``f(t) = l^{-1/2} exp(i r t) eta(t / l)`` with ``eta`` a smooth bump on
``[1, 2]``. Its norm does not depend on ``l`` while its residual for the
target energy decays like ``1/l``. The host interval is ``(0, 3l)``, so the
support ``[l, 2l]`` stays strictly inside it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from . import discretize
from .fw_transform import FourierGrid, apply_dirac, phi_map
from .halfline import dispersion
from .tree import GeneratingSequences, TreeError, truncate

__all__ = [
    "UnderResolvedError",
    "bump_profile",
    "bump_derivatives",
    "QuasiMode",
    "quasi_mode",
    "weyl_residual_laplacian",
    "weyl_residual_dirac",
    "EdgeProbeReport",
    "spectral_edge_probe",
]


class UnderResolvedError(ValueError):
    pass


def bump_profile(x):
    """``exp(-1/((x-1)(2-x)))`` on ``(1, 2)``, zero elsewhere."""
    x = np.asarray(x, dtype=float)
    p = (x - 1.0) * (2.0 - x)
    inside = p > 0
    out = np.zeros_like(x)
    out[inside] = np.exp(-1.0 / p[inside])
    return out if out.ndim else float(out)


def bump_derivatives(x) -> tuple:
    """``(eta, eta', eta'')`` in closed form."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = (x - 1.0) * (2.0 - x)
    inside = p > 0
    e0 = np.zeros_like(x)
    e1 = np.zeros_like(x)
    e2 = np.zeros_like(x)
    pi = p[inside]
    dp = 3.0 - 2.0 * x[inside]
    e = np.exp(-1.0 / pi)
    e0[inside] = e
    e1[inside] = e * dp / pi**2
    # d2/dx2 exp(-1/p) with p'' = -2
    e2[inside] = e * (dp**2 / pi**4 - 2.0 / pi**2 - 2.0 * dp**2 / pi**3)
    return e0, e1, e2


@dataclass(frozen=True)
class QuasiMode:
    m: int
    r: float
    edge_length: float
    t: np.ndarray
    values: np.ndarray

    @property
    def support_ok(self) -> bool:
        """Support strictly inside the host interval ``(0, 3l)``."""
        nz = self.t[np.abs(self.values) > 0]
        return bool(nz.size == 0 or (nz.min() > 0 and nz.max() < 3 * self.edge_length))

    def norm(self) -> float:
        return float(np.sqrt(simpson(np.abs(self.values) ** 2, x=self.t)))


def _quadrature_nodes(l: float, r: float, n: Optional[int]) -> int:
    if n is None:
        per_period = 16 * r * l / (2 * np.pi) if r > 0 else 0
        n = int(max(4001, np.ceil(per_period) + 1, np.ceil(2 * r * l) + 1))
    if n % 2 == 0:
        n += 1
    return n


def quasi_mode(m: int, r: float, n: Optional[int] = None, edge_length: Optional[float] = None) -> QuasiMode:
    l = float(2.0**m if edge_length is None else edge_length)
    n = _quadrature_nodes(l, r, n)
    t = np.linspace(l, 2 * l, n)
    if r * (t[1] - t[0]) > 0.5:
        raise UnderResolvedError(f"r * dt = {r * (t[1] - t[0]):.3g} > 0.5; increase n")
    vals = np.exp(1j * r * t) * bump_profile(t / l) / np.sqrt(l)
    return QuasiMode(m, r, l, t, vals)


def weyl_residual_laplacian(m: int, r: float, n: Optional[int] = None,
                            edge_length: Optional[float] = None) -> float:
    """``||(-d^2/dt^2 - r^2) f_m|| / ||f_m||`` by composite Simpson on ``[l, 2l]``."""
    if r < 0:
        raise ValueError("r must be >= 0")
    mode = quasi_mode(m, r, n, edge_length)
    l = mode.edge_length
    s = mode.t / l
    _, e1, e2 = bump_derivatives(s)
    # -f'' - r^2 f with the e^{irt} factor pulled out
    Lf = -np.exp(1j * r * mode.t) * (2j * r * e1 / l + e2 / l**2) / np.sqrt(l)
    num = simpson(np.abs(Lf) ** 2, x=mode.t)
    den = simpson(np.abs(mode.values) ** 2, x=mode.t)
    return float(np.sqrt(num / den))


def _dirac_grid(l: float, r: float, n: Optional[int]) -> FourierGrid:
    period = 3.0 * l
    if n is None:
        need = max(16 * r * period / (2 * np.pi), 2 * r * period, 3 * 256)
        n = int(2 ** np.ceil(np.log2(need)))
    grid = FourierGrid(n, period)
    if r * grid.spacing > 0.5 or grid.n < 3 * 64:
        raise UnderResolvedError(f"grid of {grid.n} points too coarse for r={r}, l={l}")
    return grid


def weyl_residual_dirac(m: int, r: float, c: float, n: Optional[int] = None,
                        edge_length: Optional[float] = None) -> dict:
    """Residual of the spinor quasi-mode ``Phi f_m`` at energy ``E_c(r)``.

    The host interval ``(0, 3l)`` is closed into a circle and the Dirac
    operator is applied through its exact Fourier symbol.
    """
    l = float(2.0**m if edge_length is None else edge_length)
    grid = _dirac_grid(l, r, n)
    t = grid.points
    f = np.exp(1j * r * t) * bump_profile(t / l) / np.sqrt(l)
    outside = (t < l) | (t > 2 * l)
    leak = float(np.sum(np.abs(f[outside]) ** 2) * grid.spacing)
    psi = phi_map(f, c, grid)
    target = float(dispersion(r, c))
    res = apply_dirac(psi, c, grid) - target * psi
    return {
        "m": m,
        "edge_length": l,
        "residual": float(np.linalg.norm(res) / np.linalg.norm(psi)),
        "target_energy": target,
        "support_leak": leak,
        "grid_points": grid.n,
    }


@dataclass
class EdgeProbeReport:
    c: float
    h: float
    depths: list
    min_positive: list
    gaps: list
    calibrated_error: float
    lower_bound_ok: bool
    monotone: bool

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "h": self.h,
            "depths": self.depths,
            "min_positive": self.min_positive,
            "gaps": self.gaps,
            "calibrated_error": self.calibrated_error,
            "lower_bound_ok": self.lower_bound_ok,
            "monotone": self.monotone,
        }


def spectral_edge_probe(tree: GeneratingSequences, c: float, depths: Sequence[int], h: float = 0.25,
                        cap: int = discretize.DEFAULT_CAP) -> EdgeProbeReport:
    """Smallest positive eigenvalue of the discrete positive part per depth."""
    if tree.tail is None or not tree.tail.unbounded_edges:
        raise TreeError("edge-length supremum must be infinite (geometric tail with q > 1)")
    c2 = c * c
    mins = []
    worst = np.inf
    for N in depths:
        op = discretize.assemble_tree_operator(truncate(tree, N), c, h)
        dec = discretize.eigen_solve(op, cap)
        bplus = np.where(dec.eigenvalues > 0, dec.eigenvalues, 0.0)
        nonzero = bplus[bplus > 0]
        mins.append(float(nonzero.min()))
        worst = min(worst, float(nonzero.min()))
    err = discretize.calibrate_error(c, h, tree.radius(max(depths)), (c2, 4 * c2))
    gaps = [x - c2 for x in mins]
    return EdgeProbeReport(
        c=float(c),
        h=float(h),
        depths=list(depths),
        min_positive=mins,
        gaps=gaps,
        calibrated_error=err,
        lower_bound_ok=bool(worst >= c2 - 5 * err),
        monotone=bool(all(b < a for a, b in zip(gaps, gaps[1:]))),
    )
