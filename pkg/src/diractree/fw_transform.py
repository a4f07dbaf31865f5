"""Fourier-symbol calculus for the free Dirac operator on a periodic grid.

Per momentum ``p`` the operator acts as ``[[c^2, c p], [c p, -c^2]]``. Its
positive eigenvector ``(w1, w2)`` has eigenvalue ``E_c(p)``, and the map
``u -> (w1(p) u_hat, w2(p) u_hat)`` embeds scalar functions isometrically
into the positive spectral subspace.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FourierGrid",
    "SymbolTriple",
    "symbols",
    "phi_map",
    "apply_dirac",
    "mode_eigen_check",
    "FormIdentityReport",
    "verify_form_identity",
]


@dataclass(frozen=True)
class FourierGrid:
    n: int
    length: float

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise ValueError(f"n must be a positive even integer, got {self.n}")
        if not self.length > 0:
            raise ValueError("length must be > 0")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing

    @property
    def momenta(self) -> np.ndarray:
        """Lattice momenta in FFT order (``j = 0..n/2-1, -n/2..-1``)."""
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)

    def forward(self, u: np.ndarray) -> np.ndarray:
        return np.fft.fft(u, norm="ortho")

    def inverse(self, u_hat: np.ndarray) -> np.ndarray:
        return np.fft.ifft(u_hat, norm="ortho")

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """``(f, g)`` with the grid measure; spinors carry a leading axis of 2."""
        return complex(np.vdot(f, g) * self.spacing)


@dataclass(frozen=True)
class SymbolTriple:
    p: np.ndarray
    E: np.ndarray
    N: np.ndarray
    w1: np.ndarray
    w2: np.ndarray


def symbols(p, c: float) -> SymbolTriple:
    if not c > 0:
        raise ValueError("c must be > 0")
    p = np.asarray(p, dtype=float)
    c2 = c * c
    E = np.sqrt(c2 * p * p + c2 * c2)
    N = np.sqrt(2 * E * (E + c2))
    return SymbolTriple(p, E, N, (E + c2) / N, c * p / N)


def phi_map(u: np.ndarray, c: float, grid: FourierGrid) -> np.ndarray:
    """Spinor ``(2, n)`` whose Fourier modes are ``(w1, w2) * u_hat``."""
    u_hat = grid.forward(np.asarray(u, dtype=complex))
    s = symbols(grid.momenta, c)
    return np.stack([grid.inverse(s.w1 * u_hat), grid.inverse(s.w2 * u_hat)])


def apply_dirac(psi: np.ndarray, c: float, grid: FourierGrid) -> np.ndarray:
    """Exact-symbol Dirac operator on a spinor ``(2, n)``."""
    a = grid.forward(psi[0])
    b = grid.forward(psi[1])
    p = grid.momenta
    c2 = c * c
    return np.stack([grid.inverse(c2 * a + c * p * b), grid.inverse(c * p * a - c2 * b)])


def apply_energy(u: np.ndarray, c: float, grid: FourierGrid) -> np.ndarray:
    """``E_c(p) u``."""
    return grid.inverse(symbols(grid.momenta, c).E * grid.forward(u))


def mode_eigen_check(c: float, grid: FourierGrid) -> float:
    """Max over lattice momenta of ``|D(p) w - E(p) w|`` (unit vectors ``w``)."""
    s = symbols(grid.momenta, c)
    c2 = c * c
    r1 = c2 * s.w1 + c * s.p * s.w2 - s.E * s.w1
    r2 = c * s.p * s.w1 - c2 * s.w2 - s.E * s.w2
    return float(np.max(np.hypot(r1, r2) / s.E))


@dataclass(frozen=True)
class FormIdentityReport:
    c: float
    norm_u: float
    norm_phi_u: float
    norm_error: float
    form_dirac: float
    form_energy: float
    form_error: float
    mode_error: float
    positive: bool

    @property
    def passed(self) -> bool:
        return self.norm_error <= 1e-12 and self.form_error <= 1e-12 and self.mode_error <= 1e-12 and self.positive

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "norm_u": self.norm_u,
            "norm_phi_u": self.norm_phi_u,
            "norm_error": self.norm_error,
            "form_dirac": self.form_dirac,
            "form_energy": self.form_energy,
            "form_error": self.form_error,
            "mode_error": self.mode_error,
            "positive": self.positive,
            "pass": self.passed,
        }


def verify_form_identity(u: np.ndarray, c: float, grid: FourierGrid) -> FormIdentityReport:
    """Compare ``(Phi u, D Phi u)`` with ``(u, E_c(p) u)``; all errors relative."""
    u = np.asarray(u, dtype=complex)
    nu = np.sqrt(grid.inner(u, u).real)
    if nu == 0:
        raise ValueError("u must be nonzero")
    psi = phi_map(u, c, grid)
    npsi = np.sqrt(grid.inner(psi, psi).real)
    q1 = grid.inner(psi, apply_dirac(psi, c, grid))
    q2 = grid.inner(u, apply_energy(u, c, grid))
    return FormIdentityReport(
        c=float(c),
        norm_u=float(nu),
        norm_phi_u=float(npsi),
        norm_error=float(abs(npsi - nu) / nu),
        form_dirac=float(q1.real),
        form_energy=float(q2.real),
        form_error=float(abs(q1 - q2) / abs(q2)),
        mode_error=mode_eigen_check(c, grid),
        positive=bool(q1.real >= (c * c) * nu * nu * (1 - 1e-12)),
    )
