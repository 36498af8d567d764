"""Initial data: smooth periodic traveling wave, peakon trains, and a kinked bump."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .spectral import PeriodicGrid


class AdmissibilityViolation(ValueError):
    """Traveling-wave parameters do not satisfy z < m < Mmax < c."""


class QuadratureFailure(ArithmeticError):
    pass


GL_POINTS = 32


@dataclass(frozen=True)
class TravelingWaveParams:
    m: float = 0.3
    Mmax: float = 0.7
    c: float = 1.0
    Ntab: int = 2048

    @property
    def z(self) -> float:
        return self.c - self.Mmax - self.m

    @property
    def A(self) -> float:
        return (self.c - self.m) / (self.Mmax - self.m)

    @property
    def B(self) -> float:
        return (self.m - self.z) / (self.Mmax - self.m)


@dataclass(frozen=True)
class TravelingWave:
    """Tabulated wave profile over one period.

    ``xs`` and ``phis`` include the closing node at ``theta = pi`` so the
    table spans ``[0, period]``.
    """

    xs: np.ndarray
    phis: np.ndarray
    period: float
    c: float
    spline: CubicSpline

    def __call__(self, x, t=0.0):
        return eval_traveling_wave(self, x, t)


def _integrand(t, A, B):
    s2 = np.sin(t) ** 2
    num = A - s2
    if np.any(num < 0) or np.any(B + s2 <= 0):
        raise QuadratureFailure("integrand is not real on the integration range")
    return np.sqrt(num) / np.sqrt(B + s2)


def _panel_integrals(edges, A, B, order=GL_POINTS):
    """Gauss-Legendre integral of the wave integrand over each ``[edges[i], edges[i+1]]``."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    vals = _integrand(mid + half * nodes, A, B)
    return (half[:, 0]) * (vals @ weights)


def build_traveling_wave(params: TravelingWaveParams = TravelingWaveParams()) -> TravelingWave:
    """Build the profile phi(x) from its implicit quadrature representation.

    With ``phi = m + (Mmax - m) sin^2(theta)`` the abscissa is
    ``x(theta) = 2 * int_0^theta sqrt(A - sin^2 t) / sqrt(B + sin^2 t) dt``.
    The integral is accumulated panel by panel over the uniform theta table.
    """
    m, Mmax, c, Ntab = params.m, params.Mmax, params.c, params.Ntab
    if not (params.z < m < Mmax < c):
        raise AdmissibilityViolation(
            f"need z < m < Mmax < c, got z={params.z}, m={m}, Mmax={Mmax}, c={c}"
        )
    if Ntab < 64:
        raise ValueError(f"Ntab must be at least 64, got {Ntab}")
    A, B = params.A, params.B
    if A < 1:
        raise QuadratureFailure(f"A = {A} < 1 makes the integrand complex")

    theta = np.pi * np.arange(Ntab + 1) / Ntab
    phis = m + (Mmax - m) * np.sin(theta) ** 2
    xs = np.concatenate([[0.0], 2.0 * np.cumsum(_panel_integrals(theta, A, B))])
    period = float(xs[-1])
    spline = CubicSpline(xs, phis, bc_type="not-a-knot")
    return TravelingWave(xs, phis, period, c, spline)


def eval_traveling_wave(tw: TravelingWave, x, t=0.0):
    """Evaluate ``phi(x - c t)`` with the argument wrapped into ``[0, period)``."""
    xi = np.mod(np.asarray(x, dtype=float) - tw.c * t, tw.period)
    return tw.spline(xi)


def peakon_superposition(
    grid: PeriodicGrid,
    peaks: Sequence[tuple[float, float]],
    L: float | None = None,
    branch: str = "verbatim",
) -> np.ndarray:
    """Sum of periodized peakons ``c_i cosh(x - x_i) / cosh(L/2)``.

    Outside ``|x - x_i| <= L/2`` the ``verbatim`` branch uses
    ``cosh(L - (x - x_i))`` while ``symmetric`` uses ``cosh(L - |x - x_i|)``;
    the two agree whenever ``x > x_i``.
    """
    if L is None:
        L = grid.L
    if not math.isclose(L, grid.L, rel_tol=1e-12):
        raise ValueError(f"peakon period {L} differs from grid length {grid.L}")
    if branch not in ("verbatim", "symmetric"):
        raise ValueError(f"unknown peakon branch {branch!r}")
    x = grid.nodes
    u = np.zeros_like(x)
    scale = 1.0 / math.cosh(L / 2.0)
    for amp, center in peaks:
        d = x - center
        inside = np.abs(d) <= L / 2.0
        far = L - d if branch == "verbatim" else L - np.abs(d)
        u += amp * scale * np.where(inside, np.cosh(d), np.cosh(far))
    return u


def discontinuous_profile(grid: PeriodicGrid) -> np.ndarray:
    """``10 / (3 + |x|)^2``, which has a kink at the origin."""
    return 10.0 / (3.0 + np.abs(grid.nodes)) ** 2


TWO_PEAKON = dict(domain=(0.0, 25.0), peaks=[(3.0, -8.0), (1.0, 0.0)])
THREE_PEAKON = dict(domain=(0.0, 30.0), peaks=[(2.0, -5.0), (1.0, -3.0), (0.8, -1.0)])
DISCONTINUOUS_DOMAIN = (-30.0, 30.0)
