"""Fourier pseudo-spectral operators on a uniform periodic grid.

All linear operators used by the stepper are diagonal in the discrete
Fourier basis, so each one is stored as a per-mode symbol and applied with
a real FFT round trip.  The explicit cotangent/cosecant differentiation
matrices are kept as a slow cross-check.

Symbol ordering follows numpy's FFT layout::

    lambda1 = i*mu*[0, 1, ..., N/2-1, 0, 1-N/2, ..., -1]
    lambda2 = -mu^2*[0, 1, ..., (N/2)^2, (1-N/2)^2, ..., 1]

The first-derivative symbol vanishes at the Nyquist mode while the second
derivative keeps it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DENSE_CAP = 64


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid on ``[a, b)``; node ``b`` is the periodic image of ``a``."""

    a: float
    b: float
    N: int

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"need b > a, got a={self.a}, b={self.b}")
        if int(self.N) != self.N or self.N % 2 or self.N < 4:
            raise ValueError(f"N must be an even integer >= 4, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def L(self) -> float:
        return self.b - self.a

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def mu(self) -> float:
        return 2.0 * np.pi / self.L

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.N)


def build_grid(a: float, b: float, N: int) -> PeriodicGrid:
    return PeriodicGrid(float(a), float(b), N)


def _wavenumbers(N: int) -> np.ndarray:
    # integer modes in FFT order; the Nyquist slot holds -N/2
    return np.fft.fftfreq(N, d=1.0 / N)


@dataclass(frozen=True)
class SpectralOperators:
    """Fourier symbols of D1, D2, D = (I - D2)^-1 D1 and A^-1 = (I - tau/8 D1)^-1.

    The full-length arrays mirror the diagonal matrices; the ``_half``
    versions are the first ``N//2 + 1`` entries consumed by ``rfft``.
    """

    grid: PeriodicGrid
    tau: float
    lambda1: np.ndarray
    lambda2: np.ndarray
    symbolD: np.ndarray
    symbolAinv: np.ndarray
    _half: dict = field(repr=False, compare=False, default_factory=dict)

    def half(self, name: str) -> np.ndarray:
        return self._half[name]


def build_symbols(grid: PeriodicGrid, tau: float = 0.0) -> SpectralOperators:
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    N, mu = grid.N, grid.mu
    k = _wavenumbers(N)
    odd = k.copy()
    odd[N // 2] = 0.0
    lambda1 = 1j * mu * odd
    lambda2 = -(mu**2) * k**2
    symbolD = lambda1 / (1.0 - lambda2)
    symbolAinv = 1.0 / (1.0 - (tau / 8.0) * lambda1)

    m = N // 2 + 1
    half = {}
    for name, arr in (
        ("lambda1", lambda1),
        ("lambda2", lambda2),
        ("symbolD", symbolD),
        ("symbolAinv", symbolAinv),
        ("AinvD", symbolAinv * symbolD),
    ):
        h = np.array(arr[:m], dtype=complex)
        h.setflags(write=False)
        half[name] = h
    for arr in (lambda1, lambda2, symbolD, symbolAinv):
        arr.setflags(write=False)
    return SpectralOperators(grid, float(tau), lambda1, lambda2, symbolD, symbolAinv, half)


def apply_symbol(symbol_half: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Multiply by a Hermitian-consistent symbol in Fourier space.

    ``u`` may be a batch with the grid along the last axis.  ``irfft``
    discards the imaginary parts of the DC and Nyquist coefficients, so the
    result is real by construction.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    if n != 2 * (symbol_half.shape[0] - 1):
        raise ValueError(f"field length {n} does not match operator size")
    return np.fft.irfft(symbol_half * np.fft.rfft(u, axis=-1), n=n, axis=-1)


def apply_d1(ops: SpectralOperators, u: np.ndarray) -> np.ndarray:
    return apply_symbol(ops.half("lambda1"), u)


def apply_d2(ops: SpectralOperators, u: np.ndarray) -> np.ndarray:
    return apply_symbol(ops.half("lambda2"), u)


def apply_d(ops: SpectralOperators, u: np.ndarray) -> np.ndarray:
    return apply_symbol(ops.half("symbolD"), u)


def apply_a_inv(ops: SpectralOperators, u: np.ndarray) -> np.ndarray:
    return apply_symbol(ops.half("symbolAinv"), u)


def apply_a_inv_d(ops: SpectralOperators, u: np.ndarray) -> np.ndarray:
    """``A^-1 D u`` in a single transform pair."""
    return apply_symbol(ops.half("AinvD"), u)


def inner(u: np.ndarray, v: np.ndarray, grid: PeriodicGrid) -> float:
    """Discrete inner product ``h * sum(u * v)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch {u.shape} vs {v.shape}")
    return float(grid.h * np.dot(u, v))


def _check_cap(grid: PeriodicGrid, cap: int) -> None:
    if grid.N > cap:
        raise ValueError(f"dense matrices are limited to N <= {cap}, got {grid.N}")


def dense_d1(grid: PeriodicGrid, cap: int = DENSE_CAP) -> np.ndarray:
    """First-order Fourier differentiation matrix from the cotangent formula."""
    _check_cap(grid, cap)
    N, mu = grid.N, grid.mu
    x = grid.nodes
    j, l = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    off = j != l
    D = np.zeros((N, N))
    half_angle = mu * (x[j[off]] - x[l[off]]) / 2.0
    D[off] = 0.5 * mu * (-1.0) ** (j[off] + l[off]) / np.tan(half_angle)
    return D


def dense_d2(grid: PeriodicGrid, cap: int = DENSE_CAP) -> np.ndarray:
    """Second-order Fourier differentiation matrix from the cosecant formula."""
    _check_cap(grid, cap)
    N, mu = grid.N, grid.mu
    x = grid.nodes
    j, l = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    off = j != l
    D = np.full((N, N), -(mu**2) * (N**2 + 2) / 12.0)
    half_angle = mu * (x[j[off]] - x[l[off]]) / 2.0
    D[off] = 0.5 * mu**2 * (-1.0) ** (j[off] + l[off] + 1) / np.sin(half_angle) ** 2
    return D
