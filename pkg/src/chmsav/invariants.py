"""Discrete mass, momentum, Hamiltonian and modified energy."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .spectral import PeriodicGrid, SpectralOperators, apply_d1, apply_d2

FIELDS = ("mass", "momentum", "hamiltonian", "modified_energy")


@dataclass(frozen=True)
class InvariantSample:
    n: int
    t: float
    mass: float
    momentum: float
    hamiltonian: float
    modified_energy: float

    def as_dict(self) -> dict:
        return asdict(self)


def mass(U, grid: PeriodicGrid) -> float:
    return float(grid.h * np.sum(U))


def momentum(U, ops: SpectralOperators, grid: PeriodicGrid) -> float:
    """``h * sum(U^2 + (D1 U)^2)``.

    Differs from ``<(I - D2) U, U>_h`` only through the Nyquist mode, whose
    first-derivative symbol is zero.
    """
    U = np.asarray(U, dtype=float)
    ux = apply_d1(ops, U)
    return float(grid.h * np.sum(U**2 + ux**2))


def hamiltonian_energy(U, ops: SpectralOperators, grid: PeriodicGrid) -> float:
    U = np.asarray(U, dtype=float)
    ux = apply_d1(ops, U)
    return float(-0.5 * grid.h * np.sum(U**3 + U * ux**2))


def quadratic_part(U, ops: SpectralOperators, grid: PeriodicGrid) -> float:
    """``<U - D2 U, U>_h``, nonnegative since the D2 symbol is nonpositive."""
    U = np.asarray(U, dtype=float)
    return float(grid.h * np.dot(U - apply_d2(ops, U), U))


def modified_energy(U, Q1, Q2, ops: SpectralOperators, grid: PeriodicGrid, params) -> float:
    return (
        quadratic_part(U, ops, grid) / 8.0
        - 0.5 * Q1**2
        + 0.5 * Q2**2
        + 0.5 * params.C1
        - 0.5 * params.C2
    )


def sample(state, ops: SpectralOperators, grid: PeriodicGrid, params) -> InvariantSample:
    U = state.U
    return InvariantSample(
        n=state.n,
        t=state.t,
        mass=mass(U, grid),
        momentum=momentum(U, ops, grid),
        hamiltonian=hamiltonian_energy(U, ops, grid),
        modified_energy=modified_energy(U, state.Q1, state.Q2, ops, grid, params),
    )


def drift_series(samples) -> list[tuple[int, dict]]:
    """Relative drift ``|f_n - f_0| / max(|f_0|, 1)`` of each functional."""
    samples = list(samples)
    if not samples:
        raise ValueError("drift_series needs at least one sample")
    ref = samples[0]
    out = []
    for s in samples:
        drifts = {}
        for name in FIELDS:
            f0 = getattr(ref, name)
            drifts[name] = abs(getattr(s, name) - f0) / max(abs(f0), 1.0)
        out.append((s.n, drifts))
    return out
