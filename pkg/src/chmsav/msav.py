"""Linearly implicit MSAV stepper for the Camassa-Holm equation.

The Hamiltonian -1/2 * int(u^3 + u u_x^2) is split into

    -1/2 * int g  +  1/2 * int h  +  1/8 * int (u^2 + u_x^2)

with the nonnegative densities ``g = (u + 1/2)^2 (u^2 + u_x^2)`` and
``h = u^2 (u^2 + u_x^2)``.  Each nonquadratic piece gets a scalar auxiliary
variable ``q = sqrt(int f + C)`` and the resulting system is advanced with a
linearized Crank-Nicolson step whose coefficients are extrapolated from the
two previous levels.  Every step costs a handful of FFTs plus a 2x2 solve.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .spectral import (
    PeriodicGrid,
    SpectralOperators,
    apply_a_inv,
    apply_d,
    apply_d1,
    apply_d2,
    inner,
)

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Base class for failures inside a time step."""


class RadicandTooSmall(SolverError):
    """A square-root argument fell below the guard; raise C1 or C2."""


class SingularReducedSystem(SolverError):
    """The 2x2 system for the auxiliary projections is numerically singular."""


class StepFailure(SolverError):
    def __init__(self, n: int, cause: Exception):
        super().__init__(f"step {n} failed: {cause}")
        self.n = n
        self.cause = cause


# -- energy splitting ---------------------------------------------------------


def g_density(u, ux):
    return (u + 0.5) ** 2 * (u**2 + ux**2)


def h_density(u, ux):
    return u**2 * (u**2 + ux**2)


def g_partials(u, ux):
    """Return ``(dg/du, dg/du_x)``."""
    g1 = 2.0 * (u + 0.5) * (2.0 * u**2 + ux**2 + 0.5 * u)
    g2 = 2.0 * ux * (u + 0.5) ** 2
    return g1, g2


def h_partials(u, ux):
    """Return ``(dh/du, dh/du_x)``."""
    h1 = 4.0 * u**3 + 2.0 * u * ux**2
    h2 = 2.0 * ux * u**2
    return h1, h2


# -- state ----------------------------------------------------------------------


@dataclass(frozen=True)
class SchemeParams:
    tau: float
    T: float = 0.0
    C1: float = 0.0
    C2: float = 0.0
    eps_radicand: float = 1e-12

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.eps_radicand > 0:
            raise ValueError("eps_radicand must be positive")
        if self.T < 0:
            raise ValueError(f"T must be non-negative, got {self.T}")

    @property
    def M(self) -> int:
        return int(round(self.T / self.tau))

    def commensurate(self, rtol: float = 1e-9) -> bool:
        return abs(self.M * self.tau - self.T) <= rtol * max(self.T, self.tau)


@dataclass(frozen=True)
class MsavState:
    U: np.ndarray
    Q1: float
    Q2: float
    n: int
    tau: float
    U_prev: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.U_prev is None) != (self.n == 0):
            raise ValueError("U_prev must be present exactly when n >= 1")

    @property
    def t(self) -> float:
        return self.n * self.tau


@dataclass(frozen=True)
class SplitGradients:
    G1: np.ndarray
    G2: np.ndarray


# -- building blocks -----------------------------------------------------------


def _radicand(value: float, shift: float, eps: float, label: str) -> float:
    r = value + shift
    if not r >= eps:
        raise RadicandTooSmall(
            f"{label} radicand {r:.3e} is below {eps:.1e}; increase the shift constant"
        )
    return r


def assemble_gradients(
    hatU: np.ndarray, ops: SpectralOperators, grid: PeriodicGrid, params: SchemeParams
) -> SplitGradients:
    """Normalized variational derivatives of the two split energies at ``hatU``."""
    hatU = np.asarray(hatU, dtype=float)
    ux = apply_d1(ops, hatU)
    rg = _radicand(grid.h * g_density(hatU, ux).sum(), params.C1, params.eps_radicand, "g")
    rh = _radicand(grid.h * h_density(hatU, ux).sum(), params.C2, params.eps_radicand, "h")
    g1, g2 = g_partials(hatU, ux)
    h1, h2 = h_partials(hatU, ux)
    dg2, dh2 = apply_d1(ops, np.stack([g2, h2]))
    G1 = (g1 - dg2) / (2.0 * math.sqrt(rg))
    G2 = (h1 - dh2) / (2.0 * math.sqrt(rh))
    return SplitGradients(G1, G2)


def init_aux(
    U0: np.ndarray, ops: SpectralOperators, grid: PeriodicGrid, params: SchemeParams
) -> tuple[float, float]:
    U0 = np.asarray(U0, dtype=float)
    ux = apply_d1(ops, U0)
    rg = _radicand(grid.h * g_density(U0, ux).sum(), params.C1, params.eps_radicand, "g")
    rh = _radicand(grid.h * h_density(U0, ux).sum(), params.C2, params.eps_radicand, "h")
    return math.sqrt(rg), math.sqrt(rh)


def initial_state(
    U0: np.ndarray, ops: SpectralOperators, grid: PeriodicGrid, params: SchemeParams
) -> MsavState:
    U0 = np.array(U0, dtype=float)
    if U0.shape != (grid.N,):
        raise ValueError(f"initial field has shape {U0.shape}, expected ({grid.N},)")
    if not np.all(np.isfinite(U0)):
        raise ValueError("initial field contains non-finite values")
    Q1, Q2 = init_aux(U0, ops, grid, params)
    return MsavState(U0, Q1, Q2, 0, params.tau)


def _solve_2x2(m11, m12, m21, m22, c1, c2):
    scale = max(abs(m11), abs(m12), abs(m21), abs(m22))
    det = m11 * m22 - m12 * m21
    if not abs(det) >= 1e-14 * scale * scale:
        raise SingularReducedSystem(f"determinant {det:.3e} at entry scale {scale:.3e}")
    return (c1 * m22 - m12 * c2) / det, (m11 * c2 - m21 * c1) / det


def solve_half_step(
    hatU: np.ndarray,
    state: MsavState,
    ops: SpectralOperators,
    grid: PeriodicGrid,
    params: SchemeParams,
    grads: Optional[SplitGradients] = None,
) -> tuple[np.ndarray, float, float]:
    """Solve for ``(U^{n+1/2}, Q1^{n+1/2}, Q2^{n+1/2})``.

    The coupled system is reduced to ``U = gamma1*s1 + gamma2*s2 + b`` with
    ``s_i = <G_i, U>``; projecting onto ``G1`` and ``G2`` gives a 2x2
    system for ``(s1, s2)``.  ``grads`` overrides the gradients assembled at
    ``hatU``.
    """
    if grads is None:
        grads = assemble_gradients(hatU, ops, grid, params)
    G1, G2 = grads.G1, grads.G2
    U, Q1, Q2 = state.U, state.Q1, state.Q2
    half_tau = 0.5 * params.tau

    DG1, DG2 = apply_d(ops, np.stack([G1, G2]))
    p1 = inner(G1, U, grid)
    p2 = inner(G2, U, grid)
    r = U - half_tau * DG1 * (Q1 - p1) + half_tau * DG2 * (Q2 - p2)
    AinvDG1, AinvDG2, b = apply_a_inv(ops, np.stack([DG1, DG2, r]))
    gamma1 = -half_tau * AinvDG1
    gamma2 = half_tau * AinvDG2

    s1, s2 = _solve_2x2(
        1.0 - inner(G1, gamma1, grid),
        -inner(G1, gamma2, grid),
        -inner(G2, gamma1, grid),
        1.0 - inner(G2, gamma2, grid),
        inner(G1, b, grid),
        inner(G2, b, grid),
    )
    U_half = gamma1 * s1 + gamma2 * s2 + b
    Q1_half = Q1 + inner(G1, U_half - U, grid)
    Q2_half = Q2 + inner(G2, U_half - U, grid)
    return U_half, Q1_half, Q2_half


def half_step_residual(
    U_half: np.ndarray,
    Q1_half: float,
    Q2_half: float,
    state: MsavState,
    grads: SplitGradients,
    ops: SpectralOperators,
    params: SchemeParams,
) -> np.ndarray:
    """Residual of the field equation of the unreduced half-step system."""
    rhs = (
        -grads.G1 * Q1_half
        + grads.G2 * Q2_half
        + 0.25 * (U_half - apply_d2(ops, U_half))
    )
    return U_half - state.U - 0.5 * params.tau * apply_d(ops, rhs)


def _advance(state, U_half, Q1_half, Q2_half) -> MsavState:
    return MsavState(
        U=2.0 * U_half - state.U,
        Q1=2.0 * Q1_half - state.Q1,
        Q2=2.0 * Q2_half - state.Q2,
        n=state.n + 1,
        tau=state.tau,
        U_prev=state.U,
    )


def startup_step(
    state: MsavState, ops: SpectralOperators, grid: PeriodicGrid, params: SchemeParams
) -> MsavState:
    """First step; coefficients are frozen at ``U^0`` instead of extrapolated."""
    if state.n != 0:
        raise ValueError(f"startup_step needs n == 0, got n = {state.n}")
    return _advance(state, *solve_half_step(state.U, state, ops, grid, params))


def step(
    state: MsavState, ops: SpectralOperators, grid: PeriodicGrid, params: SchemeParams
) -> MsavState:
    if state.n < 1 or state.U_prev is None:
        raise ValueError("step needs a state with n >= 1; use startup_step first")
    hatU = 1.5 * state.U - 0.5 * state.U_prev
    return _advance(state, *solve_half_step(hatU, state, ops, grid, params))


def default_stride(N: int) -> int:
    return 1 if N <= 64 else 100


Observer = Callable[[int, float, MsavState], None]


def run(
    U0: np.ndarray,
    params: SchemeParams,
    ops: SpectralOperators,
    grid: PeriodicGrid,
    observer: Optional[Observer] = None,
    stride: Optional[int] = None,
) -> MsavState:
    """Integrate ``M = round(T / tau)`` steps from ``U0``.

    ``observer(n, t, state)`` sees the initial state, every ``stride``-th
    state, and the final state.  Failures are re-raised as
    :class:`StepFailure` carrying the index of the step being computed.
    """
    if abs(ops.tau - params.tau) > 1e-15 * params.tau:
        raise ValueError(f"operators were built for tau={ops.tau}, params have {params.tau}")
    if not params.commensurate():
        log.warning(
            "T=%r is not a multiple of tau=%r; integrating to %r",
            params.T, params.tau, params.M * params.tau,
        )
    stride = stride or default_stride(grid.N)
    M = params.M

    try:
        state = initial_state(U0, ops, grid, params)
    except SolverError as exc:
        raise StepFailure(0, exc) from exc
    if observer:
        observer(0, 0.0, state)

    for n in range(1, M + 1):
        try:
            if state.n == 0:
                state = startup_step(state, ops, grid, params)
            else:
                state = step(state, ops, grid, params)
        except SolverError as exc:
            raise StepFailure(n, exc) from exc
        if not np.all(np.isfinite(state.U)) or not (
            math.isfinite(state.Q1) and math.isfinite(state.Q2)
        ):
            raise StepFailure(n, SolverError("non-finite values in the solution"))
        if observer and (n % stride == 0 or n == M):
            observer(n, state.t, state)
    return state
