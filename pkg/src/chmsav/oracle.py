"""Dense reference implementation for cross-checking the FFT solver.

Everything here builds explicit N x N matrices and solves the unreduced
(N + 2)-unknown half-step system directly, so it is only usable for small
grids.  Nothing in the library imports this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .msav import (
    MsavState,
    SchemeParams,
    SplitGradients,
    g_density,
    g_partials,
    h_density,
    h_partials,
)
from .spectral import DENSE_CAP, PeriodicGrid, dense_d1, dense_d2


@dataclass(frozen=True)
class DenseOperators:
    D1: np.ndarray
    D2: np.ndarray
    D: np.ndarray


def dense_operators(grid: PeriodicGrid) -> DenseOperators:
    if grid.N > DENSE_CAP:
        raise ValueError(f"oracle is limited to N <= {DENSE_CAP}")
    D1 = dense_d1(grid)
    D2 = dense_d2(grid)
    D = np.linalg.solve(np.eye(grid.N) - D2, D1)
    return DenseOperators(D1, D2, D)


def dense_a_inv(dops: DenseOperators, tau: float, u: np.ndarray) -> np.ndarray:
    N = dops.D1.shape[0]
    return np.linalg.solve(np.eye(N) - tau / 8.0 * dops.D1, u)


def dense_gradients(hatU, dops: DenseOperators, grid: PeriodicGrid, params: SchemeParams):
    ux = dops.D1 @ hatU
    rg = grid.h * np.sum(g_density(hatU, ux)) + params.C1
    rh = grid.h * np.sum(h_density(hatU, ux)) + params.C2
    g1, g2 = g_partials(hatU, ux)
    h1, h2 = h_partials(hatU, ux)
    G1 = (g1 - dops.D1 @ g2) / (2.0 * math.sqrt(rg))
    G2 = (h1 - dops.D1 @ h2) / (2.0 * math.sqrt(rh))
    return SplitGradients(G1, G2)


def monolithic_system(U, Q1, Q2, grads, dops: DenseOperators, grid, tau):
    """Matrix and right-hand side for ``(U^{n+1/2}, Q1^{n+1/2}, Q2^{n+1/2})``.

    Rows 0..N-1: ``U' - tau/2 D(-G1 Q1' + G2 Q2' + (I - D2) U' / 4) = U``.
    Rows N, N+1: ``Q_i' - <G_i, U'>_h = Q_i - <G_i, U>_h``.
    """
    N = grid.N
    I = np.eye(N)
    G1, G2 = grads.G1, grads.G2
    K = np.zeros((N + 2, N + 2))
    K[:N, :N] = I - tau / 8.0 * dops.D @ (I - dops.D2)
    K[:N, N] = tau / 2.0 * dops.D @ G1
    K[:N, N + 1] = -tau / 2.0 * dops.D @ G2
    K[N, :N] = -grid.h * G1
    K[N + 1, :N] = -grid.h * G2
    K[N, N] = 1.0
    K[N + 1, N + 1] = 1.0
    rhs = np.concatenate([U, [Q1 - grid.h * G1 @ U, Q2 - grid.h * G2 @ U]])
    return K, rhs


def dense_half_step(state: MsavState, hatU, grid, params: SchemeParams, grads=None, dops=None):
    dops = dops or dense_operators(grid)
    if grads is None:
        grads = dense_gradients(np.asarray(hatU, dtype=float), dops, grid, params)
    K, rhs = monolithic_system(state.U, state.Q1, state.Q2, grads, dops, grid, params.tau)
    if np.linalg.cond(K) > 1e14:
        raise np.linalg.LinAlgError("monolithic half-step matrix is singular")
    sol = np.linalg.solve(K, rhs)
    N = grid.N
    return sol[:N], float(sol[N]), float(sol[N + 1])


def dense_step(state: MsavState, grid, params: SchemeParams, dops=None) -> MsavState:
    """Startup step when ``state.n == 0``, extrapolated step otherwise."""
    if state.n == 0:
        hatU = state.U
    else:
        hatU = 1.5 * state.U - 0.5 * state.U_prev
    U_half, Q1_half, Q2_half = dense_half_step(state, hatU, grid, params, dops=dops)
    return MsavState(
        U=2.0 * U_half - state.U,
        Q1=2.0 * Q1_half - state.Q1,
        Q2=2.0 * Q2_half - state.Q2,
        n=state.n + 1,
        tau=state.tau,
        U_prev=state.U,
    )


def dense_functionals(U, grid: PeriodicGrid) -> tuple[float, float, float]:
    """(mass, momentum, hamiltonian) by direct summation with the dense D1."""
    U = np.asarray(U, dtype=float)
    ux = dense_d1(grid) @ U
    h = grid.h
    return (
        float(h * U.sum()),
        float(h * np.sum(U**2 + ux**2)),
        float(-0.5 * h * np.sum(U**3 + U * ux**2)),
    )
