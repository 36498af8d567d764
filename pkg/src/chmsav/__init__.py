"""Linearly implicit energy-preserving MSAV solver for the Camassa-Holm equation."""

from .initial_conditions import (
    TravelingWave,
    TravelingWaveParams,
    build_traveling_wave,
    discontinuous_profile,
    eval_traveling_wave,
    peakon_superposition,
)
from .invariants import (
    InvariantSample,
    drift_series,
    hamiltonian_energy,
    mass,
    modified_energy,
    momentum,
)
from .msav import (
    MsavState,
    RadicandTooSmall,
    SchemeParams,
    SingularReducedSystem,
    SolverError,
    StepFailure,
    run,
    startup_step,
    step,
)
from .spectral import PeriodicGrid, SpectralOperators, build_grid, build_symbols, inner

__version__ = "0.1.0"
