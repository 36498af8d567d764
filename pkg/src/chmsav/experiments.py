"""Experiment drivers: run configuration, error norms and CSV output."""

from __future__ import annotations

import configparser
import csv
import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import initial_conditions as ic_mod
from .initial_conditions import TravelingWaveParams, build_traveling_wave
from .invariants import FIELDS, sample
from .msav import SchemeParams, default_stride, run
from .spectral import PeriodicGrid, build_grid, build_symbols

log = logging.getLogger(__name__)

MODES = ("simulate", "converge", "invariants")
ICS = ("traveling_wave", "two_peakon", "three_peakon", "discontinuous")
DEFAULT_T = {"simulate": 6.56, "converge": 6.56, "invariants": 656.0}
DEFAULT_TAU_LIST = "L/200,L/400,L/800,L/1600"

INVARIANT_HEADER = ["n", "t", *FIELDS, *(f"drift_{name}" for name in FIELDS)]
SOLUTION_HEADER = ["t", "x", "U"]
CONVERGENCE_HEADER = ["tau", "e2", "order2", "einf", "orderinf"]


class ConfigError(ValueError):
    pass


def fmt(value) -> str:
    """17 significant digits, so doubles round-trip exactly."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.16e}"


# -- configuration --------------------------------------------------------------


@dataclass
class RunConfig:
    mode: str = "simulate"
    ic: str = "traveling_wave"
    a: Optional[float] = None
    b: Optional[float] = None
    N: int = 32
    tau: float = 0.0082
    T: Optional[float] = None
    C1: float = 0.0
    C2: float = 0.0
    eps_radicand: float = 1e-12
    m: float = 0.3
    Mmax: float = 0.7
    c: float = 1.0
    Ntab: int = 2048
    peaks: Optional[list] = None
    peakon_branch: str = "verbatim"
    output_dir: str = "out"
    sample_stride: Optional[int] = None
    solution_stride: Optional[int] = None
    tau_list: str = DEFAULT_TAU_LIST
    jobs: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.ic not in ICS:
            raise ConfigError(f"ic must be one of {ICS}, got {self.ic!r}")
        if self.peakon_branch not in ("verbatim", "symmetric"):
            raise ConfigError("peakon_branch must be verbatim or symmetric")
        if self.N < 4 or self.N % 2:
            raise ConfigError(f"N must be an even integer >= 4, got {self.N}")
        if not self.tau > 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if self.T is None:
            self.T = DEFAULT_T[self.mode]
        if self.T < 0:
            raise ConfigError(f"T must be non-negative, got {self.T}")
        if self.ic == "traveling_wave":
            z = self.c - self.Mmax - self.m
            if not (z < self.m < self.Mmax < self.c):
                raise ConfigError(
                    f"traveling wave needs z < m < Mmax < c, got z={z}, "
                    f"m={self.m}, Mmax={self.Mmax}, c={self.c}"
                )
        elif self.mode == "converge":
            raise ConfigError("converge mode needs the traveling_wave initial condition")
        for name in ("sample_stride", "solution_stride"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"{name} must be >= 1")

    def scheme_params(self, tau: Optional[float] = None) -> SchemeParams:
        return SchemeParams(
            tau=self.tau if tau is None else tau,
            T=self.T,
            C1=self.C1,
            C2=self.C2,
            eps_radicand=self.eps_radicand,
        )


def parse_peaks(text: str) -> list[tuple[float, float]]:
    """``"3:-8, 1:0"`` -> ``[(3.0, -8.0), (1.0, 0.0)]`` (amplitude:center)."""
    peaks = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            amp, center = item.split(":")
            peaks.append((float(amp), float(center)))
        except ValueError:
            raise ConfigError(f"bad peak entry {item!r}; expected amplitude:center") from None
    return peaks


def _coerce(name: str, raw):
    types = {f.name: f.type for f in fields(RunConfig)}
    if name not in types:
        raise ConfigError(f"unknown configuration key {name!r}")
    if raw is None or isinstance(raw, (int, float, list)) and not isinstance(raw, bool):
        return raw
    raw = str(raw).strip()
    kind = types[name]
    try:
        if name == "peaks":
            return parse_peaks(raw)
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError:
        raise ConfigError(f"cannot parse {name}={raw!r}") from None
    return raw


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; section headers are optional and only group keys."""
    text = Path(path).read_text(encoding="utf-8")
    if not re.match(r"\s*(\[|$)", text):
        text = "[run]\n" + text
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    out = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            if key in out:
                raise ConfigError(f"{path}: key {key!r} appears in more than one section")
            out[key] = value
    return out


def make_config(values: dict) -> RunConfig:
    kwargs = {}
    for key, raw in values.items():
        if key == "domain":
            a, b = (float(s) for s in str(raw).split(","))
            kwargs["a"], kwargs["b"] = a, b
            continue
        kwargs[key] = _coerce(key, raw)
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# -- problem setup --------------------------------------------------------------


@dataclass
class Problem:
    grid: PeriodicGrid
    U0: np.ndarray
    wave: Optional[ic_mod.TravelingWave] = None


def build_problem(config: RunConfig) -> Problem:
    if config.ic == "traveling_wave":
        wave = build_traveling_wave(
            TravelingWaveParams(config.m, config.Mmax, config.c, config.Ntab)
        )
        a = 0.0 if config.a is None else config.a
        grid = build_grid(a, a + wave.period, config.N)
        return Problem(grid, wave(grid.nodes), wave)

    if config.ic == "discontinuous":
        default_domain = ic_mod.DISCONTINUOUS_DOMAIN
        peaks = None
    else:
        preset = ic_mod.TWO_PEAKON if config.ic == "two_peakon" else ic_mod.THREE_PEAKON
        default_domain = preset["domain"]
        peaks = config.peaks or preset["peaks"]
    a = default_domain[0] if config.a is None else config.a
    b = default_domain[1] if config.b is None else config.b
    try:
        grid = build_grid(a, b, config.N)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if peaks is None:
        return Problem(grid, ic_mod.discontinuous_profile(grid))
    U0 = ic_mod.peakon_superposition(grid, peaks, grid.L, branch=config.peakon_branch)
    return Problem(grid, U0)


# -- diagnostics ------------------------------------------------------------------


def error_norms(U, exact, grid: PeriodicGrid) -> tuple[float, float]:
    """Discrete l2 and max-norm of ``U - exact``."""
    U = np.asarray(U, dtype=float)
    exact = np.asarray(exact, dtype=float)
    if U.shape != exact.shape:
        raise ValueError(f"shape mismatch {U.shape} vs {exact.shape}")
    err = U - exact
    return float(np.sqrt(grid.h * np.sum(err**2))), float(np.max(np.abs(err)))


def observed_orders(taus: Iterable[float], errors: Iterable[float]) -> list[Optional[float]]:
    """``log(e_prev / e) / log(tau_prev / tau)``; None for the first row or equal steps."""
    taus, errors = list(taus), list(errors)
    out: list[Optional[float]] = [None]
    for i in range(1, len(taus)):
        ratio = taus[i - 1] / taus[i]
        if ratio == 1.0 or errors[i] <= 0 or errors[i - 1] <= 0:
            out.append(None)
        else:
            out.append(math.log(errors[i - 1] / errors[i]) / math.log(ratio))
    return out


def parse_tau_list(text: str, period: float) -> list[float]:
    """Comma-separated step sizes; ``L/k`` means the domain length over ``k``."""
    taus = []
    for token in filter(None, (s.strip() for s in text.split(","))):
        try:
            if token.startswith("L/"):
                taus.append(period / float(token[2:]))
            else:
                taus.append(float(token))
        except ValueError:
            raise ConfigError(f"bad tau entry {token!r}") from None
    if len(taus) < 2:
        raise ConfigError("converge needs at least two time steps")
    if any(t <= 0 for t in taus):
        raise ConfigError("time steps must be positive")
    return taus


# -- drivers --------------------------------------------------------------------


class _InvariantWriter:
    def __init__(self, fh, ops, grid, params):
        self.writer = csv.writer(fh, lineterminator="\n")
        self.writer.writerow(INVARIANT_HEADER)
        self.ops, self.grid, self.params = ops, grid, params
        self.first = None
        self.max_drift = dict.fromkeys(FIELDS, 0.0)
        self.count = 0

    def __call__(self, state):
        s = sample(state, self.ops, self.grid, self.params)
        if self.first is None:
            self.first = s
        row = [s.n, s.t]
        drifts = []
        for name in FIELDS:
            f0 = getattr(self.first, name)
            value = getattr(s, name)
            d = abs(value - f0) / max(abs(f0), 1.0)
            self.max_drift[name] = max(self.max_drift[name], d)
            row.append(value)
            drifts.append(d)
        self.writer.writerow([fmt(v) for v in row + drifts])
        self.count += 1


@dataclass
class RunResult:
    final_state: object
    grid: PeriodicGrid
    files: dict = field(default_factory=dict)
    max_drift: dict = field(default_factory=dict)
    samples: int = 0
    rows: list = field(default_factory=list)


def _integrate(config: RunConfig, out: Path, with_solution: bool) -> RunResult:
    problem = build_problem(config)
    grid = problem.grid
    params = config.scheme_params()
    ops = build_symbols(grid, params.tau)
    inv_stride = config.sample_stride or default_stride(grid.N)
    sol_stride = config.solution_stride or inv_stride
    out.mkdir(parents=True, exist_ok=True)

    files = {"invariants": out / "invariants.csv"}
    if with_solution:
        files["solution"] = out / "solution.csv"
    M = params.M
    x_text = [fmt(x) for x in grid.nodes]

    with open(files["invariants"], "w", encoding="utf-8", newline="") as inv_fh:
        inv = _InvariantWriter(inv_fh, ops, grid, params)
        sol_fh = open(files["solution"], "w", encoding="utf-8", newline="") if with_solution else None
        try:
            sol = None
            if sol_fh:
                sol = csv.writer(sol_fh, lineterminator="\n")
                sol.writerow(SOLUTION_HEADER)

            def observer(n, t, state):
                if n % inv_stride == 0 or n == M:
                    inv(state)
                if sol and (n % sol_stride == 0 or n == M):
                    t_text = fmt(t)
                    sol.writerows([t_text, xs, fmt(u)] for xs, u in zip(x_text, state.U))

            final = run(problem.U0, params, ops, grid, observer=observer,
                        stride=math.gcd(inv_stride, sol_stride))
        finally:
            if sol_fh:
                sol_fh.close()
    return RunResult(final, grid, files, inv.max_drift, inv.count)


def run_simulate(config: RunConfig) -> RunResult:
    return _integrate(config, Path(config.output_dir), with_solution=True)


def run_invariants(config: RunConfig) -> RunResult:
    return _integrate(config, Path(config.output_dir), with_solution=False)


def _converge_one(config: RunConfig, problem: Problem, tau: float):
    params = config.scheme_params(tau)
    ops = build_symbols(problem.grid, tau)
    final = run(problem.U0, params, ops, problem.grid, stride=max(params.M, 1))
    exact = problem.wave(problem.grid.nodes, final.t)
    return error_norms(final.U, exact, problem.grid)


def run_converge(config: RunConfig, tau_list: Optional[str] = None) -> RunResult:
    problem = build_problem(config)
    taus = parse_tau_list(tau_list or config.tau_list, problem.grid.L)
    if config.jobs > 1:
        with ThreadPoolExecutor(config.jobs) as pool:
            norms = list(pool.map(lambda t: _converge_one(config, problem, t), taus))
    else:
        norms = [_converge_one(config, problem, t) for t in taus]
    e2 = [n[0] for n in norms]
    einf = [n[1] for n in norms]
    order2 = observed_orders(taus, e2)
    orderinf = observed_orders(taus, einf)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "convergence.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CONVERGENCE_HEADER)
        for row in zip(taus, e2, order2, einf, orderinf):
            w.writerow([fmt(v) for v in row])
    rows = list(zip(taus, e2, order2, einf, orderinf))
    return RunResult(None, problem.grid, {"convergence": path}, rows=rows)


# -- post-processing ------------------------------------------------------------


def read_solution(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Load ``solution.csv`` into ``(times, x, U[time, x])``."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    times = np.unique(data[:, 0])
    x = data[data[:, 0] == times[0], 1]
    U = data[:, 2].reshape(times.size, x.size)
    return times, x, U


def peak_positions(x: np.ndarray, U: np.ndarray, count: int = 2) -> np.ndarray:
    """Positions of the ``count`` highest local maxima of each snapshot.

    Returns an array of shape ``(len(U), count)`` ordered by peak height,
    tallest first.  Maxima are found with periodic neighbours.
    """
    out = np.empty((U.shape[0], count))
    for i, u in enumerate(U):
        is_max = (u >= np.roll(u, 1)) & (u > np.roll(u, -1))
        idx = np.flatnonzero(is_max)
        idx = idx[np.argsort(u[idx])[::-1]][:count]
        if idx.size < count:
            idx = np.pad(idx, (0, count - idx.size), mode="edge")
        out[i] = x[idx]
    return out


def unwrap_positions(pos: np.ndarray, L: float) -> np.ndarray:
    """Remove periodic jumps from a position time series."""
    return np.unwrap(pos * (2 * np.pi / L)) * (L / (2 * np.pi))
