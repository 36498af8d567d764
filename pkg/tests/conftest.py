import numpy as np
import pytest

from chmsav import build_grid, build_symbols, build_traveling_wave


def smooth_random_field(rng, grid, amplitude=1.0, offset=0.0):
    """Random trigonometric polynomial with a decaying spectrum."""
    N = grid.N
    k = np.fft.rfftfreq(N, 1.0 / N)
    coef = (rng.normal(size=k.size) + 1j * rng.normal(size=k.size)) / (1.0 + k) ** 2
    coef[0] = 0.0
    coef[-1] = coef[-1].real
    u = np.fft.irfft(coef, n=N)
    u *= amplitude / max(np.abs(u).max(), 1e-300)
    return u + offset


@pytest.fixture
def rng():
    return np.random.default_rng(20201017)


@pytest.fixture(scope="session")
def wave():
    return build_traveling_wave()


@pytest.fixture(scope="session")
def wave_grid(wave):
    return build_grid(0.0, wave.period, 32)


@pytest.fixture
def ops8():
    grid = build_grid(0.0, 2 * np.pi, 8)
    return grid, build_symbols(grid, 0.1)


ACCEPTANCE_LINES = []


def report(criterion, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
