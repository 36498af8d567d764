import numpy as np
import pytest
from scipy.integrate import quad

from chmsav import build_grid
from chmsav.initial_conditions import (
    AdmissibilityViolation,
    QuadratureFailure,
    TravelingWaveParams,
    build_traveling_wave,
    discontinuous_profile,
    eval_traveling_wave,
    peakon_superposition,
)


class TestTravelingWave:
    def test_parameters(self):
        p = TravelingWaveParams(0.3, 0.7, 1.0)
        assert p.z == pytest.approx(0.0, abs=1e-15)
        assert p.A == pytest.approx(1.75)
        assert p.B == pytest.approx(0.75)

    def test_period(self, wave):
        assert wave.period == pytest.approx(6.56, abs=1e-2)

    def test_period_against_adaptive_quadrature(self, wave):
        A, B = 1.75, 0.75
        ref = 2 * quad(lambda t: np.sqrt(A - np.sin(t) ** 2) / np.sqrt(B + np.sin(t) ** 2),
                       0, np.pi, epsabs=1e-13, epsrel=1e-13)[0]
        assert wave.period == pytest.approx(ref, rel=1e-13)

    def test_table_self_convergence(self, wave):
        finer = build_traveling_wave(TravelingWaveParams(Ntab=4096))
        assert abs(finer.period - wave.period) < 1e-8
        x = np.linspace(0, wave.period, 1001)
        assert np.abs(finer(x) - wave(x)).max() < 1e-9

    def test_table(self, wave):
        assert wave.phis[0] == pytest.approx(0.3)
        assert wave.phis.max() == pytest.approx(0.7)
        assert wave.phis[len(wave.phis) // 2] == pytest.approx(0.7)
        assert np.all(np.diff(wave.xs) > 0)
        assert np.abs(wave.spline(wave.xs) - wave.phis).max() < 1e-10

    def test_range_between_nodes(self, wave):
        x = np.linspace(0, wave.period, 20001)
        u = wave(x)
        assert u.min() >= 0.3 - 1e-6 and u.max() <= 0.7 + 1e-6

    def test_solves_profile_ode(self, wave):
        # (phi')^2 = (M - phi)(phi - m)(phi - z) / (c - phi) with z = 0
        x = np.linspace(0.05, wave.period - 0.05, 200)
        phi = wave.spline(x)
        dphi = wave.spline.derivative()(x)
        rhs = (0.7 - phi) * (phi - 0.3) * phi / (1.0 - phi)
        assert np.abs(dphi**2 - rhs).max() < 1e-8

    def test_eval_interpolates_nodes(self, wave):
        idx = np.arange(0, len(wave.xs) - 1, 97)
        assert np.abs(eval_traveling_wave(wave, wave.xs[idx], 0.0) - wave.phis[idx]).max() < 1e-10

    def test_periodicity(self, wave, rng):
        x = rng.uniform(-20, 20, 50)
        t = rng.uniform(0, 10, 50)
        assert np.allclose(wave(x, t), wave(x + wave.period, t), atol=1e-12)
        assert np.allclose(wave(x, wave.period / wave.c), wave(x, 0.0), atol=1e-10)

    @pytest.mark.parametrize("m, M, c", [(0.7, 0.3, 1.0), (0.3, 0.7, 0.6), (0.3, 1.2, 1.0)])
    def test_inadmissible(self, m, M, c):
        with pytest.raises(AdmissibilityViolation):
            build_traveling_wave(TravelingWaveParams(m, M, c))

    def test_small_table(self):
        with pytest.raises(ValueError):
            build_traveling_wave(TravelingWaveParams(Ntab=32))

    def test_quadrature_failure_type(self):
        assert issubclass(QuadratureFailure, ArithmeticError)


class TestPeakons:
    def test_two_peakon_crests(self):
        g = build_grid(0, 25, 1000)
        u = peakon_superposition(g, [(3.0, -8.0), (1.0, 0.0)], 25.0)
        # crest of each term sits half a period from its center
        i_tall = np.argmin(np.abs(g.nodes - 4.5))
        assert u.argmax() == i_tall
        single = peakon_superposition(g, [(3.0, -8.0)], 25.0)
        assert single.max() == pytest.approx(3.0)

    def test_continuity_across_branch_switch(self):
        g = build_grid(0, 30, 3000)
        u = peakon_superposition(g, [(2.0, -5.0), (1.0, -3.0), (0.8, -1.0)], 30.0)
        assert np.abs(np.diff(u)).max() < 0.05
        # closes up periodically
        assert abs(u[0] - u[-1]) < 0.05

    def test_single_peak_values(self):
        L = 10.0
        g = build_grid(0, L, 100)
        u = peakon_superposition(g, [(1.5, 0.0)], L)
        x = g.nodes
        expected = np.where(x <= L / 2, np.cosh(x), np.cosh(L - x)) * 1.5 / np.cosh(L / 2)
        assert np.allclose(u, expected, rtol=1e-14)
        assert u[50] == pytest.approx(1.5)

    def test_branch_variants(self):
        g = build_grid(0, 25, 256)
        peaks = [(3.0, -8.0), (1.0, 0.0)]
        a = peakon_superposition(g, peaks, branch="verbatim")
        b = peakon_superposition(g, peaks, branch="symmetric")
        assert np.array_equal(a, b)
        # a center to the right of some nodes makes the branches differ
        g = build_grid(0, 25, 250)
        c = peakon_superposition(g, [(1.0, 20.0)], branch="verbatim")
        d = peakon_superposition(g, [(1.0, 20.0)], branch="symmetric")
        assert not np.allclose(c, d)
        assert d.max() == pytest.approx(1.0)
        assert g.nodes[d.argmax()] == pytest.approx(7.5)

    def test_period_mismatch(self):
        with pytest.raises(ValueError):
            peakon_superposition(build_grid(0, 25, 64), [(1, 0)], 30.0)
        with pytest.raises(ValueError):
            peakon_superposition(build_grid(0, 25, 64), [(1, 0)], branch="other")


class TestDiscontinuous:
    def test_values(self):
        g = build_grid(-30, 30, 1024)
        u = discontinuous_profile(g)
        assert u[512] == pytest.approx(10 / 9)
        assert u[0] == pytest.approx(10 / 1089)
        # nodes are symmetric about 0 apart from the excluded right end
        assert np.allclose(u[1:], u[1:][::-1])
