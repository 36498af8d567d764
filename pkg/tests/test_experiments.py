import csv
import math

import numpy as np
import pytest

from chmsav import build_grid
from chmsav.experiments import (
    CONVERGENCE_HEADER,
    INVARIANT_HEADER,
    ConfigError,
    error_norms,
    fmt,
    make_config,
    observed_orders,
    parse_peaks,
    parse_tau_list,
    peak_positions,
    read_config_file,
    read_solution,
    run_converge,
    run_invariants,
    run_simulate,
    unwrap_positions,
)

# MSAV rows of the published temporal convergence table
PAPER_E2 = [2.132e-03, 5.309e-04, 1.327e-04, 3.322e-05]
PAPER_ORDER2 = [2.01, 2.00, 2.00]


class TestNorms:
    def test_identical(self):
        g = build_grid(0, 3, 8)
        u = np.arange(8.0)
        assert error_norms(u, u, g) == (0.0, 0.0)

    def test_constant_offset(self):
        g = build_grid(0, 3, 8)
        e2, einf = error_norms(np.full(8, 1e-3), np.zeros(8), g)
        assert e2 == pytest.approx(1e-3 * math.sqrt(3))
        assert einf == pytest.approx(1e-3)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            error_norms(np.zeros(4), np.zeros(5), build_grid(0, 1, 4))


class TestOrders:
    def test_paper_column(self):
        taus = [1 / 200, 1 / 400, 1 / 800, 1 / 1600]
        orders = observed_orders(taus, PAPER_E2)
        assert orders[0] is None
        assert [round(o, 2) for o in orders[1:]] == PAPER_ORDER2

    def test_repeated_tau(self):
        assert observed_orders([0.1, 0.1], [1.0, 0.5]) == [None, None]

    def test_general_ratio(self):
        assert observed_orders([0.3, 0.1], [9.0, 1.0])[1] == pytest.approx(2.0)


class TestConfig:
    def test_file_with_sections(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("[grid]\nN = 64\ndomain = -1, 1\n[scheme]\ntau = 0.01  # comment\n"
                        "[problem]\nic = discontinuous\n")
        values = read_config_file(path)
        cfg = make_config(values)
        assert (cfg.N, cfg.tau, cfg.a, cfg.b, cfg.ic) == (64, 0.01, -1.0, 1.0, "discontinuous")

    def test_file_without_sections(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("N = 16\nT = 1\n")
        assert make_config(read_config_file(path)).N == 16

    def test_duplicate_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("[a]\nN = 16\n[b]\nN = 32\n")
        with pytest.raises(ConfigError):
            read_config_file(path)

    @pytest.mark.parametrize("values", [
        dict(mode="bogus"), dict(ic="bogus"), dict(N="7"), dict(tau="0"), dict(T="-1"),
        dict(m="0.8"), dict(mode="converge", ic="two_peakon"), dict(unknown="1"),
        dict(N="abc"), dict(peakon_branch="x"), dict(sample_stride="0"),
    ])
    def test_rejects(self, values):
        with pytest.raises(ConfigError):
            make_config(values)

    def test_mode_default_T(self):
        assert make_config(dict(mode="invariants")).T == 656.0
        assert make_config(dict(mode="converge")).T == 6.56

    def test_peaks(self):
        assert parse_peaks("3:-8, 1:0") == [(3.0, -8.0), (1.0, 0.0)]
        with pytest.raises(ConfigError):
            parse_peaks("3")

    def test_tau_list(self):
        assert parse_tau_list("L/2, 0.5", 3.0) == [1.5, 0.5]
        with pytest.raises(ConfigError):
            parse_tau_list("0.1", 1.0)
        with pytest.raises(ConfigError):
            parse_tau_list("0.1,x", 1.0)


def test_fmt_round_trips():
    for v in (np.pi, 1e-300, -2.0 / 3.0, 6.559999463458041):
        assert float(fmt(v)) == v
        assert len(fmt(v).split("e")[0].replace("-", "").replace(".", "")) == 17
    assert fmt(3) == "3" and fmt(None) == ""


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestDrivers:
    def test_simulate_T0(self, tmp_path):
        cfg = make_config(dict(mode="simulate", T=0, output_dir=str(tmp_path)))
        res = run_simulate(cfg)
        inv = _read(res.files["invariants"])
        assert inv[0] == INVARIANT_HEADER
        assert len(inv) == 2
        assert all(float(v) == 0.0 for v in inv[1][6:])
        sol = _read(res.files["solution"])
        assert sol[0] == ["t", "x", "U"]
        assert len(sol) == 1 + 32

    def test_simulate_deterministic(self, tmp_path):
        out = []
        for sub in ("a", "b"):
            cfg = make_config(dict(mode="simulate", T=0.1, tau=0.01, output_dir=str(tmp_path / sub)))
            res = run_simulate(cfg)
            out.append((res.files["solution"].read_bytes(), res.files["invariants"].read_bytes()))
        assert out[0] == out[1]
        assert b"\r" not in out[0][0]

    def test_solution_stride(self, tmp_path):
        cfg = make_config(dict(mode="simulate", T=0.1, tau=0.01, solution_stride=5, sample_stride=2,
                               output_dir=str(tmp_path)))
        res = run_simulate(cfg)
        times, x, U = read_solution(res.files["solution"])
        assert np.allclose(times, [0, 0.05, 0.1])
        assert U.shape == (3, 32)
        assert len(_read(res.files["invariants"])) == 1 + 6

    def test_invariants_writes_only_invariants(self, tmp_path):
        cfg = make_config(dict(mode="invariants", T=0.082, output_dir=str(tmp_path)))
        res = run_invariants(cfg)
        assert set(res.files) == {"invariants"}
        assert res.samples == 11
        assert res.max_drift["modified_energy"] < 1e-12
        assert not (tmp_path / "solution.csv").exists()

    def test_converge_table(self, tmp_path):
        cfg = make_config(dict(mode="converge", output_dir=str(tmp_path)))
        res = run_converge(cfg)
        rows = _read(res.files["convergence"])
        assert rows[0] == CONVERGENCE_HEADER
        assert rows[1][2] == "" and rows[1][4] == ""
        for (tau, e2, o2, einf, oinf), ref in zip(res.rows, PAPER_E2):
            assert ref / 2 <= e2 <= 2 * ref
        assert all(1.9 <= r[2] <= 2.1 and 1.9 <= r[4] <= 2.1 for r in res.rows[1:])

    def test_converge_parallel_matches_serial(self, tmp_path):
        base = dict(mode="converge", tau_list="L/100,L/200")
        serial = run_converge(make_config(dict(base, output_dir=str(tmp_path / "s"))))
        parallel = run_converge(make_config(dict(base, jobs=2, output_dir=str(tmp_path / "p"))))
        assert serial.rows == parallel.rows

    def test_converge_repeated_tau_blank_order(self, tmp_path):
        cfg = make_config(dict(mode="converge", tau_list="L/100,L/100", output_dir=str(tmp_path)))
        rows = _read(run_converge(cfg).files["convergence"])
        assert rows[2][2] == "" and rows[2][4] == ""


def test_peak_tracking():
    x = np.linspace(0, 10, 100, endpoint=False)
    U = np.stack([np.exp(-((x - 2 - s) ** 2)) * 2 + np.exp(-((x - 8) ** 2)) for s in (0, 1, 3)])
    pos = peak_positions(x, U, 2)
    assert np.allclose(pos[:, 0], [2, 3, 5])
    assert np.allclose(pos[:, 1], 8)
    assert np.allclose(unwrap_positions(np.array([9.0, 9.5, 0.2]), 10.0), [9.0, 9.5, 10.2])
