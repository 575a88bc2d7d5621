"""Sweep engine: trials, phase diagrams, convergence study, CSV output."""

import dataclasses
import math

import numpy as np
import pytest

from graphon_sync import (
    ExperimentConfig,
    emit_csv,
    initial_profile,
    run_convergence_study,
    run_phase_diagram,
    run_trial,
)
from graphon_sync.experiments import GRID_HEADER, TRIAL_HEADER, GridCell
from graphon_sync.seeding import derive_trial_seed


def strip_timing(record):
    return dataclasses.replace(record, wall_time=0.0)


class TestInitialProfile:
    def test_linear(self):
        eta = initial_profile("linear")
        np.testing.assert_allclose(eta(np.array([0.0, 0.5])), [0.0, 0.5])

    def test_linear_scaled(self):
        eta = initial_profile("linear", {"scale": 2.0, "offset": 1.0})
        np.testing.assert_allclose(eta(np.array([0.0, 0.5])), [1.0, 2.0])

    def test_cosine(self):
        eta = initial_profile("cosine", {"amplitude": 0.5})
        assert eta(np.array([0.0]))[0] == pytest.approx(0.5)

    def test_random_smooth_deterministic(self):
        x = np.linspace(0, 1, 33)
        a = initial_profile("uniform-random-smooth", seed=5)(x)
        b = initial_profile("uniform-random-smooth", seed=5)(x)
        c = initial_profile("uniform-random-smooth", seed=6)(x)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="preset"):
            initial_profile("sawtooth")

    def test_unused_params_rejected(self):
        with pytest.raises(ValueError, match="unused"):
            initial_profile("linear", {"amplitude": 2.0})


class TestConfig:
    def test_mapping_round_trip(self):
        cfg = ExperimentConfig(
            n_grid=(10, 20), p_grid=(0.5,), beta_grid=(0.0, 0.1), trials=3,
            master_seed=9, step=0.05, horizon=1.0, threads=2,
        )
        assert ExperimentConfig.from_mapping(cfg.to_mapping()) == cfg

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            ExperimentConfig.from_mapping({"n_grid": [2], "p_grid": [1.0], "bogus": 1})

    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(n_grid=(), p_grid=(0.5,))
        with pytest.raises(ValueError):
            ExperimentConfig(n_grid=(5,), p_grid=(1.5,))
        with pytest.raises(ValueError):
            ExperimentConfig(n_grid=(5,), p_grid=(0.5,), trials=0)

    def test_trial_seed_is_pure_function(self):
        a = derive_trial_seed(7, 1, 2, 3, 4)
        assert a == derive_trial_seed(7, 1, 2, 3, 4)
        neighbours = {
            derive_trial_seed(7, 1, 2, 3, 5),
            derive_trial_seed(7, 1, 2, 4, 4),
            derive_trial_seed(7, 2, 2, 3, 4),
            derive_trial_seed(8, 1, 2, 3, 4),
        }
        assert a not in neighbours and len(neighbours) == 4


class TestRunTrial:
    def test_two_oscillator_synchronizes(self):
        cfg = ExperimentConfig(
            n_grid=(2,), p_grid=(1.0,), trials=1, step=0.01, horizon=50.0
        )
        record = run_trial(2, 1.0, 0.0, 123, cfg)
        assert record.connected and record.phase_sync and record.freq_sync
        assert record.final_r == pytest.approx(1.0, abs=1e-6)

    def test_empty_graph_decoupled_oscillators(self):
        # p small enough that no edge is drawn: zero velocities everywhere
        # (frequency sync) but frozen non-constant phases (no phase sync).
        cfg = ExperimentConfig(
            n_grid=(3,), p_grid=(1e-15,), trials=1, step=0.1, horizon=5.0
        )
        record = run_trial(3, 1e-15, 0.0, 7, cfg)
        assert not record.connected
        assert record.freq_sync
        assert not record.phase_sync
        assert record.final_freq_spread == 0.0

    def test_deterministic(self):
        cfg = ExperimentConfig(
            n_grid=(8,), p_grid=(0.6,), trials=1, step=0.05, horizon=2.0
        )
        a = run_trial(8, 0.6, 0.1, 99, cfg)
        b = run_trial(8, 0.6, 0.1, 99, cfg)
        assert strip_timing(a) == strip_timing(b)


class TestPhaseDiagram:
    def test_single_cell_matches_run_trial(self):
        cfg = ExperimentConfig(
            n_grid=(2,), p_grid=(1.0,), beta_grid=(0.0,), trials=1,
            master_seed=3, step=0.01, horizon=50.0,
        )
        cells, records = run_phase_diagram(cfg)
        assert len(cells) == 1 and len(records) == 1
        seed = derive_trial_seed(3, 0, 0, 0, 0)
        direct = run_trial(2, 1.0, 0.0, seed, cfg)
        assert strip_timing(records[0]) == dataclasses.replace(
            strip_timing(direct), trial=0
        )
        assert cells[0].phase_sync_fraction == float(direct.phase_sync)

    def test_fraction_accounting(self):
        cfg = ExperimentConfig(
            n_grid=(4,), p_grid=(0.5, 1.0), beta_grid=(0.0,), trials=5,
            master_seed=1, step=0.05, horizon=5.0,
        )
        cells, records = run_phase_diagram(cfg)
        assert len(records) == 10
        for cell in cells:
            for fraction in (cell.freq_sync_fraction, cell.phase_sync_fraction):
                assert (fraction * cell.trials) == round(fraction * cell.trials)

    def test_worker_count_does_not_change_output(self):
        base = dict(
            n_grid=(3, 5), p_grid=(1.0,), beta_grid=(0.0, 0.1), trials=2,
            master_seed=11, step=0.05, horizon=2.0,
        )
        cells1, records1 = run_phase_diagram(ExperimentConfig(**base, threads=1))
        cells2, records2 = run_phase_diagram(ExperimentConfig(**base, threads=2))
        assert cells1 == cells2
        assert [strip_timing(r) for r in records1] == [strip_timing(r) for r in records2]

    def test_connectivity_sanity_above_threshold(self):
        # Well above 4 ln(n)/n nearly every sample is connected.
        n = 100
        p = 4 * math.log(n) / n
        cfg = ExperimentConfig(
            n_grid=(n,), p_grid=(p,), beta_grid=(0.0,), trials=40,
            master_seed=2, step=0.5, horizon=1.0,
        )
        _, records = run_phase_diagram(cfg)
        disconnected = sum(not r.connected for r in records)
        assert disconnected / len(records) <= 0.05


class TestConvergenceStudy:
    def test_fixed_point_when_mesh_matches(self):
        # Constant initial profile: every system sits at the same fixed point.
        rows = run_convergence_study(
            [64], 64, trials=2, horizon=1.0, step=0.01,
            eta="linear", eta_params={"scale": 0.0, "offset": 0.3},
        )
        assert rows[0].median_linf <= 1e-8
        assert rows[0].ads_linf <= 1e-8

    def test_error_decreases_with_n(self):
        rows = run_convergence_study(
            [16, 32, 64], 256, trials=3, horizon=0.5, step=0.005
        )
        medians = [r.median_linf for r in rows]
        assert medians[0] > medians[1] > medians[2]
        assert rows[0].ads_linf / rows[1].ads_linf >= 1.5
        assert rows[1].ads_linf / rows[2].ads_linf >= 1.5

    def test_mesh_compatibility_enforced(self):
        with pytest.raises(ValueError, match="multiple"):
            run_convergence_study([48], 64, trials=1)


class TestEmitCsv:
    def test_empty_records_write_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv([], path)
        assert path.read_text().splitlines() == [TRIAL_HEADER]

    def test_single_record(self, tmp_path):
        cfg = ExperimentConfig(n_grid=(2,), p_grid=(1.0,), trials=1, step=0.1, horizon=1.0)
        record = dataclasses.replace(run_trial(2, 1.0, 0.0, 5, cfg), trial=0)
        path = tmp_path / "one.csv"
        emit_csv([record], path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0] == TRIAL_HEADER
        row = lines[1].split(",")
        assert row[0] == "2" and row[3] == "0" and row[4] == "5"
        assert row[5] in "01" and row[6] in "01" and row[7] in "01"

    def test_rows_sorted_and_formatted(self, tmp_path):
        records = []
        for n, p, trial, r in [(4, 1.0, 1, 0.123456789123), (2, 0.5, 0, 1 / 3)]:
            records.append(
                dataclasses.replace(
                    run_trial(2, 1.0, 0.0, 1, ExperimentConfig(
                        n_grid=(2,), p_grid=(1.0,), trials=1, step=0.1, horizon=1.0
                    )),
                    n=n, p=p, trial=trial, final_r=r,
                )
            )
        path = tmp_path / "sorted.csv"
        emit_csv(records, path)
        lines = path.read_text().splitlines()
        assert lines[1].startswith("2,0.5")
        assert lines[2].startswith("4,1")
        assert "0.333333333" in lines[1]  # nine significant digits
        assert "0.123456789" in lines[2]

    def test_grid_schema(self, tmp_path):
        cell = GridCell(n=10, p=0.5, beta=0.0, freq_sync_fraction=1.0,
                        phase_sync_fraction=0.9, trials=10)
        path = tmp_path / "grid.csv"
        emit_csv([cell], path)
        lines = path.read_text().splitlines()
        assert lines[0] == GRID_HEADER
        assert lines[1] == "10,0.5,0,1,0.9,10"

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            emit_csv([], tmp_path / "missing" / "file.csv")
