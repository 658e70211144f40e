"""Sweep drivers: shapes of the generated datasets and their determinism."""

import math

import numpy as np
import pytest

from oatsim import (
    X_AXIS,
    classical_fi,
    probe_fidelity,
    pure_family,
    sweep_alpha,
    sweep_dalpha,
    sweep_sigma,
    apply_oat,
    build_ops,
    make_coherent_state,
)

THETA_PROBE = 0.02 * math.pi
SIGMA_GRID = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0]
THETA_LIST = [0.02 * math.pi, 0.07 * math.pi, 0.14 * math.pi]


class TestSweepAlpha:
    def test_untwisted_point(self):
        result = sweep_alpha(40, [0.0], jobs=1)
        rec = result.records[0]
        assert abs(rec.metrics["qfi_opt"] - 40.0) < 1e-8
        assert abs(rec.metrics["inv_xi2_opt"] - 1.0) < 1e-6

    def test_heisenberg_point(self):
        rec = sweep_alpha(100, [math.pi / 2], jobs=1).records[0]
        assert abs(rec.metrics["qfi_bs"] - 10000.0) / 10000.0 < 1e-6

    def test_full_twist_point(self):
        rec = sweep_alpha(100, [math.pi], jobs=1).records[0]
        assert abs(rec.metrics["qfi_opt"] - 100.0) / 100.0 < 1e-6

    def test_anatomy(self):
        grid = [0.02, 0.05, 0.1, 0.3, 0.7, 1.0, 1.2, math.pi / 2, 2.2, 2.9]
        result = sweep_alpha(100, grid, jobs=1)
        by_alpha = {rec.grid_value: rec.metrics for rec in result.records}
        # squeezing beats the coherent state only at small twisting
        assert by_alpha[0.02]["inv_xi2_opt"] > 1.0
        assert by_alpha[0.05]["inv_xi2_opt"] > 1.0
        assert by_alpha[1.0]["inv_xi2_opt"] < 1.0
        # wide plateau near half the Heisenberg value
        for alpha in (0.3, 0.7, 1.0, 1.2):
            for key in ("qfi_opt", "qfi_bs", "qfi_mzi"):
                assert abs(by_alpha[alpha][key] - 5000.0) / 5000.0 < 0.10
        # beam-splitter peak and Mach-Zehnder dip at the cat point
        peak = by_alpha[math.pi / 2]
        assert abs(peak["qfi_bs"] - 10000.0) / 10000.0 < 1e-6
        assert peak["qfi_mzi"] < peak["qfi_bs"] / 5.0

    def test_chain_invariant_per_record(self):
        result = sweep_alpha(30, [0.1, 0.8, 2.0], jobs=1)
        for rec in result.records:
            assert rec.metrics["fi_bs"] <= rec.metrics["qfi_bs"] * (1 + 1e-6)
            assert rec.metrics["fi_mzi"] <= rec.metrics["qfi_mzi"] * (1 + 1e-6)
            assert rec.metrics["qfi_bs"] <= rec.metrics["qfi_opt"] * (1 + 1e-6)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            sweep_alpha(10, [0.5, 0.2])
        with pytest.raises(ValueError):
            sweep_alpha(10, [0.5, 4.0])
        with pytest.raises(ValueError):
            sweep_alpha(10, [])

    def test_deterministic(self):
        first = sweep_alpha(20, [0.1, 0.9], jobs=1)
        second = sweep_alpha(20, [0.1, 0.9], jobs=1)
        for a, b in zip(first.records, second.records):
            assert a.grid_value == b.grid_value
            assert a.metrics == b.metrics

    def test_parallel_matches_serial(self):
        serial = sweep_alpha(16, [0.1, 0.5, 1.0, 2.0], jobs=1)
        parallel = sweep_alpha(16, [0.1, 0.5, 1.0, 2.0], jobs=2)
        for a, b in zip(serial.records, parallel.records):
            assert a.metrics == b.metrics


class TestSweepSigma:
    def test_perfect_detector_limit(self):
        result = sweep_sigma(60, 1.0, [THETA_PROBE], [1e-6, 1.0], jobs=1)
        assert abs(result.records[0].metrics["fi_ratio"] - 1.0) < 1e-6

    def test_monotone_in_sigma_per_theta(self):
        result = sweep_sigma(100, 1.0, THETA_LIST, SIGMA_GRID, jobs=1)
        for theta in THETA_LIST:
            ratios = [
                rec.metrics["fi_ratio"]
                for rec in result.records
                if rec.metrics["theta"] == theta
            ]
            assert all(a >= b - 1e-9 for a, b in zip(ratios, ratios[1:]))

    def test_fit_and_references_present(self):
        result = sweep_sigma(100, 1.0, THETA_LIST, SIGMA_GRID, jobs=1)
        prefactor, exponent = result.fit
        # frozen honest values for this configuration; the curve decays
        # noticeably slower than an inverse square here
        assert abs(exponent + 1.5007) < 0.02
        assert abs(prefactor - 0.0594) / 0.0594 < 0.02
        assert result.metadata["snl_reference"][100] == pytest.approx(0.04)
        assert result.metadata["snl_reference"][300] == pytest.approx(4 / 300)
        assert result.metadata["snl_reference"][1000] == pytest.approx(0.004)

    def test_prefactor_insensitive_to_n(self):
        fit100 = sweep_sigma(100, 1.0, THETA_LIST, SIGMA_GRID, jobs=1).fit
        fit300 = sweep_sigma(300, 1.0, THETA_LIST, SIGMA_GRID, jobs=1).fit
        assert abs(fit300[0] - fit100[0]) / fit100[0] < 0.30


class TestSweepDalpha:
    def test_quiet_limit_matches_prediction(self):
        rec = sweep_dalpha(100, 1.0, THETA_PROBE, [0.0], jobs=1).records[0]
        assert abs(rec.metrics["rel_dev"]) < 0.10
        assert rec.metrics["fi_predicted"] == 2500.0

    def test_prediction_column_values(self):
        result = sweep_dalpha(100, 1.0, THETA_PROBE, [0.0, 0.1], jobs=1)
        assert result.records[1].metrics["fi_predicted"] == pytest.approx(1443.3756729740645)

    def test_simulated_monotone_nonincreasing(self):
        result = sweep_dalpha(100, 1.0, THETA_PROBE, [0.0, 0.01, 0.03, 0.1, 0.3], jobs=1)
        values = [rec.metrics["fi_simulated"] for rec in result.records]
        assert all(a >= b * (1 - 0.02) for a, b in zip(values, values[1:]))

    def test_frozen_plateau_values(self):
        """Exact mixture information sits well below the smooth estimate."""
        result = sweep_dalpha(100, 1.0, THETA_PROBE, [0.03, 0.1], jobs=1)
        sim = {rec.grid_value: rec.metrics["fi_simulated"] for rec in result.records}
        assert sim[0.03] == pytest.approx(1247.33, rel=5e-3)
        assert sim[0.1] == pytest.approx(785.0, rel=5e-3)

    def test_grid_bounds(self):
        with pytest.raises(ValueError):
            sweep_dalpha(10, 1.0, THETA_PROBE, [0.5, 1.5])


class TestProbeFidelity:
    def test_tiny_increment_full_overlap(self):
        result = probe_fidelity(40, 1.0, X_AXIS, THETA_PROBE, [1e-9, 1e-3], jobs=1)
        assert result.records[0].metrics["fidelity"] == pytest.approx(1.0, abs=1e-9)

    def test_local_estimate_matches_information(self, ops100, plateau_state_100):
        result = probe_fidelity(100, 1.0, X_AXIS, THETA_PROBE, [1e-3], jobs=1)
        estimate = result.records[0].metrics["fi_local_estimate"]
        reference = classical_fi(pure_family(plateau_state_100, ops100, X_AXIS), THETA_PROBE)
        assert abs(estimate - reference) / reference < 0.05

    def test_plateau_more_fragile_than_short_twist(self):
        plateau = probe_fidelity(100, 1.0, X_AXIS, THETA_PROBE, [0.005], jobs=1)
        gentle = probe_fidelity(100, 0.01, X_AXIS, THETA_PROBE, [0.005], jobs=1)
        assert (
            plateau.records[0].metrics["fidelity"]
            < gentle.records[0].metrics["fidelity"]
        )

    def test_requires_positive_grid(self):
        with pytest.raises(ValueError):
            probe_fidelity(10, 1.0, X_AXIS, 0.1, [0.0, 0.1])


class TestResultShape:
    def test_metadata_and_columns(self):
        result = sweep_alpha(12, [0.2, 0.4], theta_probe=0.05, jobs=1)
        assert result.metadata["version"]
        assert result.metadata["params"]["n_particles"] == 12
        assert result.column("alpha") == [0.2, 0.4]
        assert len(result.column("qfi_opt")) == 2

    def test_records_expose_context(self):
        rec = sweep_alpha(12, [0.2], jobs=1).records[0]
        data = rec.as_dict("alpha")
        assert data["alpha"] == 0.2
        assert data["n_particles"] == 12
        assert "qfi_bs" in data
