"""Estimate checks: fits, oracles, and report plumbing at small scale."""

import json

import numpy as np
import pytest

from dtnlab import (BoundaryCurve, BulkProblem, EstimateReport, InputError,
                    OperatorSpec, build_boundary_grid, decompose,
                    fit_power_law, verify_annuli, verify_barrier,
                    verify_flat_and_disk_oracles, verify_green_suite,
                    verify_kernel_bounds, verify_reconstruction,
                    verify_ring_and_lower_bounds, verify_tv_and_drift_holder)
from dtnlab.estimates import disk_ring_oracle, verify_drift_bounds
from dtnlab.strip import strip_kernel


def test_fit_power_law_recovers_exact_law():
    t = np.array([0.1, 0.2, 0.4, 0.8])
    y = 3.0 * t ** -1.5
    fit = fit_power_law(t, y)
    assert fit.slope == pytest.approx(-1.5, abs=1e-12)
    assert fit.prefactor == pytest.approx(3.0, rel=1e-12)
    assert fit.residual <= 1e-12


def test_fit_power_law_validation():
    with pytest.raises(InputError):
        fit_power_law([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])  # too few
    with pytest.raises(InputError):
        fit_power_law([1.0, 2.0, 3.0, -4.0], [1.0, 2.0, 3.0, 4.0])


def test_kernel_bounds_on_disk(disk_dec):
    rec = verify_kernel_bounds(disk_dec)
    assert rec.passed
    assert rec.values["slope"] == pytest.approx(-2.0, abs=0.2)
    assert rec.values["c1"] > 0.0


def test_drift_bounds_uniform_mode(disk_dec):
    rec = verify_drift_bounds([disk_dec, disk_dec])
    assert rec.passed


def test_drift_bounds_disk_mode_fails_without_halving(disk_dec):
    rec = verify_drift_bounds([disk_dec, disk_dec], disk_symmetric=True)
    assert not rec.passed  # identical levels cannot halve


def test_reconstruction_check(disk_matrix):
    rec = verify_reconstruction(disk_matrix, n_data=5)
    assert rec.passed
    assert rec.values["max_rel_err"] <= 1e-12


def test_ring_radius_threshold_guard(disk_matrix):
    big = disk_matrix.bgrid.curve.annuli_threshold * 1.5
    with pytest.raises(InputError):
        verify_ring_and_lower_bounds(disk_matrix, disk_matrix, [0],
                                     [big, big * 1.1, big * 1.2, big * 1.3])


def test_ring_masses_on_disk(disk_matrix):
    # 64 boundary nodes resolve the masses but not the fitted slope, so
    # only positivity, ordering, and oracle agreement are asserted here;
    # the slope gate runs at acceptance resolution
    bgrid = disk_matrix.bgrid
    radii = [0.3, 0.35, 0.4, 0.45]
    rec = verify_ring_and_lower_bounds(
        disk_matrix, disk_matrix, [0, bgrid.n // 2], radii,
        oracle=lambda r, side: disk_ring_oracle(bgrid, r, side),
        oracle_rtol=0.25)
    lower = rec.values["ring_mass_lower"]
    upper = rec.values["ring_mass_upper"]
    assert min(lower) > 0.0
    assert all(lo <= hi for lo, hi in zip(lower, upper))
    assert rec.values["oracle_max_rel_err"] <= 0.25


def test_disk_ring_oracle_orders(disk_bgrid):
    lo = disk_ring_oracle(disk_bgrid, 0.5, "lower")
    hi = disk_ring_oracle(disk_bgrid, 0.5, "upper")
    assert 0.0 < lo < hi


def test_tv_holder_on_disk(disk_dec):
    rec = verify_tv_and_drift_holder(disk_dec, deltas=[0.6, 1.2],
                                     n_base=4, seed=0)
    assert all(p["alpha_hat"] > 0.0 for p in rec.values["per_delta"])


def test_green_suite_small_disk(disk_grid, disk_bgrid):
    problem = BulkProblem(OperatorSpec.laplacian(), disk_grid, disk_bgrid)
    rec = verify_green_suite(problem, n_pairs=20, disk_exact=True)
    assert rec.passed
    assert rec.values["ratio_min"] >= 0.01
    assert rec.values["quarter_arc_measure"] == pytest.approx(0.25, abs=0.02)


def test_flat_and_disk_oracles_small(disk_dec):
    a = strip_kernel(lx=8.0, height=4.0, h=1.0 / 16.0)
    b = strip_kernel(lx=8.0, height=8.0, h=1.0 / 16.0)
    rec = verify_flat_and_disk_oracles(a, b, disk_dec, rtol=0.12,
                                       height_gate=0.05)
    assert rec.values["strip_rel_err"] <= 0.12
    assert rec.values["disk_max_rel_err"] <= 0.12


def test_barrier_closed_form():
    rec = verify_barrier(lam=1.0, Lam=2.0)
    assert rec.passed
    assert rec.values["max_equality_err"] <= 1e-10
    assert rec.values["limit_at_half_b"] == pytest.approx(-2.0, abs=1e-6)
    assert rec.values["epsilon0"] == 1.0
    assert rec.values["a0"] == pytest.approx(1.0 / 2.5)


def test_barrier_scales_with_ellipticity():
    rec = verify_barrier(lam=0.5, Lam=3.0, n_dim=2, b_len=2.0)
    assert rec.passed
    assert rec.values["limit_at_half_b"] == pytest.approx(-1.0, abs=1e-6)


def test_annuli_multiple_curves(disk, ellipse, star):
    rec = verify_annuli([disk, ellipse, star],
                        ["circle", "ellipse", "star"])
    assert rec.passed
    for entry in rec.values["curves"]:
        assert entry["max_ratio"] <= 9.0 / 8.0


def test_report_serialization_roundtrip(disk_dec):
    rec = verify_kernel_bounds(disk_dec)
    report = EstimateReport(suite="unit", checks=[rec])
    payload = json.loads(report.to_json())
    assert payload["schema"] == 1
    assert payload["pass"] == report.passed
    assert payload["checks"][0]["name"] == rec.name
    assert payload["checks"][0]["pass"] == rec.passed
    # everything must be plain JSON types after round-trip
    assert json.dumps(payload)


def test_report_summary_lines(disk_dec):
    rec = verify_kernel_bounds(disk_dec)
    report = EstimateReport(suite="unit", checks=[rec])
    lines = report.summary_lines()
    assert len(lines) == 1
    assert lines[0].startswith("[PASS]" if rec.passed else "[FAIL]")
