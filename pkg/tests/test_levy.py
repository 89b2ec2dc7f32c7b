"""Decomposition: reconstruction identity, bumps, TV distance, masses."""

import numpy as np
import pytest

from dtnlab import InputError, ResolutionError, bump_mass, decompose, \
    reconstruct_action, tv_distance
from dtnlab.dtn import random_smooth
from dtnlab.levy import (ball_bump, drift_cutoff, kernel_mass,
                         plateau_profile, ring_bump, smoothstep)


def test_smoothstep_endpoints_and_monotone():
    u = np.linspace(-0.5, 1.5, 201)
    v = smoothstep(u)
    assert v[0] == 0.0 and v[-1] == 1.0
    assert (np.diff(v) >= -1e-15).all()
    # C^2: first and second derivative vanish at the ends
    eps = 1e-5
    assert smoothstep(eps) <= 1e-9
    assert 1.0 - smoothstep(1.0 - eps) <= 1e-9


def test_plateau_profile_brackets_band():
    d = np.linspace(0.0, 3.0, 301)
    prof = plateau_profile(d, 1.0, 2.0, 0.5, 2.5)
    assert np.allclose(prof[(d >= 1.0) & (d <= 2.0)], 1.0)
    assert np.allclose(prof[(d <= 0.5) | (d >= 2.5)], 0.0)
    assert ((0.0 <= prof) & (prof <= 1.0)).all()


def test_drift_cutoff_shape():
    d = np.array([0.0, 0.5, 1.0, 1.05, 1.1, 2.0])
    eta = drift_cutoff(d, 1.0, 0.1)
    assert np.allclose(eta[:3], 1.0)
    assert eta[3] < 1.0
    assert np.allclose(eta[4:], 0.0)


def test_decompose_fields(disk_dec, disk_matrix):
    n = disk_matrix.bgrid.n
    assert disk_dec.K.shape == (n, n)
    assert np.allclose(np.diag(disk_dec.K), 0.0)
    assert np.allclose(disk_dec.c, disk_matrix.row_sums())
    assert disk_dec.r0 == pytest.approx(
        disk_matrix.bgrid.curve.perimeter / 4.0)


def test_invalid_r0_rejected(disk_matrix):
    P = disk_matrix.bgrid.curve.perimeter
    with pytest.raises(InputError):
        decompose(disk_matrix, r0=0.6 * P)


def test_reconstruction_identity(disk_dec, disk_matrix, rng):
    for _ in range(5):
        phi = random_smooth(disk_matrix.bgrid, rng)
        ref = disk_matrix.apply(phi)
        got = reconstruct_action(disk_dec, phi)
        assert np.abs(got - ref).max() <= 1e-12 * np.abs(ref).max()


def test_r0_change_invariance(disk_matrix, rng):
    dec_a = decompose(disk_matrix)
    dec_b = decompose(disk_matrix, r0=0.6 * dec_a.r0)
    phi = random_smooth(disk_matrix.bgrid, rng)
    a = reconstruct_action(dec_a, phi)
    b = reconstruct_action(dec_b, phi)
    assert np.abs(a - b).max() <= 1e-12 * np.abs(a).max()
    assert not np.allclose(dec_a.b, dec_b.b)  # drift shifts, action doesn't


def test_disk_kernel_matches_circle_formula(disk_dec):
    d, K = disk_dec.kernel_samples(min_sep=0.5, max_sep=np.pi)
    exact = 1.0 / (4.0 * np.pi * np.sin(d / 2.0) ** 2)
    assert np.max(np.abs(K - exact) / exact) <= 0.10


def test_tv_distance_symmetry_and_positivity(disk_dec):
    delta = 0.5
    assert tv_distance(disk_dec, 0, 5, delta) == pytest.approx(
        tv_distance(disk_dec, 5, 0, delta))
    assert tv_distance(disk_dec, 0, 0, delta) == 0.0
    assert tv_distance(disk_dec, 0, 5, delta) > 0.0


def test_tv_distance_needs_resolution(disk_dec):
    with pytest.raises(ResolutionError):
        tv_distance(disk_dec, 0, 1, disk_dec.bgrid.spacing)


def test_ring_bump_brackets_ring(disk_bgrid):
    r = 0.5
    lower = ring_bump(disk_bgrid, 0, r, "lower")
    upper = ring_bump(disk_bgrid, 0, r, "upper")
    d = disk_bgrid.curve.geodesic_distance(0.0, disk_bgrid.s)
    inside = (d >= r) & (d <= 2.0 * r)
    assert (lower <= upper + 1e-15).all()
    assert (lower[~inside] <= 1e-15).all()  # lower vanishes off the ring
    assert np.allclose(upper[inside & (d >= 0.76 * r) & (d <= 2.24 * r)],
                       upper[inside].max())


def test_ball_bump_sides(disk_bgrid):
    r = 0.4
    center = np.pi
    lower = ball_bump(disk_bgrid, center, r, "lower")
    upper = ball_bump(disk_bgrid, center, r, "upper")
    d = disk_bgrid.curve.geodesic_distance(center, disk_bgrid.s)
    assert (lower <= upper + 1e-15).all()
    assert (lower[d >= r] <= 1e-15).all()
    assert (upper[d <= r] >= 1.0 - 1e-15).all()


def test_bump_mass_orders_and_brackets_kernel_mass(disk_matrix, disk_dec):
    r = 0.8
    lo = bump_mass(disk_matrix, 0, "ring", r, "lower")
    hi = bump_mass(disk_matrix, 0, "ring", r, "upper")
    direct = kernel_mass(disk_dec, 0, r, 2.0 * r)
    assert 0.0 < lo <= hi
    assert lo <= direct * 1.05
    assert direct <= hi * 1.05


def test_bump_mass_separation_precondition(disk_matrix):
    with pytest.raises(InputError):
        bump_mass(disk_matrix, 0, "ring", 0.05, "lower")


def test_bump_mass_ball_needs_center(disk_matrix):
    with pytest.raises(InputError):
        bump_mass(disk_matrix, 0, "ball", 0.3, "lower")


def test_export_csv_columns(tmp_path, disk_dec):
    kp = tmp_path / "k.csv"
    dp = tmp_path / "d.csv"
    disk_dec.export_kernel_csv(str(kp))
    disk_dec.export_drift_csv(str(dp))
    assert kp.read_text().splitlines()[0] == "s_i,s_j,d,chord,K,K_d2"
    assert dp.read_text().splitlines()[0] == "s_i,b,c"
