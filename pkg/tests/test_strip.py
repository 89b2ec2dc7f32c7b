"""Flat-boundary strip oracle."""

import numpy as np
import pytest

from dtnlab import InputError, half_plane_kernel, strip_kernel


@pytest.fixture(scope="module")
def strip():
    return strip_kernel(lx=8.0, height=4.0, h=1.0 / 16.0)


def test_half_plane_formula():
    assert half_plane_kernel(1.0) == pytest.approx(1.0 / np.pi)
    assert half_plane_kernel(2.0) == pytest.approx(1.0 / (4.0 * np.pi))


def test_strip_kernel_positive_and_even(strip):
    mask = np.abs(strip.s) > 0.2
    assert (strip.K[mask] > 0.0).all()
    # evenness: K(s) ~ K(-s)
    for sep in (0.5, 1.0, 1.5):
        kp = strip.K[np.argmin(np.abs(strip.s - sep))]
        km = strip.K[np.argmin(np.abs(strip.s + sep))]
        assert kp == pytest.approx(km, rel=1e-10)


def test_strip_matches_half_plane_midrange(strip):
    got = strip.at(1.0)
    assert got == pytest.approx(1.0 / np.pi, rel=0.10)


def test_strip_drift_vanishes(strip):
    assert abs(strip.drift) <= 1e-8


def test_height_doubling_gate():
    a = strip_kernel(lx=8.0, height=4.0, h=1.0 / 16.0)
    b = strip_kernel(lx=8.0, height=8.0, h=1.0 / 16.0)
    assert abs(a.at(1.0) - b.at(1.0)) / b.at(1.0) <= 0.05


def test_dimension_validation():
    with pytest.raises(InputError):
        strip_kernel(lx=8.3, height=4.0, h=1.0 / 16.0)
    with pytest.raises(InputError):
        strip_kernel(lx=8.0, height=0.2, h=1.0 / 16.0)
