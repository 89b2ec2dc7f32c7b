"""Dirichlet solves: linear path, policy iteration, Green and harmonic measure."""

import numpy as np
import pytest

from dtnlab import (BoundaryCurve, BulkProblem, OperatorSpec, SpecError,
                    build_boundary_grid, build_grid, compute_green,
                    compute_harmonic_measure)
from dtnlab.bulk import sample_field


@pytest.fixture(scope="module")
def problem(disk_grid, disk_bgrid):
    return BulkProblem(OperatorSpec.laplacian(), disk_grid, disk_bgrid)


def test_spec_validation():
    with pytest.raises(SpecError):
        OperatorSpec(kind="divergence", lam=2.0, Lam=1.0, label="bad")
    with pytest.raises(SpecError):
        OperatorSpec(kind="divergence", lam=1.0, Lam=2.0, label="bad")
    with pytest.raises(SpecError):
        OperatorSpec(kind="bellman_min", lam=1.0, Lam=2.0, label="bad")


def test_harmonic_polynomial_is_reproduced(problem, disk_grid, disk_bgrid):
    # u = x^2 - y^2 is harmonic; the discrete solution should match it
    phi = disk_bgrid.points[:, 0] ** 2 - disk_bgrid.points[:, 1] ** 2
    sol = problem.solve(phi)
    exact = disk_grid.coords[:, 0] ** 2 - disk_grid.coords[:, 1] ** 2
    assert np.abs(sol.values - exact).max() <= 2e-2
    assert sol.residual <= 1e-10


def test_maximum_principle(problem, disk_bgrid, rng):
    phi = rng.normal(size=disk_bgrid.n)
    sol = problem.solve(phi)
    assert sol.check_maximum_principle()


def test_constant_data_gives_constant_solution(problem, disk_bgrid):
    sol = problem.solve(np.ones(disk_bgrid.n))
    assert np.allclose(sol.values, 1.0, atol=1e-10)


def test_solve_many_matches_single_solves(problem, disk_bgrid, rng):
    Phi = rng.normal(size=(disk_bgrid.n, 3))
    U = problem.solve_many(Phi)
    for k in range(3):
        sol = problem.solve(Phi[:, k])
        assert np.allclose(U[:, k], sol.values, atol=1e-12)


def test_policy_iteration_converges(disk_grid, disk_bgrid, rng):
    spec = OperatorSpec.pucci("minus", 1.0, 2.0)
    prob = BulkProblem(spec, disk_grid, disk_bgrid)
    phi = np.cos(2.0 * np.pi * disk_bgrid.s / disk_bgrid.curve.perimeter)
    sol = prob.solve(phi)
    assert sol.policy is not None
    assert sol.iterations <= 50
    assert sol.residual <= 1e-8 / disk_grid.h ** 2
    assert sol.check_maximum_principle()


def test_pucci_ordering(disk_grid, disk_bgrid, rng):
    phi = rng.normal(size=disk_bgrid.n)
    lo = BulkProblem(OperatorSpec.pucci("minus", 1.0, 2.0),
                     disk_grid, disk_bgrid).solve(phi)
    hi = BulkProblem(OperatorSpec.pucci("plus", 1.0, 2.0),
                     disk_grid, disk_bgrid).solve(phi)
    assert (lo.values <= hi.values + 1e-10).all()


def test_green_positive_and_symmetric_enough(problem, disk_grid):
    # positivity plus approximate symmetry G(x,y) ~ G(y,x)
    ks = int(np.argmin(np.linalg.norm(disk_grid.coords
                                      - np.array([0.3, 0.0]), axis=1)))
    kt = int(np.argmin(np.linalg.norm(disk_grid.coords
                                      - np.array([-0.2, 0.4]), axis=1)))
    Gs, ks = compute_green(problem, ks)
    Gt, kt = compute_green(problem, kt)
    assert Gs.min() >= 0.0
    assert Gs[kt] == pytest.approx(Gt[ks], rel=5e-2)


def test_disk_green_center_closed_form(problem, disk_grid):
    ks = int(np.argmin(np.linalg.norm(disk_grid.coords
                                      - np.array([0.5, 0.0]), axis=1)))
    G, ks = compute_green(problem, ks)
    r = float(np.linalg.norm(disk_grid.coords[ks]))
    got = sample_field(disk_grid, G, np.zeros(2))
    assert got == pytest.approx(-np.log(r) / (2.0 * np.pi), rel=5e-2)


def test_harmonic_measure_center_is_arc_fraction(problem):
    P = problem.bgrid.curve.perimeter
    omega = compute_harmonic_measure(problem, np.zeros(2), 0.0, P / 4.0)
    assert omega == pytest.approx(0.25, abs=0.01)


def test_harmonic_measure_full_boundary_is_one(problem):
    P = problem.bgrid.curve.perimeter
    omega = compute_harmonic_measure(problem, np.array([0.2, 0.1]),
                                     0.0, P * (1.0 - 1e-9))
    assert omega == pytest.approx(1.0, abs=0.02)
