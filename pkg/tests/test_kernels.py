"""Numba fast path vs pure-numpy fallback equivalence."""

import subprocess
import sys

import numpy as np

from dtnlab import _kernels
from dtnlab._kernels import (_points_in_polygon_np, _reconstruct_all_np,
                             _tv_rows_np)


def _random_problem(rng, n=32):
    K = np.abs(rng.normal(size=(n, n)))
    np.fill_diagonal(K, 0.0)
    D = np.abs(rng.normal(size=(n, n))) + 0.1
    np.fill_diagonal(D, 0.0)
    L = rng.normal(size=(n, n))
    w = np.full(n, 0.2)
    phi = rng.normal(size=n)
    dphi = rng.normal(size=n)
    c = rng.normal(size=n)
    b = rng.normal(size=n)
    return K, L, D, w, phi, dphi, c, b


def test_points_in_polygon_paths_agree(rng):
    t = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    vx = np.cos(t) * (1.0 + 0.2 * np.cos(3.0 * t))
    vy = np.sin(t) * (1.0 + 0.2 * np.cos(3.0 * t))
    px = rng.uniform(-1.5, 1.5, size=500)
    py = rng.uniform(-1.5, 1.5, size=500)
    fast = _kernels.points_in_polygon(px, py, vx, vy)
    ref = _points_in_polygon_np(px, py, vx, vy)
    assert np.array_equal(fast, ref)


def test_tv_rows_paths_agree(rng):
    K, L, D, w, *_ = _random_problem(rng)
    got = _kernels.tv_rows(K[0], K[1], D[0], D[1], w, 0.5)
    ref = _tv_rows_np(K[0], K[1], D[0], D[1], w, 0.5)
    np.testing.assert_allclose(got, ref, rtol=1e-13)


def test_reconstruct_all_paths_agree(rng):
    K, L, D, w, phi, dphi, c, b = _random_problem(rng)
    got = _kernels.reconstruct_all(K, L, D, w, phi, dphi, c, b, 0.7)
    ref = _reconstruct_all_np(K, L, D, w, phi, dphi, c, b, 0.7)
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-12)


def test_fallback_flag_disables_numba():
    code = (
        "import os; os.environ['DTNLAB_DISABLE_NUMBA'] = '1';\n"
        "from dtnlab import _kernels\n"
        "assert _kernels.NUMBA_DISABLED\n"
        "assert _kernels.tv_rows is _kernels._tv_rows_np\n"
        "assert _kernels.reconstruct_all is _kernels._reconstruct_all_np\n"
    )
    subprocess.run([sys.executable, "-c", code], check=True)


def test_fallback_full_pipeline_matches(tmp_path):
    # decompose + reconstruct on a tiny disk under both paths
    code = (
        "import numpy as np\n"
        "from dtnlab import (BoundaryCurve, DtnOperator, OperatorSpec,\n"
        "                    build_boundary_grid, build_grid, decompose,\n"
        "                    reconstruct_action)\n"
        "curve = BoundaryCurve.circle(1.0)\n"
        "grid = build_grid(curve, 1.0 / 16.0)\n"
        "bgrid = build_boundary_grid(curve, 32)\n"
        "op = DtnOperator(OperatorSpec.laplacian(), grid, bgrid)\n"
        "dec = decompose(op.matrix())\n"
        "phi = np.cos(bgrid.s)\n"
        "np.save(r'{out}', reconstruct_action(dec, phi))\n"
    )
    a = tmp_path / "fast.npy"
    b = tmp_path / "fallback.npy"
    subprocess.run([sys.executable, "-c", code.format(out=a)], check=True)
    import os
    env = dict(os.environ, DTNLAB_DISABLE_NUMBA="1")
    subprocess.run([sys.executable, "-c", code.format(out=b)], check=True,
                   env=env)
    np.testing.assert_allclose(np.load(a), np.load(b), rtol=1e-12,
                               atol=1e-14)
