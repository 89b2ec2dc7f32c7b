"""Named verification suites over a shared, lazily built workspace.

A Workspace caches the expensive artifacts (grids, D-to-N matrices,
decompositions, strip kernels) keyed by name so that suites sharing a
resolution reuse them.  Each suite function returns an EstimateReport;
run_suite dispatches by name, optionally running independent checks in
a thread pool and merging records deterministically by name.
"""

import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import estimates
from .bulk import build_grid
from .dtn import DtnOperator, check_gcp, check_minmax, check_sandwich, \
    random_smooth
from .errors import GridError, InputError
from .estimates import CheckRecord, EstimateReport
from .geometry import BoundaryCurve, build_boundary_grid
from .levy import decompose
from .solvers import BulkProblem, OperatorSpec
from .strip import strip_kernel


class Workspace:
    """Cache of grids, operators, and matrices shared across suites."""

    def __init__(self, cfg):
        self.cfg = cfg
        self._cache = {}
        # reentrant: builders recursively request their own dependencies
        self._lock = threading.RLock()

    def get(self, key, builder):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = builder()
            return self._cache[key]

    # -- geometry -------------------------------------------------------------

    def disk(self):
        return self.get("disk", lambda: BoundaryCurve.circle(1.0))

    def ellipse(self):
        k = self.cfg.knob
        return self.get("ellipse", lambda: BoundaryCurve.ellipse(
            k("ellipse_a"), k("ellipse_b")))

    # fallback lattice shifts tried in order when a spacing produces a
    # degenerate boundary cut at the preferred origin
    _ORIGIN_FALLBACKS = ((0.13, 0.41), (0.29, 0.17), (0.41, 0.07))

    def _robust_grid(self, curve, h, origin):
        for candidate in (tuple(origin),) + self._ORIGIN_FALLBACKS:
            try:
                return build_grid(curve, h, origin=candidate)
            except GridError:
                continue
        raise GridError(
            f"no non-degenerate lattice found for h={h} after origin shifts")

    def disk_grid(self, h):
        return self.get(("disk_grid", h),
                        lambda: self._robust_grid(self.disk(), h, (0.0, 0.0)))

    def ellipse_grid(self, h):
        origin = self.cfg.knob("ellipse_origin")
        return self.get(("ellipse_grid", h),
                        lambda: self._robust_grid(self.ellipse(), h, origin))

    def bgrid(self, curve_key, n):
        curve = self.disk() if curve_key == "disk" else self.ellipse()
        return self.get((curve_key, "bgrid", n),
                        lambda: build_boundary_grid(curve, n))

    # -- operators ------------------------------------------------------------

    def operator(self, curve_key, spec_key, h, n_b):
        def build():
            spec = self._spec(spec_key)
            grid = self.disk_grid(h) if curve_key == "disk" \
                else self.ellipse_grid(h)
            return DtnOperator(spec, grid, self.bgrid(curve_key, n_b))
        return self.get((curve_key, spec_key, h, n_b), build)

    def matrix(self, curve_key, spec_key, h, n_b):
        op = self.operator(curve_key, spec_key, h, n_b)
        return self.get((curve_key, spec_key, h, n_b, "matrix"), op.matrix)

    def decomposition(self, curve_key, spec_key, h, n_b):
        return self.get(
            (curve_key, spec_key, h, n_b, "dec"),
            lambda: decompose(self.matrix(curve_key, spec_key, h, n_b)))

    def _spec(self, spec_key):
        k = self.cfg.knob
        lam, Lam, alpha = k("lam"), k("Lam"), k("alpha")
        if spec_key == "laplacian":
            return OperatorSpec.laplacian()
        if spec_key == "div_holder":
            return OperatorSpec.divergence_holder(lam, Lam, alpha)
        if spec_key == "nondiv_holder":
            return OperatorSpec.nondivergence_holder(lam, Lam, alpha)
        if spec_key == "pucci_minus":
            return OperatorSpec.pucci("minus", lam, Lam)
        if spec_key == "pucci_plus":
            return OperatorSpec.pucci("plus", lam, Lam)
        if spec_key == "bellman_min":
            base = OperatorSpec.pucci("minus", lam, Lam)
            base.label = "bellman-min"
            return base
        raise InputError(f"unknown spec key {spec_key!r}")

    def strip(self, height):
        k = self.cfg.knob
        return self.get(("strip", height),
                        lambda: strip_kernel(k("strip_length"), height,
                                             k("strip_h")))


# -- suite bodies -------------------------------------------------------------

def _ring_nodes(n_b, count=4):
    return [int(k * n_b / count) for k in range(count)]


def suite_oracles(ws):
    k = ws.cfg.knob
    checks = []

    def flat_disk():
        dec = ws.decomposition("disk", "laplacian", k("disk_h"),
                               k("disk_boundary_nodes"))
        dec_c = ws.decomposition("disk", "laplacian", k("disk_h_coarse"),
                                 k("disk_boundary_nodes"))
        h1, h2 = k("strip_heights")
        return estimates.verify_flat_and_disk_oracles(
            ws.strip(h1), ws.strip(h2), dec, disk_dec_coarse=dec_c)

    def disk_ring():
        n_b = k("disk_fine_boundary_nodes")
        M = ws.matrix("disk", "laplacian", k("disk_h"), n_b)
        bgrid = ws.bgrid("disk", n_b)
        radii = list(k("ring_radii_fractions"))
        d0 = 2.0 * np.pi / 3.0
        ball_radii = [d0 * f for f in k("ball_radii_fractions")]
        return estimates.verify_ring_and_lower_bounds(
            M, M, _ring_nodes(n_b), radii,
            ball_cases=[(0, d0, ball_radii)],
            oracle=lambda r, side: estimates.disk_ring_oracle(bgrid, r, side),
            name="disk-ring-and-ball")

    def annuli():
        curves = [ws.disk(), ws.ellipse(), BoundaryCurve.star(0.15, 3)]
        return estimates.verify_annuli(curves, ["circle", "ellipse", "star"])

    checks = [("flat-and-disk-oracles", flat_disk),
              ("disk-ring-and-ball", disk_ring),
              ("annuli", annuli)]
    return checks


def suite_linear_estimates(ws):
    k = ws.cfg.knob
    h = k("ellipse_h")
    n_b = k("ellipse_boundary_nodes")

    def kernel_div():
        return estimates.verify_kernel_bounds(
            ws.decomposition("ellipse", "div_holder", h, n_b),
            ws.decomposition("ellipse", "div_holder", h / 2.0, n_b),
            name="kernel-bounds-divergence")

    def kernel_nondiv():
        return estimates.verify_kernel_bounds(
            ws.decomposition("ellipse", "nondiv_holder", h, n_b),
            ws.decomposition("ellipse", "nondiv_holder", h / 2.0, n_b),
            name="kernel-bounds-nondivergence")

    def drift_disk():
        decs = [ws.decomposition("disk", "laplacian", hh,
                                 k("drift_boundary_nodes"))
                for hh in (4.0 * k("drift_h"), 2.0 * k("drift_h"),
                           k("drift_h"))]
        return estimates.verify_drift_bounds(decs, disk_symmetric=True,
                                             name="drift-disk")

    def drift_ellipse():
        decs = [ws.decomposition("ellipse", "div_holder", hh, n_b)
                for hh in (2.0 * h, h, h / 2.0)]
        return estimates.verify_drift_bounds(decs, name="drift-ellipse")

    def reconstruction():
        return estimates.verify_reconstruction(
            ws.matrix("ellipse", "div_holder", h, n_b))

    return [("kernel-bounds-divergence", kernel_div),
            ("kernel-bounds-nondivergence", kernel_nondiv),
            ("drift-disk", drift_disk),
            ("drift-ellipse", drift_ellipse),
            ("reconstruction", reconstruction)]


def suite_nonlinear_estimates(ws):
    k = ws.cfg.knob
    h = k("nonlinear_h")
    n_b = k("nonlinear_boundary_nodes")
    seed = ws.cfg.seed

    def _wrap_gcp(rep, label, name):
        return CheckRecord(
            name=name,
            anchor="u <= v with u(x0) = v(x0) implies I(u,x0) <= I(v,x0)",
            values={"max_violation": rep.max_violation,
                    "trials": rep.trials},
            tolerance=f"violation <= {rep.tolerance:g} (10 h)",
            passed=rep.passed, samples=rep.trials,
            provenance={"label": label, "seed": seed},
            worst={} if rep.passed else {"node": rep.worst_node,
                                         "violation": rep.max_violation})

    def gcp_linear():
        op = ws.operator("ellipse", "div_holder", h, n_b)
        return _wrap_gcp(check_gcp(op, trials=k("gcp_trials"), seed=seed),
                         "divergence-holder", "gcp-linear")

    def gcp_bellman():
        op = ws.operator("ellipse", "bellman_min", h, n_b)
        return _wrap_gcp(check_gcp(op, trials=k("gcp_trials"),
                                   seed=seed + 1),
                         "bellman-min", "gcp-bellman")

    def sandwich():
        op = ws.operator("ellipse", "nondiv_holder", h, n_b)
        opm = ws.operator("ellipse", "pucci_minus", h, n_b)
        opp = ws.operator("ellipse", "pucci_plus", h, n_b)
        rep = check_sandwich(op, opm, opp, trials=k("sandwich_trials"),
                             seed=seed)
        return CheckRecord(
            name="sandwich",
            anchor="M-(u - v, x) <= I(u,x) - I(v,x) <= M+(u - v, x)",
            values={"max_violation": rep.max_violation,
                    "trials": rep.trials},
            tolerance=f"violation <= {rep.tolerance:g} (10 h)",
            passed=rep.passed, samples=rep.trials,
            provenance={"seed": seed},
            worst={} if rep.passed else {"node": rep.worst_node})

    def minmax():
        op = ws.operator("ellipse", "bellman_min", h, n_b)
        rng = np.random.default_rng(seed + 2)
        phis = [random_smooth(op.bgrid, rng)
                for _ in range(k("minmax_data"))]
        res = check_minmax(op, phis, n_policies=k("minmax_policies"),
                           seed=seed + 3)
        return CheckRecord(
            name="minmax",
            anchor="the Bellman-min map lies below every frozen-policy "
                   "linearization, with equality at the converged policy",
            values={kk: res[kk] for kk in
                    ("max_violation", "max_equality_gap", "n_policies",
                     "n_data")},
            tolerance=f"<= {res['tolerance']:g} (10 h)",
            passed=res["pass"],
            samples=res["n_policies"] * res["n_data"],
            provenance={"seed": seed},
            worst={} if res["pass"] else res)

    def extremal_ring():
        P = ws.ellipse().perimeter
        scale = P / (2.0 * np.pi)
        n_ext = k("extremal_boundary_nodes")
        h_ext = k("extremal_h")
        opm = ws.operator("ellipse", "pucci_minus", h_ext, n_ext)
        opp = ws.operator("ellipse", "pucci_plus", h_ext, n_ext)
        radii = [f * scale for f in k("extremal_ring_radii_fractions")]
        d0 = P / 3.0
        ball_radii = [d0 * f for f in k("ball_radii_fractions")]
        return estimates.verify_ring_and_lower_bounds(
            opm, opp, [0, n_ext // 2], radii,
            ball_cases=[(0, d0, ball_radii)],
            name="extremal-ring-and-ball")

    return [("gcp-linear", gcp_linear),
            ("gcp-bellman", gcp_bellman),
            ("sandwich", sandwich),
            ("minmax", minmax),
            ("extremal-ring-and-ball", extremal_ring)]


def suite_holder(ws):
    k = ws.cfg.knob
    h = k("ellipse_h")
    n_b = k("ellipse_boundary_nodes")

    def tv():
        return estimates.verify_tv_and_drift_holder(
            ws.decomposition("ellipse", "div_holder", h, n_b),
            ws.decomposition("ellipse", "div_holder", h / 2.0, n_b),
            seed=ws.cfg.seed)

    return [("tv-and-drift-holder", tv)]


def suite_green(ws):
    k = ws.cfg.knob

    def green_disk():
        grid = ws.disk_grid(k("green_h"))
        bgrid = ws.bgrid("disk", k("green_boundary_nodes"))
        problem = BulkProblem(OperatorSpec.laplacian(), grid, bgrid)
        return estimates.verify_green_suite(
            problem, seed=ws.cfg.seed, n_pairs=k("green_pairs"),
            disk_exact=True, name="green-disk")

    def green_ellipse():
        grid = ws.ellipse_grid(k("green_h"))
        bgrid = ws.bgrid("ellipse", k("green_boundary_nodes"))
        spec = OperatorSpec.nondivergence_holder(
            k("lam"), k("Lam"), k("alpha"))
        problem = BulkProblem(spec, grid, bgrid)
        return estimates.verify_green_suite(
            problem, seed=ws.cfg.seed, n_pairs=k("green_pairs"),
            nondivergence_variant=True, name="green-ellipse-nondivergence")

    return [("green-disk", green_disk),
            ("green-ellipse-nondivergence", green_ellipse)]


def suite_barrier(ws):
    k = ws.cfg.knob

    def barrier():
        return estimates.verify_barrier(lam=k("lam"), Lam=k("Lam"),
                                        n_dim=1, b_len=1.0)

    return [("barrier", barrier)]


_SUITE_BUILDERS = {
    "oracles": suite_oracles,
    "linear_estimates": suite_linear_estimates,
    "nonlinear_estimates": suite_nonlinear_estimates,
    "holder": suite_holder,
    "green": suite_green,
    "barrier": suite_barrier,
}


def suite_names():
    return tuple(_SUITE_BUILDERS)


def run_suite(name, ws, jobs=1):
    """Execute one named suite and return its report."""
    if name not in _SUITE_BUILDERS:
        raise InputError(f"unknown suite {name!r}")
    tasks = _SUITE_BUILDERS[name](ws)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [(task_name, pool.submit(fn))
                       for task_name, fn in tasks]
            records = [f.result() for _, f in futures]
    else:
        records = [fn() for _, fn in tasks]
    records.sort(key=lambda r: r.name)
    return EstimateReport(suite=name, checks=records)


def run_suites(names, ws, jobs=1):
    """Run several suites ('all' expands) and return reports by name."""
    if "all" in names:
        names = list(_SUITE_BUILDERS)
    reports = {}
    for name in sorted(set(names)):
        reports[name] = run_suite(name, ws, jobs=jobs)
    return reports
