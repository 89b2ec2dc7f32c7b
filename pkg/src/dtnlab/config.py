"""TOML run configuration: parsing, validation, and hashing.

A config names a curve, one or more operator specs, the grid ladder,
the verification-suite resolution knobs, and run bookkeeping (seed,
output directory, suite selection).  Validation errors always name the
offending key.
"""

import hashlib
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from .errors import ConfigError
from .geometry import BoundaryCurve
from .solvers import OperatorSpec

SUITES = ("oracles", "linear_estimates", "nonlinear_estimates", "holder",
          "green", "barrier", "all")

_CURVE_FAMILIES = ("circle", "ellipse", "star")
_OPERATOR_KINDS = ("divergence", "nondivergence", "bellman_min",
                   "bellman_max")

# suite resolution knobs and their defaults (reference-quality values are
# pinned in configs/reference.toml)
_SUITE_DEFAULTS = {
    "lam": 1.0,
    "Lam": 2.0,
    "alpha": 0.5,
    "disk_h": 1.0 / 64.0,
    "disk_h_coarse": 1.0 / 32.0,
    "disk_boundary_nodes": 128,
    "disk_fine_boundary_nodes": 512,
    "ellipse_a": 1.3,
    "ellipse_b": 0.8,
    "ellipse_h": 1.0 / 32.0,
    "ellipse_boundary_nodes": 96,
    "ellipse_origin": [0.37, 0.23],
    "drift_h": 1.0 / 256.0,
    "drift_boundary_nodes": 48,
    "nonlinear_h": 1.0 / 32.0,
    "nonlinear_boundary_nodes": 96,
    "extremal_h": 1.0 / 64.0,
    "extremal_boundary_nodes": 512,
    "green_h": 1.0 / 32.0,
    "green_boundary_nodes": 128,
    "strip_length": 16.0,
    "strip_h": 1.0 / 16.0,
    "strip_heights": [4.0, 8.0],
    "gcp_trials": 25,
    "sandwich_trials": 10,
    "minmax_data": 3,
    "minmax_policies": 10,
    "ring_radii_fractions": [0.25, 0.3, 0.35, 0.4],
    "extremal_ring_radii_fractions": [0.08, 0.12, 0.16, 0.2],
    "ball_radii_fractions": [0.06, 0.07, 0.08, 0.095],
    "green_pairs": 50,
}


@dataclass
class RunConfig:
    """Validated run configuration plus the source-file hash."""

    seed: int
    out_dir: str
    suites: list
    curve_family: str
    curve_params: dict
    operators: list          # list of dicts (kind, lam, Lam, alpha, label)
    spacings: list
    boundary_nodes: list
    r0_fraction: float
    origin: list
    suite_knobs: dict = field(default_factory=dict)
    config_hash: str = ""

    def build_curve(self):
        fam = self.curve_family
        p = self.curve_params
        if fam == "circle":
            return BoundaryCurve.circle(p.get("radius", 1.0))
        if fam == "ellipse":
            return BoundaryCurve.ellipse(p.get("a", 1.3), p.get("b", 0.8))
        return BoundaryCurve.star(p.get("amplitude", 0.15),
                                  int(p.get("lobes", 3)))

    def build_operator_specs(self):
        specs = []
        for op in self.operators:
            specs.append(_make_spec(op))
        return specs

    def knob(self, key):
        return self.suite_knobs[key]


def _make_spec(op):
    kind = op["kind"]
    lam = op.get("lam", 1.0)
    Lam = op.get("Lam", 1.0)
    alpha = op.get("alpha", 0.5)
    label = op.get("label", kind)
    if kind == "divergence":
        if lam == Lam:
            return OperatorSpec.laplacian(label=label) if lam == 1.0 else \
                _constant_spec("divergence", lam, label)
        return OperatorSpec.divergence_holder(lam, Lam, alpha, label=label)
    if kind == "nondivergence":
        if lam == Lam:
            return _constant_spec("nondivergence", lam, label)
        return OperatorSpec.nondivergence_holder(lam, Lam, alpha, label=label)
    sign = "minus" if kind == "bellman_min" else "plus"
    base = OperatorSpec.pucci(sign, lam, Lam)
    base.label = label
    return base


def _constant_spec(kind, value, label):
    from .solvers import constant_field
    return OperatorSpec(kind=kind, lam=value, Lam=value, label=label,
                        a1=constant_field(value), a2=constant_field(value))


def _require(cond, key, message):
    if not cond:
        raise ConfigError(f"config key '{key}': {message}")


def _check_keys(table, allowed, section):
    for k in table:
        if k not in allowed:
            raise ConfigError(f"config key '{section}.{k}' is not recognized")


def load_config(path):
    """Parse and validate a TOML run configuration."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        data = tomllib.loads(raw.decode())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config does not parse: {exc}") from exc
    digest = hashlib.sha256(raw).hexdigest()

    _check_keys(data, {"schema", "run", "curve", "operators", "grid",
                       "suite"}, "<top>")
    schema = data.get("schema", 1)
    _require(schema == 1, "schema", f"unsupported schema version {schema}")

    run = data.get("run", {})
    _check_keys(run, {"seed", "out_dir", "suites"}, "run")
    seed = run.get("seed", 0)
    _require(isinstance(seed, int) and seed >= 0, "run.seed",
             "must be a nonnegative integer")
    out_dir = run.get("out_dir", "artifacts")
    suites = run.get("suites", ["all"])
    for s in suites:
        _require(s in SUITES, "run.suites", f"unknown suite {s!r}")

    curve = data.get("curve", {"family": "circle"})
    _check_keys(curve, {"family", "radius", "a", "b", "amplitude", "lobes"},
                "curve")
    family = curve.get("family", "circle")
    _require(family in _CURVE_FAMILIES, "curve.family",
             f"must be one of {_CURVE_FAMILIES}")
    params = {k: v for k, v in curve.items() if k != "family"}
    for k, v in params.items():
        if k != "lobes":
            _require(isinstance(v, (int, float)) and v > 0, f"curve.{k}",
                     "must be positive")

    operators = data.get("operators", [{"kind": "divergence", "lam": 1.0,
                                        "Lam": 1.0, "label": "laplacian"}])
    _require(isinstance(operators, list) and operators, "operators",
             "must be a nonempty array of tables")
    for op in operators:
        _check_keys(op, {"kind", "lam", "Lam", "alpha", "label"}, "operators")
        _require(op.get("kind") in _OPERATOR_KINDS, "operators.kind",
                 f"must be one of {_OPERATOR_KINDS}")
        lam = op.get("lam", 1.0)
        Lam = op.get("Lam", 1.0)
        _require(0 < lam <= Lam, "operators.ellipticity",
                 f"requires 0 < lam <= Lam, got ({lam}, {Lam})")

    grid = data.get("grid", {})
    _check_keys(grid, {"spacings", "boundary_nodes", "r0_fraction", "origin"},
                "grid")
    spacings = grid.get("spacings", [1.0 / 32.0])
    _require(all(isinstance(h, float) and 0 < h < 1 for h in spacings),
             "grid.spacings", "must be floats in (0, 1)")
    boundary_nodes = grid.get("boundary_nodes", [128])
    _require(all(isinstance(n, int) and n >= 4 for n in boundary_nodes),
             "grid.boundary_nodes", "must be integers >= 4")
    r0_fraction = grid.get("r0_fraction", 0.25)
    _require(0.0 < r0_fraction < 0.5, "grid.r0_fraction",
             "must lie in (0, 0.5)")
    origin = grid.get("origin", [0.0, 0.0])
    _require(len(origin) == 2, "grid.origin", "must be a pair")

    knobs = dict(_SUITE_DEFAULTS)
    suite_tbl = data.get("suite", {})
    _check_keys(suite_tbl, set(_SUITE_DEFAULTS), "suite")
    knobs.update(suite_tbl)
    _require(0 < knobs["lam"] <= knobs["Lam"], "suite.ellipticity",
             f"requires 0 < lam <= Lam, got "
             f"({knobs['lam']}, {knobs['Lam']})")
    for key in ("disk_h", "disk_h_coarse", "drift_h", "ellipse_h",
                "nonlinear_h", "extremal_h", "green_h", "strip_h"):
        _require(0 < knobs[key] < 1, f"suite.{key}", "must lie in (0, 1)")
    for key in ("disk_boundary_nodes", "disk_fine_boundary_nodes",
                "drift_boundary_nodes", "ellipse_boundary_nodes",
                "nonlinear_boundary_nodes", "extremal_boundary_nodes",
                "green_boundary_nodes"):
        _require(int(knobs[key]) >= 4, f"suite.{key}", "must be >= 4")
    _require(len(knobs["strip_heights"]) == 2
             and knobs["strip_heights"][1] == 2 * knobs["strip_heights"][0],
             "suite.strip_heights", "must be a pair with ratio 2")

    return RunConfig(
        seed=int(seed), out_dir=str(out_dir), suites=list(suites),
        curve_family=family, curve_params=params, operators=list(operators),
        spacings=[float(h) for h in spacings],
        boundary_nodes=[int(n) for n in boundary_nodes],
        r0_fraction=float(r0_fraction),
        origin=[float(origin[0]), float(origin[1])],
        suite_knobs=knobs, config_hash=digest,
    )
