"""Command-line front end: run pipelines, verify suites, emit reports.

Exit codes: 0 all checks pass, 1 at least one check failed, 2 usage
error, 3 runtime failure.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np
import scipy

from . import __version__
from .config import SUITES, load_config
from .errors import DtnLabError
from .suites import Workspace, run_suites

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dtnlab",
        description="Dirichlet-to-Neumann kernel extraction and "
                    "estimate verification")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the configured pipeline "
                                       "and write all artifacts")
    p_verify = sub.add_parser("verify", help="run named verification "
                                             "suites")
    p_verify.add_argument("suite", choices=SUITES)
    p_emit = sub.add_parser("emit", help="re-emit reports from a completed "
                                         "artifact directory")
    for p in (p_run, p_verify):
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None,
                       help="override the configured output directory")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--seed", type=int, default=None,
                       help="override the configured seed")
    p_emit.add_argument("--out", required=True,
                        help="artifact directory of a completed run")
    p_emit.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _manifest(cfg, reports):
    return {
        "schema": 1,
        "config_hash": cfg.config_hash,
        "seed": cfg.seed,
        "package_version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "suites": sorted(reports),
        "pass": all(r.passed for r in reports.values()),
    }


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit_reports(cfg, reports, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    for name, report in sorted(reports.items()):
        report.write_json(os.path.join(out_dir, f"report_{name}.json"))
    _write_json(os.path.join(out_dir, "manifest.json"),
                _manifest(cfg, reports))


def _apply_overrides(cfg, args):
    if args.out is not None:
        cfg.out_dir = args.out
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _print_reports(reports, stream=None):
    stream = sys.stdout if stream is None else stream
    ok = True
    for name in sorted(reports):
        for line in reports[name].summary_lines():
            print(line, file=stream)
        ok = ok and reports[name].passed
    return ok


def _cmd_run(args):
    cfg = _apply_overrides(load_config(args.config), args)
    ws = Workspace(cfg)
    reports = run_suites(cfg.suites, ws, jobs=args.jobs)
    _emit_reports(cfg, reports, cfg.out_dir)
    _export_pipeline_tables(cfg, ws)
    ok = _print_reports(reports)
    print(f"artifacts written to {cfg.out_dir}")
    return EXIT_PASS if ok else EXIT_CHECK_FAILURE


def _export_pipeline_tables(cfg, ws):
    """Kernel/drift CSV tables for the configured curve and operators."""
    from .bulk import build_grid
    from .dtn import DtnOperator
    from .geometry import build_boundary_grid
    from .levy import decompose

    curve = cfg.build_curve()
    for spec in cfg.build_operator_specs():
        if not spec.is_linear:
            continue
        for h in cfg.spacings:
            grid = build_grid(curve, h, origin=tuple(cfg.origin))
            for n_b in cfg.boundary_nodes:
                bgrid = build_boundary_grid(curve, n_b)
                op = DtnOperator(spec, grid, bgrid)
                M = op.matrix()
                dec = decompose(
                    M, r0=cfg.r0_fraction * curve.perimeter)
                tag = f"{spec.label}_h{h:g}_n{n_b}"
                base = os.path.join(cfg.out_dir, tag)
                M.export_csv(base + "_matrix.csv",
                             sidecar=base + "_matrix.json")
                dec.export_kernel_csv(base + "_kernel.csv")
                dec.export_drift_csv(base + "_drift.csv")


def _cmd_verify(args):
    cfg = _apply_overrides(load_config(args.config), args)
    ws = Workspace(cfg)
    names = [args.suite]
    reports = run_suites(names, ws, jobs=args.jobs)
    _emit_reports(cfg, reports, cfg.out_dir)
    ok = _print_reports(reports)
    if not ok:
        failures = sorted(
            f"{name}/{check}"
            for name, rep in reports.items()
            for check in rep.failed_names())
        print("failed checks: " + ", ".join(failures), file=sys.stderr)
        return EXIT_CHECK_FAILURE
    return EXIT_PASS


def _cmd_emit(args):
    out = args.out
    manifest_path = os.path.join(out, "manifest.json")
    if not os.path.isfile(manifest_path):
        raise OSError(f"no manifest at {manifest_path}; run a pipeline first")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    for name in manifest.get("suites", []):
        src = os.path.join(out, f"report_{name}.json")
        if not os.path.isfile(src):
            raise OSError(f"missing report artifact {src}")
        with open(src) as fh:
            report = json.load(fh)
        if args.format == "json":
            _write_json(src, report)   # canonical re-serialization
        else:
            dst = os.path.join(out, f"report_{name}.csv")
            with open(dst, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["name", "pass", "tolerance", "samples"])
                for check in report["checks"]:
                    writer.writerow([check["name"], check["pass"],
                                     check["tolerance"], check["samples"]])
    return EXIT_PASS


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_emit(args)
    except DtnLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
