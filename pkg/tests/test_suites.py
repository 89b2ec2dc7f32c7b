"""Workspace caching and suite execution."""

import pytest

from dtnlab import InputError, Workspace, load_config, run_suite, run_suites

CFG = """
schema = 1
[run]
seed = 0
suites = ["barrier"]
[curve]
family = "circle"
[grid]
spacings = [0.25]
boundary_nodes = [16]
"""


@pytest.fixture(scope="module")
def ws(tmp_path_factory):
    p = tmp_path_factory.mktemp("cfg") / "cfg.toml"
    p.write_text(CFG)
    return Workspace(load_config(str(p)))


def test_workspace_caches_artifacts(ws):
    a = ws.disk_grid(0.25)
    b = ws.disk_grid(0.25)
    assert a is b
    g1 = ws.bgrid("disk", 16)
    g2 = ws.bgrid("disk", 16)
    assert g1 is g2


def test_unknown_suite_rejected(ws):
    with pytest.raises(InputError):
        run_suite("nonsense", ws)


def test_barrier_suite_runs(ws):
    rep = run_suite("barrier", ws)
    assert rep.passed
    assert [c.name for c in rep.checks] == ["barrier"]


def test_parallel_jobs_match_serial(ws):
    serial = run_suite("barrier", ws, jobs=1)
    parallel = run_suite("barrier", ws, jobs=2)
    assert serial.to_json() == parallel.to_json()


def test_run_suites_expands_all(ws):
    from dtnlab.suites import suite_names
    reports = run_suites(["barrier"], ws)
    assert set(reports) == {"barrier"}
    assert set(suite_names()) == {"oracles", "linear_estimates",
                                  "nonlinear_estimates", "holder", "green",
                                  "barrier"}
