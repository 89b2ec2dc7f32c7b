"""Config validation, CLI exit codes, determinism, and emission."""

import json
import os

import pytest

from dtnlab import ConfigError, load_config
from dtnlab.cli import EXIT_CHECK_FAILURE, EXIT_PASS, EXIT_RUNTIME, main

MINIMAL = """
schema = 1
[run]
seed = 0
suites = ["barrier"]
[curve]
family = "circle"
radius = 1.0
[[operators]]
kind = "divergence"
lam = 1.0
Lam = 1.0
label = "laplacian"
[grid]
spacings = [0.25]
boundary_nodes = [16]
"""


@pytest.fixture
def config_path(tmp_path):
    p = tmp_path / "cfg.toml"
    p.write_text(MINIMAL)
    return str(p)


def _write(tmp_path, body):
    p = tmp_path / "bad.toml"
    p.write_text(body)
    return str(p)


def test_minimal_config_loads(config_path):
    cfg = load_config(config_path)
    assert cfg.seed == 0
    assert cfg.suites == ["barrier"]
    assert cfg.curve_family == "circle"
    assert len(cfg.config_hash) == 64


def test_config_hash_tracks_bytes(tmp_path, config_path):
    other = tmp_path / "cfg2.toml"
    other.write_text(MINIMAL + "\n# comment\n")
    assert load_config(config_path).config_hash != \
        load_config(str(other)).config_hash


def test_ellipticity_violation_names_key(tmp_path):
    body = MINIMAL.replace("lam = 1.0\nLam = 1.0", "lam = 3.0\nLam = 1.0")
    with pytest.raises(ConfigError, match="ellipticity"):
        load_config(_write(tmp_path, body))


def test_unknown_suite_names_key(tmp_path):
    body = MINIMAL.replace('["barrier"]', '["nonsense"]')
    with pytest.raises(ConfigError, match="run.suites"):
        load_config(_write(tmp_path, body))


def test_unknown_top_level_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="extra"):
        load_config(_write(tmp_path, MINIMAL + "\n[extra]\nx = 1\n"))


def test_bad_boundary_nodes_named(tmp_path):
    body = MINIMAL.replace("boundary_nodes = [16]", "boundary_nodes = [2]")
    with pytest.raises(ConfigError, match="boundary_nodes"):
        load_config(_write(tmp_path, body))


def test_strip_heights_pair_ratio(tmp_path):
    body = MINIMAL + "\n[suite]\nstrip_heights = [4.0, 12.0]\n"
    with pytest.raises(ConfigError, match="strip_heights"):
        load_config(_write(tmp_path, body))


def test_parse_error_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="parse"):
        load_config(_write(tmp_path, "not ==== toml"))


def test_reference_and_quick_configs_load():
    root = os.path.join(os.path.dirname(__file__), "..", "configs")
    for name in ("quick.toml", "reference.toml"):
        cfg = load_config(os.path.join(root, name))
        assert cfg.suites


def test_cli_verify_barrier_exit_zero(config_path, tmp_path, capsys):
    out = str(tmp_path / "artifacts")
    code = main(["verify", "barrier", "--config", config_path, "--out", out])
    assert code == EXIT_PASS
    captured = capsys.readouterr()
    assert "[PASS] barrier/barrier" in captured.out
    assert os.path.isfile(os.path.join(out, "report_barrier.json"))
    assert os.path.isfile(os.path.join(out, "manifest.json"))


def test_cli_usage_error_exit_two(config_path):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense", "--config", config_path])
    assert exc.value.code == 2


def test_cli_missing_config_exit_runtime(tmp_path):
    code = main(["verify", "barrier", "--config",
                 str(tmp_path / "absent.toml")])
    assert code == EXIT_RUNTIME


def test_cli_failing_suite_exit_one(tmp_path, capsys):
    # oracles on a deliberately under-resolved disk must fail cleanly,
    # naming the disk-kernel check on the diagnostic stream
    body = MINIMAL.replace('["barrier"]', '["oracles"]') + """
[suite]
disk_h = 0.125
disk_h_coarse = 0.25
disk_boundary_nodes = 16
disk_fine_boundary_nodes = 64
ring_radii_fractions = [0.3, 0.35, 0.4, 0.45]
strip_h = 0.25
strip_heights = [2.0, 4.0]
strip_length = 8.0
"""
    p = tmp_path / "coarse.toml"
    p.write_text(body)
    code = main(["verify", "oracles", "--config", str(p),
                 "--out", str(tmp_path / "a")])
    captured = capsys.readouterr()
    assert code == EXIT_CHECK_FAILURE
    assert "failed checks:" in captured.err
    assert "flat-and-disk-oracles" in captured.err


def test_cli_determinism(config_path, tmp_path):
    out_a = str(tmp_path / "a")
    out_b = str(tmp_path / "b")
    assert main(["verify", "barrier", "--config", config_path,
                 "--out", out_a]) == EXIT_PASS
    assert main(["verify", "barrier", "--config", config_path,
                 "--out", out_b]) == EXIT_PASS
    for name in ("report_barrier.json", "manifest.json"):
        a = open(os.path.join(out_a, name), "rb").read()
        b = open(os.path.join(out_b, name), "rb").read()
        assert a == b


def test_cli_emit_idempotent_and_csv(config_path, tmp_path):
    out = str(tmp_path / "a")
    assert main(["verify", "barrier", "--config", config_path,
                 "--out", out]) == EXIT_PASS
    report = os.path.join(out, "report_barrier.json")
    before = open(report, "rb").read()
    assert main(["emit", "--out", out]) == EXIT_PASS
    assert open(report, "rb").read() == before
    assert main(["emit", "--out", out, "--format", "csv"]) == EXIT_PASS
    lines = open(os.path.join(out, "report_barrier.csv")).read().splitlines()
    assert lines[0] == "name,pass,tolerance,samples"
    assert lines[1].startswith("barrier,True")


def test_cli_emit_missing_manifest(tmp_path):
    code = main(["emit", "--out", str(tmp_path / "nowhere")])
    assert code == EXIT_RUNTIME


def test_cli_run_writes_tables(config_path, tmp_path, capsys):
    out = str(tmp_path / "run")
    code = main(["run", "--config", config_path, "--out", out])
    assert code == EXIT_PASS
    files = os.listdir(out)
    assert any(f.endswith("_kernel.csv") for f in files)
    assert any(f.endswith("_drift.csv") for f in files)
    assert any(f.endswith("_matrix.csv") for f in files)
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert manifest["pass"] is True
    assert manifest["config_hash"] == load_config(config_path).config_hash
