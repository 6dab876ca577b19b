import csv
import json

import pytest

from routerlab.cli import COMMANDS, EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_USAGE, build_parser, cli_main


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_equilibria_table(tmp_path, capsys):
    assert cli_main(["equilibria", "--a", "4", "--gamma", "1", "--temp", "1", "--h", "0",
                     "--out-dir", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "equilibria.csv")
    assert [float(r["y"]) for r in rows] == pytest.approx([-3.8301, 0.0, 3.8301], abs=1e-4)
    assert [r["stability"] for r in rows] == ["stable", "unstable", "stable"]
    assert "bistable" in capsys.readouterr().out


def test_boundary_at_threshold(tmp_path):
    assert cli_main(["hysteresis-boundary", "--a", "2", "--out-dir", str(tmp_path)]) == EXIT_OK
    assert float(_rows(tmp_path / "hysteresis_boundary.csv")[0]["H"]) == 0.0


def test_no_data_on_stdout_unless_asked(tmp_path, capsys):
    cli_main(["fold-curve", "--n-points", "5", "--out-dir", str(tmp_path)])
    assert "q,a,h" not in capsys.readouterr().out
    cli_main(["fold-curve", "--n-points", "5", "--out-dir", str(tmp_path), "--stdout"])
    assert "q,a,h" in capsys.readouterr().out


def test_usage_errors(tmp_path, capsys):
    assert cli_main(["nonsense"]) == EXIT_USAGE
    assert cli_main(["equilibria", "--bogus", "1"]) == EXIT_USAGE
    assert cli_main(["equilibria", "--a", "four", "--out-dir", str(tmp_path)]) == EXIT_USAGE
    assert cli_main([]) == EXIT_USAGE


def test_domain_error_names_invariant(tmp_path, capsys):
    assert cli_main(["equilibria", "--temp", "0", "--out-dir", str(tmp_path)]) == EXIT_DOMAIN
    assert "temp > 0" in capsys.readouterr().err


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli_main(["equilibria", "--out-dir", str(blocker / "sub")]) == EXIT_IO
    assert cli_main(["equilibria", "--config", str(tmp_path / "missing.json")]) == EXIT_IO


def test_config_file_then_flags(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"a": 1.5, "h": 0.0, "seed": 3}))
    cli_main(["equilibria", "--config", str(cfg), "--out-dir", str(tmp_path / "o1")])
    assert len(_rows(tmp_path / "o1" / "equilibria.csv")) == 1
    cli_main(["equilibria", "--config", str(cfg), "--a", "4", "--out-dir", str(tmp_path / "o2")])
    assert len(_rows(tmp_path / "o2" / "equilibria.csv")) == 3
    man = json.loads((tmp_path / "o2" / "equilibria.json").read_text())
    assert man["config"]["a"] == 4.0 and man["seed"] == 3


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha": 1}))
    assert cli_main(["equilibria", "--config", str(cfg)]) == EXIT_USAGE
    cfg.write_text("{not json")
    assert cli_main(["equilibria", "--config", str(cfg)]) == EXIT_USAGE


def test_manifest_for_other_command_is_refused(tmp_path):
    cli_main(["equilibria", "--out-dir", str(tmp_path)])
    assert cli_main(["fold-curve", "--config", str(tmp_path / "equilibria.json")]) == EXIT_USAGE


def test_replay_is_byte_identical(tmp_path):
    argv = ["exp", "hysteresis", "--a", "4", "--seed", "7", "--n-values", "11", "--steps-per-value", "300"]
    assert cli_main(argv + ["--out-dir", str(tmp_path / "a")]) == EXIT_OK
    assert cli_main(argv + ["--out-dir", str(tmp_path / "b")]) == EXIT_OK
    assert cli_main(["exp", "hysteresis", "--config", str(tmp_path / "a" / "hysteresis.json"),
                     "--out-dir", str(tmp_path / "c"), "--threads", "2"]) == EXIT_OK
    ref = (tmp_path / "a" / "hysteresis.csv").read_bytes()
    assert (tmp_path / "b" / "hysteresis.csv").read_bytes() == ref
    assert (tmp_path / "c" / "hysteresis.csv").read_bytes() == ref


def test_manifest_is_self_describing(tmp_path):
    cli_main(["simulate", "--steps", "10", "--out-dir", str(tmp_path)])
    man = json.loads((tmp_path / "simulate.json").read_text())
    assert man["subcommand"] == "simulate"
    opts = {o.name for o in COMMANDS["simulate"][0]}
    assert set(man["config"]) == opts
    assert {"seed", "version", "wall_time", "outputs"} <= set(man)


def test_simulate_ensemble_columns(tmp_path):
    cli_main(["simulate", "--steps", "10", "--n-runs", "3", "--out-dir", str(tmp_path)])
    assert list(_rows(tmp_path / "simulate.csv")[0]) == ["time", "mean_u_hat", "std_u_hat"]


def test_mean_field_command(tmp_path):
    assert cli_main(["mean-field", "--a", "4", "--init-y", "0.1", "--t-end", "1",
                     "--out-dir", str(tmp_path)]) == EXIT_OK
    assert len(_rows(tmp_path / "mean_field.csv")) == 1001


@pytest.mark.parametrize("name", list(COMMANDS))
def test_help_lists_every_flag_with_default(name, capsys):
    argv = name.split() + ["--help"]
    assert cli_main(argv) == EXIT_OK
    text = capsys.readouterr().out
    for opt in COMMANDS[name][0]:
        assert f"--{opt.name.replace('_', '-')}" in text
    assert text.count("(default:") >= len(COMMANDS[name][0]) + 3


def test_parser_builds():
    assert build_parser().prog == "routerlab"
