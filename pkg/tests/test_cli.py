import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from spacinglab import ConfigurationError
from spacinglab.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, ExperimentConfig, main, parse_operator
from spacinglab.operators import OperatorPoly

P = OperatorPoly.gen


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


@pytest.mark.parametrize("args", [
    ["torus-mc-ks", "--N", "8,16", "--samples", "300"],
    ["bn-grid", "--resolution", "6", "--format", "json"],
    ["clump-verify", "--N", "6", "--samples", "4"],
])
def test_reruns_are_byte_identical(tmp_path, args, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    name = os.listdir(a)
    assert name == os.listdir(b)
    assert _read(a / name[0]) == _read(b / name[0])


def test_csv_carries_provenance_header(tmp_path, capsys):
    assert main(["torus-mc-ks", "--N", "8", "--samples", "200", "--seed", "42", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "torus-mc-ks.csv").read_text().splitlines()
    head = dict(l[2:].split("=", 1) for l in lines if l.startswith("# "))
    assert head["seed"] == "42" and head["version"] and len(head["config_hash"]) == 16
    body = [l for l in lines if not l.startswith("#")]
    assert body[0] == "N,estimate,stderr" and body[1].startswith("8,")


def test_json_grid_schema(tmp_path, capsys):
    assert main(["bn-grid", "--resolution", "5", "--format", "json", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "bn-grid.json").read_text())
    assert {"schema", "N", "resolution", "alpha", "cells"} <= set(doc)
    assert len(doc["cells"]) == 5 ** 3 and doc["cells"][0] == 1


def test_seed_changes_hash():
    a = ExperimentConfig("torus-mc-ks", {"seed": "1"})
    b = ExperimentConfig("torus-mc-ks", {"seed": "2"})
    assert a.digest() != b.digest()


def test_config_round_trip():
    cfg = ExperimentConfig("op-spectrum", {"m": "4", "operator": "t1 + 2*t1*t2", "seed": "7"})
    back = ExperimentConfig.from_text(cfg.to_text())
    assert back == cfg and back.digest() == cfg.digest()


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[common]\nseed = 5\n[torus-mc-ks]\nN = 8\nsamples = 100\n")
    assert main(["torus-mc-ks", "--config", str(cfg), "--samples", "150", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "torus-mc-ks.csv").read_text()
    assert "# seed=5" in text


def test_unknown_key_is_a_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[torus-mc-ks]\nsamples = 100\nbogus = 1\n")
    assert main(["torus-mc-ks", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "config" and "bogus" in err["message"]
    with pytest.raises(ConfigurationError):
        ExperimentConfig("nope")


def test_bad_value_and_bad_flag(capsys):
    assert main(["torus-mc-ks", "--samples", "many"]) == EXIT_CONFIG
    assert main(["torus-mc-ks", "--frobnicate"]) == EXIT_CONFIG


def test_numeric_precondition_exit(tmp_path, capsys):
    assert main(["op-spectrum", "--operator", "E12", "--out", str(tmp_path)]) == EXIT_NUMERIC
    assert json.loads(capsys.readouterr().err)["error"] == "numeric"


def test_io_exit(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["final-bound", "--out", str(blocker / "sub")]) == EXIT_IO
    assert main(["spacing-hist", "--input", str(tmp_path / "missing.txt"), "--out", str(tmp_path)]) == EXIT_IO


def test_env_default_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SPACINGLAB_OUT", str(tmp_path / "env"))
    assert main(["final-bound"]) == 0
    assert os.listdir(tmp_path / "env") == ["final-bound.csv"]


def test_spacing_hist_from_file(tmp_path, capsys):
    src = tmp_path / "spec.txt"
    src.write_text("0 1 3 3.5\n")
    assert main(["spacing-hist", "--input", str(src), "--bin-width", "0.5", "--out", str(tmp_path)]) == 0
    rows = [l for l in (tmp_path / "spacing-hist.csv").read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "bin_left,bin_right,density"


def test_parse_operator():
    assert parse_operator("t1 + t1*t2") == P("t1") + P("t1") * P("t2")
    assert parse_operator("2*W + 1/3*t2") == 2 * P("W") + P("t2") * Fraction(1, 3)
    with pytest.raises(ConfigurationError):
        parse_operator("t1 + sin(t2)")


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "spacinglab", "final-bound", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip().endswith("final-bound.csv")
