import json
import subprocess
import sys

import pytest

from ldgraphs import cli, io


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_enumerate_oracle(capsys):
    code, out, _ = run(capsys, "enumerate", "--pattern", "C3", "--N", "4", "--p", "0.5", "--t-abs", "6", "--dir", "ge")
    assert code == 0
    assert out.strip() == "0.359375"


def test_rate_table(capsys):
    code, out, _ = run(capsys, "rate", "--pattern", "C3", "--N", "100", "--p", "0.1", "--u", "1")
    assert code == 0
    header, row = out.strip().splitlines()
    rec = dict(zip(header.split(","), row.split(",")))
    assert float(rec["c_H"]) == pytest.approx(1 / 3)


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["rate", "--pattern", "notagraph"],
    ["enumerate", "--N", "12", "--t-abs", "1"],
    ["mc", "--tilt", "weird:3"],
    ["rate", "--p", "abc"],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "rate", "--config", str(bad))[0] == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "rate", "--config", str(unknown))[0] == 2
    assert run(capsys, "rate", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_config_and_flag_precedence(tmp_path, capsys):
    cfgf = tmp_path / "c.json"
    cfgf.write_text(json.dumps({"enumerate": {"functional": "edges", "N": 3, "p": 0.5, "t_abs": 3}, "seed": 9}))
    code, out, _ = run(capsys, "enumerate", "--config", str(cfgf))
    assert code == 0 and float(out) == pytest.approx(1 / 8)
    code, out, _ = run(capsys, "enumerate", "--config", str(cfgf), "--t-abs", "0")
    assert float(out) == 1.0


def test_seed_env_precedence(tmp_path, monkeypatch, capsys):
    cfgf = tmp_path / "c.json"
    cfgf.write_text(json.dumps({"seed": 9}))
    args = cli.build_parser().parse_args(["rate", "--config", str(cfgf)])
    assert cli.resolve(args)["seed"] == 9
    monkeypatch.setenv("LDG_SEED", "5")
    assert cli.resolve(args)["seed"] == 5
    args = cli.build_parser().parse_args(["rate", "--config", str(cfgf), "--seed", "0x10"])
    assert cli.resolve(args)["seed"] == 16
    monkeypatch.setenv("LDG_SEED", "-1")
    assert run(capsys, "rate")[0] == 2


def test_out_writes_schema_and_manifest(tmp_path, capsys):
    out = tmp_path / "o"
    code, _, _ = run(capsys, "mc", "--functional", "edges", "--N", "5", "--p", "0.3", "--t", "1.5",
                     "--samples", "2000", "--seed", "3", "--out", str(out))
    assert code == 0
    text = (out / "mc.csv").read_text().splitlines()
    assert text[0] == "#schema=1"
    assert text[1].endswith("seed,config_hash")
    rows = io.read_csv(out / "mc.csv")
    assert rows[0]["seed"] == "3" and len(rows[0]["config_hash"]) == 16
    man = json.loads((out / "mc.manifest.json").read_text())
    assert man["seed"] == 3 and man["outputs"] == ["mc.csv"]
    assert {"numpy", "scipy", "python", "backend", "ldgraphs"} <= set(man["versions"])


def test_reruns_are_byte_identical(tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        assert run(capsys, "mc", "--functional", "C3", "--N", "6", "--p", "0.3", "--t", "2",
                   "--tilt", "clique:4", "--samples", "3000", "--seed", "1", "--out", str(d))[0] == 0
        outs.append((d / "mc.csv").read_bytes())
    assert outs[0] == outs[1]


def test_solve_and_spectra(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", "--functional", "edges", "--N", "8", "--p", "0.3", "--level", "0.5",
                       "--dir", "lower", "--out", str(tmp_path))
    assert code == 0 and (tmp_path / "solve.csv").exists()
    code, out, _ = run(capsys, "spectra", "--N", "20", "--p", "0.2", "--R", "1,3", "--samples", "50")
    assert code == 0 and "statistic" in out.splitlines()[0]


def test_netcheck_small(capsys):
    code, out, _ = run(capsys, "netcheck", "--trials", "200")
    assert code == 0
    assert "false" not in out.split("\n", 1)[1]


def test_verify_subset(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--criteria", "1,2", "--no-repeat", "--out", str(tmp_path))
    assert code == 0
    assert "2/2 criteria passed" in out
    assert (tmp_path / "acceptance.csv").exists()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ldgraphs", "enumerate", "--functional", "edges", "--N", "3",
                        "--p", "0.5", "--t-abs", "0"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "1.0"
