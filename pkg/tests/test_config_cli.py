import json

import pytest

from e2lab.cli import main
from e2lab.config import RunConfig, apply_env
from e2lab.errors import UsageError
from e2lab.apps import palindrome_e2_brute


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_config_round_trip(tmp_path):
    cfg = RunConfig(seed=5, workers=3, output="out", format="json", eta=0.1, delta=0.02,
                    tolerances={"oracle": 1e-10}, params={"type1.M": "300"})
    path = tmp_path / "c.cfg"
    cfg.save(path)
    assert RunConfig.load(path) == cfg


def test_config_rejects_unknown(tmp_path):
    with pytest.raises(UsageError):
        RunConfig.from_text("bogus=1\n")
    with pytest.raises(UsageError):
        RunConfig.from_text("tol.nope=1\n")
    with pytest.raises(UsageError):
        RunConfig.from_text("format=xml\n")


def test_env_overrides(monkeypatch):
    monkeypatch.setenv("E2LAB_WORKERS", "2")
    monkeypatch.setenv("E2LAB_OUTPUT_DIR", "/tmp/x")
    cfg = apply_env(RunConfig())
    assert cfg.workers == 2 and cfg.output == "/tmp/x"


def test_params_rejects_tau(capsys):
    code, out, err = run(["params", "--tau", "0.35", "--q", "10001", "--a", "100"], capsys)
    assert code == 2 and "8/23" in err


def test_params_prints_record(capsys):
    code, out, _ = run(["params", "--tau", "1/3", "--q", "10001", "--a", "100", "--z", "100", "--x", "1e6"], capsys)
    assert code == 0 and "a=100" in out and "q=10001" in out


def test_palindrome_row(capsys):
    code, out, _ = run(["palindrome", "--b", "10"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "b,count,density_ratio"
    assert lines[1].startswith(f"10,{palindrome_e2_brute(10)},")


def test_palindrome_ceiling(capsys):
    assert run(["palindrome", "--b", "2000"], capsys)[0] == 3


def test_poisson_single(capsys):
    code, out, _ = run(["poisson-check", "--samples", "1"], capsys)
    first = out.splitlines()[1].split(",")
    assert code == 0 and first[:2] == ["1", "0"] and float(first[-1]) <= 1e-8


def test_usage_errors(capsys):
    assert run(["bogus"], capsys)[0] == 2
    assert run(["type1"], capsys)[0] == 2


def test_sum_command_with_config(tmp_path, capsys):
    inst = tmp_path / "inst.txt"
    code, out, _ = run(["params", "--tau", "1/4", "--q", "9973", "--a", "1234"], capsys)
    inst.write_text(out)
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"param.type1.instance={inst}\nparam.type1.M=300\nparam.type1.N=2500\n")
    code, out, _ = run(["--config", str(cfg), "type1", "--oracle"], capsys)
    assert code == 0
    header, row = out.splitlines()
    rec = dict(zip(header.split(","), row.split(",")))
    assert rec["value"] == rec["oracle_value"]
    code, out, _ = run(["--format", "json", "type2", "--instance", str(inst), "--M", "2000", "--N", "400",
                          "--bypass-window"], capsys)
    assert code == 0 and json.loads(out)["rows"][0]["operation"] == "type2"


def test_output_dir_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["--output", str(d), "--seed", "3", "s10", "--N", "200", "400"], capsys)[0] == 0
    assert (a / "s10.csv").read_bytes() == (b / "s10.csv").read_bytes()


def test_dioph_file_alpha(tmp_path, capsys):
    f = tmp_path / "cf.txt"
    f.write_text("1 " + "2 " * 30)
    code, out, _ = run(["dioph", "--alpha", str(f), "--tau", "1/3", "--qmin", "1000", "--qmax", "6000"], capsys)
    code2, out2, _ = run(["dioph", "--alpha", "sqrt2", "--tau", "1/3", "--qmin", "1000", "--qmax", "6000"], capsys)
    # the 31-quotient expansion is a rational within 1e-30 of sqrt2: same members, same factors
    cols = lambda text: [line.split(",")[:4] for line in text.splitlines()]
    assert code == code2 == 0 and cols(out) == cols(out2)


def test_lattice_commands(tmp_path, capsys):
    code, out, _ = run(["lattice", "--q", "10001", "--a", "100", "--M", "200", "--levels"], capsys)
    assert code == 0 and out.splitlines()[1].startswith("1,")
    inst = tmp_path / "i.txt"
    inst.write_text(run(["params", "--tau", "1/3", "--q", "10001", "--a", "100", "--z", "100", "--x", "1e6"],
                        capsys)[1])
    code, out, _ = run(["lattice", "--M", "100", "--moments", "--instance", str(inst), "--N", "2500"], capsys)
    assert code == 0 and "sum_psi_sq" in out


def test_zerosum_command(tmp_path, capsys):
    inst = tmp_path / "i.txt"
    inst.write_text(run(["params", "--tau", "1/3", "--q", "10001", "--a", "100", "--z", "100", "--x", "1e6"],
                        capsys)[1])
    code, out, err = run(["zerosum", "--instance", str(inst), "--N", "100", "--samples", "10"], capsys)
    assert code == 0 and len(out.splitlines()) == 11
