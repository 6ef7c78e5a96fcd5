import json

import pytest

from zetalab.cli import run_command


def test_count_command(tmp_path):
    out = tmp_path / "av.csv"
    assert run_command(["count", "--a", "2+0i", "--rect", "0.5,2,0,50", "--out", str(out)]) == 0
    man = json.loads((tmp_path / "av.manifest.json").read_text())
    assert man["summary"]["count"] == 4
    assert len(out.read_text().strip().splitlines()) == 5


def test_density_command(tmp_path):
    out = tmp_path / "d.csv"
    assert run_command(["density", "--sigma", "0.75", "--n-x", "81", "--out", str(out)]) == 0
    man = json.loads((tmp_path / "d.manifest.json").read_text())
    assert man["summary"]["mass_defect"] <= 1e-3


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        run_command(["count", "--a", "2", "--rect", "0.5,2,0,50", "--bogus"])
    assert exc.value.code == 2


def test_seed_required():
    with pytest.raises(SystemExit) as exc:
        run_command(["mc-sample", "--sigma", "0.75"])
    assert exc.value.code == 2


def test_module_error_category(tmp_path, capsys):
    assert run_command(["density", "--sigma", "0.3", "--out", str(tmp_path / "x.csv")]) == 3
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "domain"


def test_rerun_and_replay_byte_identical(tmp_path):
    out = tmp_path / "m.csv"
    args = ["mc-sample", "--sigma", "0.7", "--n", "200", "--cutoff", "500", "--seed", "42", "--out", str(out)]
    assert run_command(args) == 0
    first = out.read_bytes()
    assert run_command(args) == 0
    assert out.read_bytes() == first
    out.unlink()
    assert run_command(["--config", str(tmp_path / "m.manifest.json")]) == 0
    assert out.read_bytes() == first


@pytest.mark.parametrize(
    "argv",
    [
        ["primes", "--limit", "1000", "--sigma", "0.75"],
        ["zeta-sample", "--sigma", "0.75", "--T", "1000", "--n", "20", "--seed", "1"],
        ["charfn-table", "--w", "0.3", "--K", "4"],
        ["charfn-table", "--sigma", "0.75", "--n-grid", "5"],
        ["expansion", "--sigma", "0.6"],
        ["littlewood", "--a", "1000", "--sigma", "0.75", "--T1", "100", "--T2", "110"],
        ["discrepancy", "--sigma", "0.75", "--T", "1000", "--n", "500", "--seed", "2"],
        ["charfn-compare", "--sigma", "0.75", "--T", "1e4", "--n", "300", "--seed", "3"],
        ["clt-box", "--theta", "0.1", "--T", "1e6", "--box=0,inf,-inf,inf", "--box=-1,1,-1,1"],
        ["moment-check", "--sigma", "0.75", "--Y", "100", "--k-max", "2", "--n", "2000", "--seed", "5"],
    ],
)
def test_every_command_runs(tmp_path, argv):
    out = tmp_path / "out.csv"
    assert run_command(argv + ["--out", str(out)]) == 0
    assert out.exists()
    man = json.loads((tmp_path / "out.manifest.json").read_text())
    assert man["command"] == argv[0]
