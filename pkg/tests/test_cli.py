import json
import subprocess
import sys

import pytest

from randstab.cli import main
from randstab.sampling import SampleBatch


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_pass(capsys):
    code, out, _ = run(capsys, "verify", "--compounder", "harris:a=3,k=2",
                       "--transform", "gamma:beta=0.5", "--c", "1/3", "--tol", "1e-12")
    assert code == 0
    rep = json.loads(out)
    assert rep["pass"] is True and rep["max_residual"] <= 1e-12


def test_verify_truncated_scale(capsys):
    # ten-digit c moves the residual to about 2e-11
    args = ["verify", "--compounder", "harris:a=3,k=2", "--transform", "gamma:beta=0.5",
            "--c", "0.3333333333"]
    assert run(capsys, *args, "--tol", "1e-12")[0] == 2
    assert run(capsys, *args, "--tol", "1e-10")[0] == 0


def test_verify_fail_exit(capsys):
    code, out, _ = run(capsys, "verify", "--compounder", "geometric1:p=0.5",
                       "--transform", "gamma:beta=1", "--c", "0.3")
    assert code == 2 and json.loads(out)["pass"] is False


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "--compounder", "geometric1:p=0.5",
                       "--transform", "ml:alpha=0.5,lambda=1", "--c", "0.25",
                       "--grid", "0.1:20:5", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "grid,residual" and len(out.splitlines()) == 6


def test_verify_sweep(capsys):
    code, out, _ = run(capsys, "verify", "--compounder", "geometric1:p=0.5",
                       "--transform", "gamma:beta=1", "--c-sweep", "0.4:0.6:3")
    assert code == 2
    assert [r["pass"] for r in json.loads(out)] == [False, True, False]


def test_verify_scale_search(capsys):
    code, out, _ = run(capsys, "verify", "--compounder", "degenerate:k=4",
                       "--transform", "pstable:alpha=0.5,lambda=1")
    assert code == 0 and json.loads(out)["scale"]["c"] == pytest.approx(0.0625)


def test_verify_discrete(capsys):
    code, _, _ = run(capsys, "verify", "--compounder", "geometric1:p=0.25",
                     "--discrete", "dml:alpha=0.5,lambda=1", "--c", "0.0625")
    assert code == 0


def test_identify_not_pgf(capsys):
    code, out, _ = run(capsys, "identify", "--transform", "gamma:beta=0.7", "--c", "0.5")
    rep = json.loads(out)
    assert code == 2 and rep["verdict"] == "not-a-pgf" and rep["matched"] is None


def test_identify_match(capsys):
    code, out, _ = run(capsys, "identify", "--transform", "gamma:beta=0.5", "--c", "1/3")
    rep = json.loads(out)
    assert code == 0 and rep["matched"]["family"] == "harris"
    assert rep["matched"]["params"]["k"] == 2


def test_identify_curve_csv(capsys):
    code, out, _ = run(capsys, "identify", "--transform", "gamma:beta=1", "--c", "0.5",
                       "--format", "csv")
    assert code == 0 and out.startswith("t,Q\n")


def test_identify_sweep_fails_if_any_invalid(capsys):
    code, out, _ = run(capsys, "identify", "--transform", "gamma:beta=0.7",
                       "--c-sweep", "0.3:0.6:2")
    assert code == 2 and len(json.loads(out)) == 2


def test_sample_binary(tmp_path, capsys):
    path = tmp_path / "b.bin"
    code, _, _ = run(capsys, "sample", "--transform", "gamma:beta=1", "--samples", "10",
                     "--seed", "7", "--format", "bin", "--out", str(path))
    assert code == 0
    b = SampleBatch.from_binary(path.read_bytes())
    assert b.n == 10 and b.seed == 7


def test_sample_csv_deterministic(capsys):
    args = ["sample", "--compounder", "harris:a=2,k=2", "--samples", "20", "--format", "csv"]
    a = run(capsys, *args)[1]
    b = run(capsys, *args)[1]
    assert a == b and "# seed=12648430" in a


def test_seed_env(capsys, monkeypatch):
    monkeypatch.setenv("RANDSTAB_SEED", "42")
    out = json.loads(run(capsys, "sample", "--transform", "gamma:beta=1", "--samples", "3")[1])
    assert out["seed"] == 42
    out = json.loads(run(capsys, "sample", "--transform", "gamma:beta=1", "--samples", "3",
                         "--seed", "5")[1])
    assert out["seed"] == 5


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"compounder": "geometric1:p=0.5", "transform": "gamma:beta=1",
                               "c": 0.3}))
    assert run(capsys, "verify", "--config", str(cfg))[0] == 2
    assert run(capsys, "verify", "--config", str(cfg), "--c", "0.5")[0] == 0


def test_mc_ks(capsys):
    code, out, _ = run(capsys, "mc", "--n", "geometric1:p=0.25", "--x", "ml:alpha=0.5,lambda=1",
                       "--c", "0.0625", "--samples", "100000", "--seed", "7")
    rep = json.loads(out)
    assert code == 0 and rep["test"] == "ks-two-sample" and rep["pvalue"] > 1e-3


def test_mc_tv(capsys):
    code, out, _ = run(capsys, "mc", "--n", "geometric1:p=0.5", "--x", "dml:alpha=1,lambda=1",
                       "--c", "0.5", "--samples", "20000")
    rep = json.loads(out)
    assert code == 0 and rep["test"] == "tv-pmf"


def test_mc_wrong_scale_fails(capsys):
    code, _, _ = run(capsys, "mc", "--n", "geometric1:p=0.25", "--x", "ml:alpha=0.5,lambda=1",
                     "--c", "0.2", "--samples", "20000")
    assert code == 2


@pytest.mark.parametrize("argv,token", [
    (["verify", "--compounder", "nosuch:a=1", "--transform", "gamma:beta=1", "--c", "0.5"], "nosuch"),
    (["verify", "--compounder", "harris:a=3,q=2", "--transform", "gamma:beta=1", "--c", "0.5"], "q=2"),
    (["verify", "--transform", "gamma:beta=1"], "compounder"),
    (["verify", "--bogus"], "bogus"),
    (["identify", "--transform", "gamma:beta=1", "--c", "abc"], "abc"),
    ([], "subcommand"),
])
def test_usage_errors(capsys, argv, token):
    code, _, err = run(capsys, *argv)
    assert code == 1 and token in err


def test_domain_error_exit(capsys):
    code, _, err = run(capsys, "verify", "--compounder", "geometric1:p=0.5",
                       "--transform", "gamma:beta=1", "--c", "1.5")
    assert code == 1 and "0 < c < 1" in err


def test_json_byte_stable(capsys):
    args = ["identify", "--transform", "gamma:beta=0.5", "--c", "1/3"]
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_console_module():
    out = subprocess.run([sys.executable, "-m", "randstab", "verify", "--compounder",
                          "harris:a=3,k=2", "--transform", "gamma:beta=0.5", "--c", "1/3"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["pass"]
