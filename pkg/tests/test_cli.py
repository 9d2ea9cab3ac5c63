import json
import subprocess
import sys

from wordperc.cli import main


def run_cli(args):
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


def test_sample_and_reach_roundtrip(tmp_path):
    cfg = str(tmp_path / "c.wpc")
    code, out = run_cli(
        ["sample", "--region", "box:m=2,d=2", "--p", "1.0", "--seed", "4", "--out", cfg]
    )
    assert code == 0
    meta = json.loads(out)
    assert meta["ones"] == 25
    code, out = run_cli(
        ["reach", "--cfg", cfg, "--word", "11", "--from", "0,0", "--witness"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["reached_vertices"] == 5  # origin plus its four neighbors
    assert all(len(path) <= 2 for path in doc["witnesses"].values())


def test_reach_relaxed_labeled(tmp_path):
    cfg = str(tmp_path / "c.wpc")
    run_cli(["sample", "--region", "box:m=2,d=2", "--p", "0.6", "--seed", "1", "--out", cfg])
    code, out = run_cli(
        ["reach", "--cfg", cfg, "--word", "101", "--from", "0,0", "--mode", "relaxed"]
    )
    assert code == 0
    assert "upper bound" in json.loads(out)["mode"]


def test_validation_exit_code():
    code, _ = run_cli(
        ["decay", "--p", "2.0", "--L", "99", "--R", "2", "--m-list", "1",
         "--trials", "5", "--seed", "1"]
    )
    assert code == 2


def test_capacity_exit_code(tmp_path):
    cfg = str(tmp_path / "c.wpc")
    run_cli(["sample", "--region", "box:m=1,d=2", "--p", "0.5", "--seed", "1", "--out", cfg])
    code, _ = run_cli(
        ["reach", "--cfg", cfg, "--word", "ones", "--from", "0,0",
         "--max-index", str((1 << 20) + 5)]
    )
    assert code == 3


def test_wierman_command(tmp_path):
    out_json = str(tmp_path / "w.json")
    code, out = run_cli(
        ["wierman", "--region", "box:m=1,d=2", "--p", "0.4", "--sources", "0,0",
         "--word", "011010010", "--trials", "50", "--seed", "7", "--out", out_json]
    )
    assert code == 0
    doc = json.loads(open(out_json).read())
    assert doc["result"]["successes"] == 50
    assert "written_at_unix" in doc["meta"]


def test_oriented_command():
    code, out = run_cli(
        ["oriented", "--stat", "crossing", "--n", "6", "--h", "6",
         "--gamma", "0.9", "--delta", "0.3", "--trials", "10", "--seed", "2"]
    )
    assert code == 0
    assert 0.0 <= json.loads(out)["result"]["frequency"] <= 1.0


def test_renorm_command_good_and_emn():
    code, out = run_cli(
        ["renorm", "--k", "2", "--p", "0.5", "--word", "alt",
         "--trials", "10", "--seed", "3"]
    )
    assert code == 0
    assert "estimate" in json.loads(out)["result"]
    code, out = run_cli(
        ["renorm", "--stat", "emn", "--k", "2", "--h", "2", "--p", "0.9",
         "--word", "ones", "--n", "2", "--m", "1", "--trials", "5", "--seed", "3",
         "--mode", "relaxed"]
    )
    assert code == 0
    assert json.loads(out)["result"]["kind"] == "emn"


def test_decay_command_with_csv(tmp_path):
    csv_path = str(tmp_path / "d.csv")
    code, out = run_cli(
        ["decay", "--p", "0.5", "--L", "2", "--R", "2", "--m-list", "0,1",
         "--dim", "2", "--mode", "exact", "--trials", "40", "--seed", "5",
         "--csv", csv_path]
    )
    assert code == 0
    assert open(csv_path).readline().startswith("m,q")


def test_spec_file_roundtrip(tmp_path):
    spec = {
        "schema": "wordperc-spec/1",
        "kind": "site",
        "params": {"region": {"kind": "box", "m": 1, "d": 2}, "p": 0.5, "vertex": [0, 0]},
        "trials": 200,
        "seed": 9,
    }
    spath = str(tmp_path / "spec.json")
    json.dump(spec, open(spath, "w"))
    code, out1 = run_cli(["--spec", spath])
    assert code == 0
    code, out2 = run_cli(["--spec", spath])
    assert json.loads(out1)["result"]["successes"] == json.loads(out2)["result"]["successes"]


def test_oracle_command():
    code, out = run_cli(["oracle", "--stride", "17"])
    assert code == 0
    assert out.count("PASS") == 3 and "FAIL" not in out


def test_console_entrypoint_help():
    proc = subprocess.run(
        [sys.executable, "-m", "wordperc.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "wordperc" in proc.stdout
