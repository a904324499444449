import csv
import io
import json
import subprocess
import sys

import pytest

from bergcone.certificates import OkikioluCertificate
from bergcone.cli import main
from bergcone.decision import Verdict

S_FLAGS = ["--cone", "halfline", "--op", "S", "--alpha", "0", "--beta", "0", "--gamma", "1",
           "--nu", "1", "--mu", "1", "--p", "2", "--q", "2"]


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_decide_example(capsys):
    code, out, _ = run(capsys, ["decide"] + S_FLAGS)
    assert code == 0
    d = json.loads(out)
    assert d["status"] == "Bounded" and d["route"] == "cone-Lp-Lq"
    assert Verdict.from_dict(d).status == "Bounded"


def test_decide_scope_exit(capsys):
    code, out, _ = run(capsys, ["decide", "--p", "3", "--q", "2"])
    assert code == 2 and json.loads(out)["status"] == "ScopeError"


def test_decide_infinity_flag(capsys):
    code, out, _ = run(capsys, ["decide", "--alpha", "1", "--q", "inf"])
    d = json.loads(out)
    assert code == 0 and d["route"] == "cone-Lp-Linf" and d["params"]["q"] == "inf"


def test_bad_flags_exit_64(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["decide", "--p", "two"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["decide", "--cone", "sphere:2"])
    assert exc.value.code == 64


def test_certify_example(capsys):
    code, out, _ = run(capsys, ["certify"] + S_FLAGS)
    assert code == 0
    cert = OkikioluCertificate.from_dict(json.loads(out))
    assert 0.5 < cert.t < 1 and cert.kind == "ConeS"


def test_certify_unbounded_is_scope(capsys):
    code, _, err = run(capsys, ["certify"] + S_FLAGS[:-8] + ["--gamma", "3", "--nu", "1", "--mu", "1",
                                                              "--p", "2", "--q", "2"])
    assert code == 2 and json.loads(err)["error"] == "PreconditionError"


def test_verify_reports_constants(capsys):
    code, out, _ = run(capsys, ["verify"] + S_FLAGS)
    d = json.loads(out)
    assert code == 0 and d["M1"] > 0 and d["check"]["spread1"] < 0.01


def test_integrate_halfline_and_divergent(capsys):
    code, out, _ = run(capsys, ["integrate", "--s", "-3", "--t", "1"])
    d = json.loads(out)
    assert code == 0 and d["ratio"] == pytest.approx(0.5, rel=1e-8)
    code, out, _ = run(capsys, ["integrate", "--cone", "lorentz:3", "--s", "-2", "--t", "0.4"])
    d = json.loads(out)
    assert code == 3 and d["converges"] is False and d["estimate"]["diverging"] is True


def test_integrate_tube(capsys):
    code, out, _ = run(capsys, ["integrate", "--tube", "--alpha", "1.3", "--p", "2", "--q", "2",
                                "--nu", "1"])
    d = json.loads(out)
    assert code == 0 and d["exponent"] == pytest.approx(-0.6)


def test_scan_shape(capsys, tmp_path):
    path = tmp_path / "scan.csv"
    code, _, _ = run(capsys, ["scan", "--axes", "gamma,mu", "--grid", "50x50", "-o", str(path)])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert len(rows) == 2500
    assert {r["status"] for r in rows} >= {"Bounded", "Unbounded"}


def test_scan_bad_axes(capsys):
    code, _, _ = run(capsys, ["scan", "--axes", "gamma,zeta"])
    assert code == 64


def test_probe(capsys):
    code, out, _ = run(capsys, ["probe", "--cone", "lorentz:3", "--alpha", "0.2", "--beta", "0.1",
                                "--nu", "2", "--mu", "2"])
    d = json.loads(out)
    assert code == 0 and d["verdict"]["status"] == "Bounded"
    assert d["dilation"]["slope"] == pytest.approx(0.0, abs=0.02)
    assert not d["necessity"]["direct_diverges"]


def test_output_is_deterministic():
    cmd = [sys.executable, "-m", "bergcone", "verify"] + S_FLAGS
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
