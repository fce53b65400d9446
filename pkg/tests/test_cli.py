import json
import subprocess
import sys
from pathlib import Path

import pytest

from zforge.certificate import SCHEMA_VERSION, build_certificate, digest, dumps
from zforge.cli import main
from zforge.series import IntegerPowerSeries


def run(argv, tmp_path, name="cert.json"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None, out


def verify(path, capsys):
    code = main(["verify", str(path)])
    return code, capsys.readouterr()


def test_expand_roundtrip(tmp_path, capsys):
    code, cert, path = run(["expand", "--base", '{"minpoly": [1, 0, 4], "approx": "1/2i", "radius": "1/10"}',
                            "--target", "1/3+1/3i", "--steps", "8"], tmp_path)
    assert code == 0
    assert cert["schema_version"] == SCHEMA_VERSION and cert["kind"] == "expand"
    assert cert["inputs_digest"] == digest(cert["inputs"])
    assert len(cert["result"]["remainder_bounds"]) == 9
    code, out = verify(path, capsys)
    assert code == 0 and json.loads(out.out)["ok"]


def test_detect_geometric(tmp_path):
    code, cert, _ = run(["detect", "--coeffs", "geometric", "--n", "2", "--N", "8"], tmp_path)
    assert code == 0
    assert cert["result"]["status"] == "DEPENDENT"
    assert sorted(map(tuple, cert["result"]["annihilator"])) == [(0, 0, "1/1"), (0, 1, "-1/1"), (1, 1, "1/1")]


def test_forge_and_tamper(tmp_path, capsys):
    code, cert, path = run(["forge", "--alphas", '[0, "1/2"]', "--probes", '["1/3"]', "--bits", "0101",
                            "--horizon", "4"], tmp_path)
    assert code == 0
    series = IntegerPowerSeries.from_json(cert["result"]["series"])
    assert series.to_json() == cert["result"]["series"]
    # tamper one bound so its claim no longer replays
    bad = json.loads(path.read_text())
    idx = next(i for i, c in enumerate(bad["claims"]) if c["relation"] == ">")
    bad["claims"][idx]["lhs"] = bad["claims"][idx]["rhs"]
    tampered = tmp_path / "tampered.json"
    tampered.write_text(dumps(bad))
    code, out = verify(tampered, capsys)
    assert code == 1
    failed = [c["id"] for c in json.loads(out.out)["claims"] if not c["pass"]]
    assert failed == [bad["claims"][idx]["id"]]


def test_digest_mismatch(tmp_path, capsys):
    _, cert, path = run(["liouville", "--a", "1/2", "--b", "1/3"], tmp_path)
    cert["inputs"]["a"] = "1/4"
    path.write_text(dumps(cert))
    code, out = verify(path, capsys)
    assert code == 2 and "digest mismatch" in out.err


def test_empty_claims_warn(tmp_path, capsys):
    p = tmp_path / "empty.json"
    p.write_text(dumps(build_certificate("custom", {"x": 1}, {}, [])))
    code, out = verify(p, capsys)
    assert code == 0 and "no claims" in out.err


@pytest.mark.parametrize("argv", [
    ["forge", "--alphas", '["1/2"]'],                              # 0 missing
    ["forge", "--alphas", "[0, 0.5]"],                              # floats rejected
    ["expand", "--base", "2", "--target", "1/3"],                   # |alpha| >= 1
    ["detect", "--coeffs", '["1", "1"]', "--n", "1", "--N", "5"],  # prefix too short
    ["lemma2", "--components", "[[1]]", "--probes", "nonsense"],
])
def test_input_errors_exit_2(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path / "x.json")]) == 2
    assert "error" in capsys.readouterr().err


def test_failing_claim_exits_1(tmp_path):
    # an injected initial schedule violates t_k >= C_k + k
    code, cert, _ = run(["lemma2", "--components", "[[-1], [1], [1]]", "--probes", '[0, "1/2", "1/3"]',
                         "--initial", "[0, 0, 1]"], tmp_path)
    assert code == 1
    assert any(not c["verdict"] for c in cert["claims"])


def test_determinism(tmp_path):
    argv = ["forge", "--alphas", '[0, "1/2"]', "--probes", '["1/3", "2/5"]', "--horizon", "4", "--composite"]
    main(argv + ["--out", str(tmp_path / "a.json")])
    main(argv + ["--out", str(tmp_path / "b.json")])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_plot_and_precision_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ZFORGE_PRECISION", "160")
    png = tmp_path / "f.png"
    code, _, _ = run(["detect", "--coeffs", "geometric", "--n", "2", "--N", "8", "--scan-to", "12",
                      "--plot", str(png)], tmp_path)
    assert code == 0 and png.read_bytes()[:4] == b"\x89PNG"
    monkeypatch.setenv("ZFORGE_PRECISION", "abc")
    assert main(["micro", "--samples", "10"]) == 2


def test_console_script_entry(tmp_path):
    out = tmp_path / "m.json"
    proc = subprocess.run([sys.executable, "-m", "zforge.cli", "micro", "--samples", "50", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["kind"] == "micro"


def test_certificates_match_json_schema(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((Path(__file__).resolve().parents[1] / "docs" / "certificate.schema.json").read_text())
    for i, argv in enumerate((["liouville", "--a", "1/2", "--b", "1/3"],
                              ["detect", "--coeffs", "exp", "--n", "2", "--N", "6"],
                              ["lemma2", "--components", "[[0, 1], [-1, 2]]", "--probes", '["1/5", "1/3"]'])):
        _, cert, _ = run(argv, tmp_path, f"c{i}.json")
        jsonschema.validate(cert, schema)
