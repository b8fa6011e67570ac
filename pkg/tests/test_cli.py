import json
import math

import pytest

from thermopress.cli import run


def test_pressure_json(tmp_path):
    out = tmp_path / "p"
    assert run(["pressure", "--system", "full2", "--phi", "0,1", "--out", str(out)]) == 0
    data = json.loads((tmp_path / "p.json").read_text())
    assert data["value"] == pytest.approx(math.log(1 + math.e), abs=1e-12)
    assert [p.name for p in tmp_path.iterdir()] == ["p.json"]  # no temp files left behind


def test_spectrum_row(tmp_path):
    out = tmp_path / "s"
    assert run(["spectrum", "--system", "full2", "--phi", "0,1", "--alpha", "0.25", "--out", str(out)]) == 0
    header, row = (tmp_path / "s.csv").read_text().splitlines()
    assert header == "alpha,value,q_star,maximizer_id"
    cols = row.split(",")
    assert float(cols[1]) == pytest.approx(0.562335, abs=1e-6)
    assert float(cols[2]) == pytest.approx(-math.log(3), abs=1e-8)


def test_outputs_are_byte_identical(tmp_path):
    argv = ["synthesize", "--system", "golden", "--seed", "4"]
    assert run(argv + ["--out", str(tmp_path / "a")]) == 0
    assert run(argv + ["--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_job_file_and_override(tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"experiment": "pressure", "system": "golden", "phi": "0,0",
                               "output": str(tmp_path / "j")}))
    assert run(["job", "--job", str(job)]) == 0
    assert json.loads((tmp_path / "j.json").read_text())["value"] == pytest.approx(math.log((1 + 5**0.5) / 2))
    assert run(["job", "--job", str(job), "--system", "full2"]) == 0
    assert json.loads((tmp_path / "j.json").read_text())["value"] == pytest.approx(math.log(2))


@pytest.mark.parametrize("argv,code", [
    (["pressure", "--bogus"], 64),
    (["nonsense"], 64),
    ([], 64),
    (["job"], 64),
    (["pressure", "--system", "nope"], 1),
    (["pressure", "--system", "{\"alphabet\": 2}"], 1),
    (["pressure", "--system", "full2", "--phi", "1,2,3"], 1),
    (["bowen-root", "--system", "full2", "--phi", "0,1"], 1),
])
def test_exit_codes(argv, code, capsys):
    assert run(argv) == code


@pytest.mark.parametrize("argv", [
    ["star", "--system", "full2", "--phi", "0,1", "--alpha", "0.25"],
    ["bowen-root", "--system", "golden"],
    ["pp", "--system", "full2", "--phi", "0,1", "--points", "001", "--depth", "8,16"],
    ["ns"],
    ["betashift", "--beta", "golden", "--depth", "20"],
    ["truncate"],
    ["spectrum", "--system", "mp:0.5", "--depth", "10", "--alpha", "0.5"],
])
def test_other_experiments_run(argv, tmp_path):
    assert run(argv + ["--out", str(tmp_path / "o")]) == 0
    assert any(tmp_path.iterdir())


def test_verify_failure_code(monkeypatch, tmp_path):
    from thermopress import suite

    real = suite.property_suite

    def broken(*a, **k):
        rep = real(*a, **k)
        rep.add("forced", [1.0], 0.0)
        return rep

    monkeypatch.setattr(suite, "property_suite", broken)
    assert run(["verify", "--seed", "1", "--out", str(tmp_path / "v")]) == 2
