import csv
import io
import json
from importlib import resources

import jsonschema
import numpy as np
import pytest

from decobound import cli, nosignalling
from decobound.cli import CHANNELS, main
from decobound.errors import LpError
from decobound.quantum import TSIRELSON

SCHEMA = json.loads(resources.files("decobound").joinpath("data/output.schema.json").read_text())
FAST = {"region": ["--grid", "9"], "channels": ["--grid", "5"], "optomech": ["--grid", "33"],
        "simulate": [], "certify": []}


@pytest.fixture
def small(tmp_path, monkeypatch):
    """Config with a short simulation, so tests stay quick."""
    p = tmp_path / "small.ini"
    p.write_text("[simulate]\nrounds = 20000\nruns = 3\n")
    monkeypatch.delenv("DECOBOUND_CONFIG", raising=False)
    return str(p)


def run_csv(tmp_path, command, *extra, name="out.csv"):
    out = tmp_path / name
    assert main([command, "--out", str(out), *extra]) == 0
    raw = out.read_bytes()
    return raw, list(csv.reader(io.StringIO(raw.decode(), newline="")))


def test_region(tmp_path):
    raw, rows = run_csv(tmp_path, "region", "--grid", "5")
    assert rows[0] == ["beta", "lambda", "dec_bound_quantum", "delta", "gpt_dec_bound"]
    assert len(rows) == 6
    assert raw.count(b"\r\n") == 6 and b"\n" not in raw.replace(b"\r\n", b"")
    first = rows[1]
    assert float(first[0]) == 2.0 and float(first[2]) == 1.0 and float(first[4]) == 1.0
    for r in rows[1:]:
        assert (r[2] == "NA") == (float(r[0]) > TSIRELSON)


def test_channels(tmp_path):
    _, rows = run_csv(tmp_path, "channels", "--grid", "5")
    assert rows[0] == ["channel", "noise", "beta", "dec", "dec_bound_quantum"]
    body = rows[1:]
    assert [r[0] for r in body] == [c for c in CHANNELS for _ in range(5)]
    by = {c: [r for r in body if r[0] == c] for c in CHANNELS}
    for c in CHANNELS:
        noise0 = by[c][0]
        assert float(noise0[1]) == 0.0
        assert float(noise0[2]) == pytest.approx(TSIRELSON) and float(noise0[3]) == pytest.approx(0.25)
    last = by["depolarizing-standard"][-1]
    assert float(last[2]) == pytest.approx(0.0, abs=1e-12) and float(last[3]) == pytest.approx(1.0)
    for s, o in zip(by["dephasing-standard"], by["dephasing-optimal"]):
        assert float(o[2]) >= float(s[2]) - 1e-12
    for r in body:
        assert float(r[3]) <= float(r[4]) + 1e-9


def test_optomech_quiet_mirror(tmp_path):
    cfg = tmp_path / "vac.ini"
    cfg.write_text("[materials]\nvacuum = 0\n[optomech]\ntemperatures = 0\nmaterials = vacuum\n")
    _, rows = run_csv(tmp_path, "optomech", "--config", str(cfg), "--grid", "5")
    head = rows[0]
    dec = [float(r[head.index("dec_grav")]) for r in rows[1:]]
    assert dec[0] == 0.25 and dec[-1] == pytest.approx(0.25)
    assert all(d > 0.25 for d in dec[1:-1])
    assert float(rows[1][head.index("gap")]) == 0.0
    summary = list(csv.reader(open(tmp_path / "out.summary.csv", newline="")))
    assert summary[0][-1] == "falsifiable" and summary[1][-1] == "false"


def test_simulate(tmp_path, small):
    _, rows = run_csv(tmp_path, "simulate", "--config", small, "--seed", "3")
    assert len(rows) == 4
    counts = list(csv.reader(open(tmp_path / "out.counts.csv", newline="")))
    assert len(counts) == 1 + 3 * 16
    assert sum(int(r[-1]) for r in counts[1:] if r[0] == "0") == 20000


@pytest.mark.parametrize("command", list(FAST))
def test_json_validates(tmp_path, small, command):
    out = tmp_path / "o.json"
    assert main([command, "--config", small, "--format", "json", "--out", str(out), *FAST[command]]) == 0
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, SCHEMA)
    assert doc["command"] == command


@pytest.mark.parametrize("command", list(FAST))
def test_deterministic(tmp_path, small, command):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for p in (a, b):
        assert main([command, "--config", small, "--out", str(p), *FAST[command]]) == 0
    assert a.read_bytes() == b.read_bytes()
    for extra in tmp_path.glob("a.*.csv"):
        assert extra.read_bytes() == (tmp_path / extra.name.replace("a.", "b.", 1)).read_bytes()


def test_stdout(capsys):
    assert main(["region", "--grid", "2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("beta,lambda,") and out.count("\r\n") == 3


def test_exit_codes(tmp_path, capsys, monkeypatch):
    assert main(["region", "--out", str(tmp_path / "missing" / "x.csv"), "--grid", "3"]) == 2
    assert main(["region", "--config", str(tmp_path / "absent.ini")]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[optomech]\ng0 = -1\n")
    assert main(["optomech", "--config", str(bad)]) == 3
    assert "optomech.g0" in capsys.readouterr().err
    assert main(["region", "--grid", "1"]) == 3
    capsys.readouterr()
    strict = tmp_path / "strict.ini"
    strict.write_text("[tolerances]\ncertificate = 0\n")
    assert main(["certify", "--config", str(strict), "--out", str(tmp_path / "c.csv")]) == 4
    failed = json.loads(capsys.readouterr().err)["failed"]
    assert failed and all(f["passed"] is False for f in failed)

    def broken(lam):
        raise LpError("stalled")

    monkeypatch.setattr(nosignalling, "delta_of_lambda", broken)
    assert main(["region", "--grid", "3"]) == 5


def test_certify_defaults(tmp_path):
    _, rows = run_csv(tmp_path, "certify")
    assert rows[0] == ["suite", "check", "samples", "value", "relation", "bound", "passed"]
    assert all(r[-1] == "true" for r in rows[1:])
    assert {r[0] for r in rows[1:]} >= {"sdp", "oracle", "tightness", "converse", "lp"}


def test_cells():
    assert cli._cell(float("nan")) == "NA" and cli._cell(np.True_) == "true" and cli._cell(0.1) == "0.1"
    assert cli._json_cell(float("inf")) == "NA"
