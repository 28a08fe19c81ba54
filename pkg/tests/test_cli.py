import csv
import json

import pytest

from brst_anomaly.cli import main
from brst_anomaly.config import ConfigError, load_config, parse_config_text, parse_overrides
from brst_anomaly.report import parse_expect, run_scan

FAST = ["--orbit_steps=2000"]


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


# -- config ----------------------------------------------------------------------------

def test_config_file_and_overrides(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# comment\nalpha = 3\nscheme = weyl  # trailing\n")
    cfg = load_config(p, parse_overrides(["--beta=0.5"]))
    assert (cfg.alpha, cfg.beta, cfg.scheme) == (3.0, 0.5, "weyl")


@pytest.mark.parametrize("text, msg", [
    ("gamma = 1", "unknown key"),
    ("alpha = 1\nalpha = 2", "duplicate"),
    ("alpha 1", "expected"),
    ("degree_cap = 2.5", "cannot read"),
])
def test_config_errors(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config_text(text)


def test_bad_override_and_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_overrides(["alpha=2"])
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_parse_expect():
    assert parse_expect("Anomalous", ["s1", "s2"]) == {"s1": "Anomalous", "s2": "Anomalous"}
    assert parse_expect("s2=NotObstructedAtOrder1", ["s1", "s2"]) == {"s2": "NotObstructedAtOrder1"}
    with pytest.raises(ConfigError):
        parse_expect("Broken", ["s1"])
    with pytest.raises(ConfigError):
        parse_expect("s3=Anomalous", ["s1"])


# -- starcheck -------------------------------------------------------------------------

def test_starcheck_default(capsys):
    code, out, _ = run(capsys, "starcheck", "--d1_samples=50", "--assoc_samples=10")
    d = json.loads(out)
    assert code == 0 and d["passed"]
    assert max(d["residuals"].values()) < 1e-10
    assert d["provenance"].startswith("fixture.json")


def test_starcheck_weyl_reports_symmetry(capsys):
    code, out, _ = run(capsys, "starcheck", "--scheme=weyl", "--d1_samples=20", "--assoc_samples=5")
    assert code == 0 and "weyl_even_odd_symmetry" in json.loads(out)["residuals"]


@pytest.mark.parametrize("arg", ["--alpha=0", "--scheme=moyal", "--E=-1", "--nope=1", "--alpha=x"])
def test_starcheck_invalid(capsys, arg):
    code, _, err = run(capsys, "starcheck", arg)
    assert code == 2 and "error" in err


# -- certify ---------------------------------------------------------------------------

def test_certify_default(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", *FAST, "--figures", str(tmp_path))
    d = json.loads(out)
    assert code == 0
    assert d["verdicts"] == {"s1": "Anomalous", "s2": "Anomalous"}
    assert max(d["master_equation"].values()) < 1e-12
    assert (tmp_path / "certificate.png").stat().st_size > 0


def test_certify_asymmetric(capsys):
    code, out, _ = run(capsys, "certify", *FAST, "--beta=1",
                       "--expect", "s1=Anomalous,s2=NotObstructedAtOrder1")
    assert code == 0 and json.loads(out)["expect"]["matched"]


def test_certify_expect_mismatch(capsys):
    code, out, _ = run(capsys, "certify", *FAST, "--observable", "s1", "--expect", "NotObstructedAtOrder1")
    assert code == 1 and not json.loads(out)["expect"]["matched"]


def test_certify_unperturbed_inconclusive(capsys):
    code, out, _ = run(capsys, "certify", *FAST, "--a=0", "--b=0", "--c=0")
    d = json.loads(out)
    assert code == 3 and set(d["verdicts"].values()) == {"Inconclusive"} and d["tori"] == []


def test_certify_not_positive_definite(capsys):
    code, _, err = run(capsys, "certify", "--c=-1.5")
    assert code == 2 and "positive definite" in err


def test_certify_writes_out_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "certify", *FAST, "--observable", "s2", "--out", str(out))
    assert code == 0 and stdout == ""
    assert list(json.loads(out.read_text())["verdicts"]) == ["s2"]


def test_certify_output_is_stable(capsys):
    _, a, _ = run(capsys, "certify", *FAST)
    _, b, _ = run(capsys, "certify", *FAST)
    assert a == b


# -- fomenko ---------------------------------------------------------------------------

def test_fomenko_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "fomenko", "--out", str(tmp_path), "--samples=50")
    d = json.loads(out)
    assert code == 0 and (d["black_vertices"], d["white_vertices"]) == (2, 1)
    for name in ("arc.csv", "omega1_zero.csv", "omega2_zero.csv"):
        with open(tmp_path / name) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["s1", "s2"] and len(rows) == 51
        float(rows[1][0])
    assert json.loads((tmp_path / "fomenko.json").read_text())["integral"] == "s2"
    assert (tmp_path / "fomenko.png").stat().st_size > 0


def test_fomenko_unperturbed_segment(capsys, tmp_path):
    code, out, _ = run(capsys, "fomenko", "--integral", "s1", "--a=0", "--b=0", "--c=0",
                       "--out", str(tmp_path), "--no-figures")
    d = json.loads(out)
    assert code == 0 and (d["black_vertices"], d["white_vertices"]) == (2, 0)
    assert not (tmp_path / "fomenko.png").exists()


# -- scan ------------------------------------------------------------------------------

def test_scan_alpha(capsys):
    code, out, _ = run(capsys, "scan", *FAST, "--sweep", "alpha=0.5,1,2", "--sweep", "beta=1",
                       "--observable", "s1")
    res = json.loads(out)
    assert code == 0
    assert [r["verdicts"]["s1"] for r in res] == ["Anomalous", "NotObstructedAtOrder1", "Anomalous"]


def test_scan_empty(capsys):
    code, out, _ = run(capsys, "scan")
    assert code == 0 and json.loads(out) == []


def test_scan_records_point_errors(capsys):
    code, out, _ = run(capsys, "scan", *FAST, "--sweep", "c=-0.9,-1.0,-1.5", "--jobs", "2")
    res = json.loads(out)
    assert code == 0
    assert [r["status"] for r in res] == ["ok", "error", "error"]
    assert "positive definite" in res[2]["error"]


def test_scan_bad_axis(capsys):
    code, _, _ = run(capsys, "scan", "--sweep", "gamma=1")
    assert code == 2
    code, _, _ = run(capsys, "scan", "--sweep", "alpha=1", "--sweep", "alpha=2")
    assert code == 2
