import csv
import io
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from dpkl.cli import main
from dpkl.exceptions import InputError
from dpkl.io import DataParseError, ingest

FAST = ["--N", "100", "--M", "10", "--r1", "200", "--r2", "200"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def read_tsv(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines)), delimiter="\t"))


@pytest.fixture
def normal_file(tmp_path):
    path = tmp_path / "normal.txt"
    path.write_text("\n".join(repr(v) for v in np.random.default_rng(0).normal(size=20).tolist()))
    return path


# -- ingest --------------------------------------------------------------------

def test_ingest_rainfall(rainfall_file, rainfall):
    x = ingest(rainfall_file)
    assert x.size == 35 and x[0] == 86.8 and x[-1] == 80.0
    np.testing.assert_array_equal(x, rainfall)


def test_ingest_mixed_separators(tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("1, 2\n3")
    np.testing.assert_array_equal(ingest(p), [1.0, 2.0, 3.0])


def test_ingest_names_bad_token(tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("1 two 3")
    with pytest.raises(DataParseError, match="'two'") as info:
        ingest(p)
    assert (info.value.line, info.value.column, info.value.token) == (1, 3, "two")


@pytest.mark.parametrize("text", ["", "  \n,\n", "1 nan"])
def test_ingest_empty_or_nonfinite(tmp_path, text):
    p = tmp_path / "d.txt"
    p.write_text(text)
    with pytest.raises(InputError):
        ingest(p)


def test_ingest_missing_file(tmp_path):
    with pytest.raises(InputError):
        ingest(tmp_path / "absent.txt")


# -- check ---------------------------------------------------------------------

def test_check_json(capsys, rainfall_file):
    code, out, _ = run(capsys, "check", "--data", rainfall_file, "--family", "gumbel",
                       "--a", 1, "--a", 5, "--seed", 7, *FAST)
    assert code == 0
    doc = json.loads(out)
    assert doc["a_grid"] == [1.0, 5.0]
    assert doc["config"] == {"N": 100, "M": 10, "i0": 1, "r1": 200, "r2": 200, "seed": 7}
    assert doc["data"]["n"] == 35 and doc["model"]["family"] == "gumbel"
    rep = doc["reports"][0]
    assert rep["display"]["rb0"] == f"{rep['rb0']:.4f}"
    assert rep["config"]["a"] == 1.0 and rep["bin_edges"][-1] is None


def test_check_tsv_matches_json(capsys, rainfall_file):
    args = ["check", "--data", rainfall_file, "--family", "gumbel", "--seed", 7, *FAST]
    _, js, _ = run(capsys, *args)
    code, tsv, _ = run(capsys, *args, "--format", "tsv")
    assert code == 0
    rows = read_tsv(tsv)
    reports = json.loads(js)["reports"]
    assert [float(r["a"]) for r in rows] == [1.0, 5.0, 10.0]
    for row, rep in zip(rows, reports):
        assert float(row["rb0"]) == rep["rb0"]
        assert float(row["d_star"]) == rep["d_star"]
        assert float(row["strength"]) == rep["strength"]
        assert row["error"] == ""


def test_check_is_byte_identical(capsys, rainfall_file):
    args = ["check", "--data", rainfall_file, "--family", "gumbel", "--seed", 9, *FAST]
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args, "--jobs", 2)
    assert first == second


def test_check_warns_for_large_a(capsys, normal_file):
    code, _, err = run(capsys, "check", "--data", normal_file, "--family", "normal",
                       "--a", 15, "--seed", 1, *FAST)
    assert code == 0 and "exceeds half the sample size" in err


def test_random_seed_is_printed(capsys, normal_file):
    code, out, err = run(capsys, "check", "--data", normal_file, "--family", "normal",
                         "--a", 1, "--random-seed", *FAST)
    assert code == 0
    seed = int(err.split("--seed")[1].split()[0])
    assert json.loads(out)["config"]["seed"] == seed


@pytest.mark.parametrize("argv", [
    ["check", "--data", "x.txt", "--seed", "1"],                      # no family
    ["check", "--data", "x.txt", "--family", "normal"],               # no seed
    ["check", "--data", "x.txt", "--family", "weibull", "--seed", "1"],
    ["check", "--data", "x.txt", "--family", "normal", "--seed", "1", "--a", "0"],
    ["check", "--data", "x.txt", "--family", "normal", "--seed", "1", "--N", "3"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_config_errors_are_usage_errors(capsys, normal_file):
    code, _, err = run(capsys, "check", "--data", normal_file, "--family", "normal",
                       "--seed", 1, "--M", 10, "--i0", 10)
    assert code == 2 and "i0" in err


def test_parse_error_exit_code(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1 two 3\n")
    code, out, err = run(capsys, "check", "--data", p, "--family", "normal", "--seed", 1, *FAST)
    assert code == 3 and out == "" and "two" in err


def test_fit_failure_exit_code(capsys, tmp_path):
    p = tmp_path / "flat.txt"
    p.write_text("2 2 2 2 2\n")
    code, _, err = run(capsys, "check", "--data", p, "--family", "gumbel", "--seed", 1, *FAST)
    assert code == 4 and "numerical failure" in err


# -- elicit --------------------------------------------------------------------

def test_elicit_table(capsys):
    code, out, _ = run(capsys, "elicit", "--a", 1, "--a", 5, "--a", 10, "--a", 20, "--N", 200)
    assert code == 0
    rows = read_tsv(out)
    values = [float(r["expected_kl"]) for r in rows]
    assert all(x > y for x, y in zip(values, values[1:]))
    assert [r["expected_kl_4dp"] for r in rows] == ["1.2361", "0.5135", "0.3041", "0.1738"]
    assert "m=14" in out.splitlines()[0]


def test_elicit_single_row_json(capsys):
    code, out, _ = run(capsys, "elicit", "--a", 2, "--format", "json")
    doc = json.loads(out)
    assert code == 0 and len(doc["rows"]) == 1 and doc["config"] == {"N": 200, "m": 14}


def test_elicit_rejects_zero_a(capsys):
    with pytest.raises(SystemExit) as info:
        main(["elicit", "--a", "0"])
    assert info.value.code == 2


@pytest.mark.parametrize("extra", [["--m", "1"], ["--N", "4"], ["--m", "100"]])
def test_elicit_rejects_bad_window(capsys, extra):
    code, _, err = run(capsys, "elicit", "--a", 1, *extra)
    assert code == 2 and "m" in err


# -- simulate ------------------------------------------------------------------

def test_simulate_reproducible(capsys):
    args = ["simulate", "--truth", "normal:0,1", "--family", "normal-location", "--n", 20,
            "--replications", 1, "--a", 1, "--seed", 5, *FAST]
    code, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert code == 0 and first == second
    doc = json.loads(first)
    assert doc["aggregate"][0]["completed"] == 1 and len(doc["runs"]) == 1


def test_simulate_tsv(capsys):
    code, out, _ = run(capsys, "simulate", "--truth", "t:0.5", "--family", "normal-location",
                       "--replications", 2, "--a", 5, "--seed", 5, "--format", "tsv", *FAST)
    rows = read_tsv(out)
    assert code == 0 and len(rows) == 1 and rows[0]["completed"] == "2"


def test_simulate_bad_truth(capsys):
    code, _, err = run(capsys, "simulate", "--truth", "normal:0", "--family", "normal",
                       "--seed", 1, *FAST)
    assert code == 2


# -- densities -----------------------------------------------------------------

def test_densities_tsv(capsys, normal_file):
    code, out, _ = run(capsys, "densities", "--data", normal_file, "--family", "normal-location",
                       "--a", 1, "--seed", 3, "--N", 200, "--r1", 300, "--r2", 250)
    assert code == 0
    rows = read_tsv(out)
    kinds = [r["kind"] for r in rows]
    assert kinds.count("prior") == 300 and kinds.count("posterior") == 250
    header = {l.split()[1]: dict(kv.split("=") for kv in l.split()[2:])
              for l in out.splitlines() if l.startswith("# prior") or l.startswith("# posterior")}
    assert float(header["posterior"]["median"]) < float(header["prior"]["q05"])


def test_densities_json_round_trip(capsys, normal_file):
    args = ["densities", "--data", normal_file, "--family", "normal", "--a", 2, "--seed", 3, *FAST]
    _, js, _ = run(capsys, *args, "--format", "json")
    _, tsv, _ = run(capsys, *args)
    doc = json.loads(js)
    rows = read_tsv(tsv)
    assert [float(r["divergence"]) for r in rows if r["kind"] == "prior"] == doc["prior"]
    assert [float(r["divergence"]) for r in rows if r["kind"] == "posterior"] == doc["posterior"]


def test_densities_needs_single_a(capsys, normal_file):
    code, _, _ = run(capsys, "densities", "--data", normal_file, "--family", "normal",
                     "--a", 1, "--a", 2, "--seed", 3, *FAST)
    assert code == 2


# -- entry points --------------------------------------------------------------

def test_module_entry_point(rainfall_file):
    proc = subprocess.run([sys.executable, "-m", "dpkl", "elicit", "--a", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "1.2361" in proc.stdout


@pytest.mark.skipif(shutil.which("dpkl") is None, reason="console script not installed")
def test_console_script(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("oops")
    proc = subprocess.run(["dpkl", "check", "--data", str(p), "--family", "normal", "--seed", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 3
