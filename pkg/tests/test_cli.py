import json

import pytest

from fbmarea.cli import main


def _body(path):
    return [l for l in path.read_text().splitlines() if not l.startswith("# generated")]


def _rows(path):
    return [l.split(",") for l in path.read_text().splitlines() if not l.startswith("#")]


def test_area_sweep_columns(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["area", "sweep", "--alpha", "0.2", "--k-min", "4", "--k-max", "6", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["lambda_cutoff", "variance", "fitted_slope"]
    assert [float(r[0]) for r in rows[1:]] == [16.0, 32.0, 64.0]
    assert len({r[2] for r in rows[1:]}) == 1
    text = out.read_text()
    assert "# config_hash:" in text and "# provenance:" in text


def test_same_config_twice_is_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["fields", "mc", "--alpha", "0.2", "--rho", "4", "--nodes-per-band", "32", "--seed", "5",
            "--replicas", "300", "--lag-exp", "2"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert _body(a) == _body(b)


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schema": 1, "alpha": 0.15, "rho": 3}))
    out = tmp_path / "o.csv"
    assert main(["fields", "variance", "--config", str(cfg), "--rho", "4", "--lag-exp", "1", "--out", str(out)]) == 0
    header = next(l for l in out.read_text().splitlines() if l.startswith("# config:"))
    resolved = json.loads(header.split(":", 1)[1])
    assert resolved["alpha"] == 0.15 and resolved["rho"] == 4


@pytest.mark.parametrize("argv", [
    ["fields", "variance", "--alpha", "0.7"],
    ["fields", "mc", "--alpha", "0.2"],
    ["interact", "constants", "--alpha", "0.3"],
    ["area", "sweep", "--bogus"],
    ["nonsense"],
    ["cluster", "cayley", "--n", "9"],
])
def test_validation_exit_code(argv, capsys):
    assert main(argv) == 2


def test_unreliable_mc_exit_code(tmp_path):
    out = tmp_path / "mc.csv"
    code = main(["interact", "mc", "--alpha", "0.2", "--rho", "2", "--lambda", "5", "--seed", "1",
                 "--replicas", "100", "--nodes-per-band", "16", "--out", str(out)])
    assert code == 3
    assert _rows(out)[1][-1] == "False"


def test_wick_moment_one_based(tmp_path):
    cov = tmp_path / "c.csv"
    cov.write_text("2,0.5\n0.5,1\n")
    out = tmp_path / "w.csv"
    assert main(["wick", "moment", "--cov", str(cov), "--indices", "1,1,2,2", "--out", str(out)]) == 0
    row = _rows(out)[1]
    assert float(row[1]) == pytest.approx(2 * 1 + 2 * 0.25)
    assert row[2] == "3"
    assert main(["wick", "moment", "--cov", str(cov), "--indices", "0,1"]) == 2


def test_cayley_and_lint(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["cluster", "cayley", "--n", "5", "--out", str(out)]) == 0
    assert all(r[4] == "True" for r in _rows(out)[1:])
    poly = tmp_path / "p.json"
    poly.write_text(json.dumps({"intervals": [{"j": 1, "k": 0}, {"j": 2, "k": 3}], "hlinks": [], "vlinks": []}))
    assert main(["cluster", "polymer-lint", str(poly), "--out", str(tmp_path / "l.csv")]) == 2


def test_pc_classify(tmp_path):
    out = tmp_path / "pc.csv"
    assert main(["pc", "classify", "--alpha", "0.2", "--out", str(out)]) == 0
    rows = {r[0]: r for r in _rows(out)[1:]}
    assert rows["sigma sigma"][2] == "True"
    assert rows["sigma"][2] == "False" and rows["sigma"][3] == "True"
    assert "N_ext_max 4" in out.read_text()


def test_bk_verify(tmp_path):
    out = tmp_path / "bk.csv"
    assert main(["cluster", "bk-verify", "--n", "3", "--trials", "3", "--seed", "2", "--out", str(out)]) == 0
    assert all(r[-1] == "True" for r in _rows(out)[1:])


def test_report_subset(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["report", "acceptance", "--only", "1,11", "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0][:3] == ["criterion", "name", "status"]
    assert [r[2] for r in rows[1:]] == ["PASS", "PASS"]
    assert "[PASS]" in capsys.readouterr().err
