import json

import pytest

from laplace_tails import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_reports_abscissa(capsys):
    code, out, _ = run(capsys, "analyze", "--fn", "1/(1+log(1+x))")
    assert code == 0
    report = json.loads(out)
    assert report["result"]["omega0"] == pytest.approx(-0.6321, abs=1e-4)
    assert {"theta", "gamma", "delta", "c1", "c2"} <= set(report["certificates"])
    result = report["result"]
    assert result["radius_estimate"] == pytest.approx(0.6321, abs=1e-4)
    assert result["branch_check_residual"] < 1e-12
    assert len(result["coeff_window"]) > 8


def test_catalog_lists_families(capsys):
    code, out, _ = run(capsys, "catalog")
    families = json.loads(out)["result"]["families"]
    for key in ("log1p", "iterlog:n", "stable:alpha", "relativistic:alpha:m", "stablelog:alpha",
                "powres:alpha", "logres", "logpowres:alpha"):
        assert key in families


def test_csv_is_bit_identical_across_runs(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(capsys, "invert", "--fn", "geometric", "--grid", "log:0.5:4:5", "--csv", str(p))[0] == 0
    a, b = (p.read_text() for p in paths)
    assert a == b
    header, first = a.splitlines()[:2]
    assert header == "x,density,closed_form,rel_err"
    assert float(first.split(",")[1]) == json.loads(json.dumps(float(first.split(",")[1])))
    assert not list(tmp_path.glob(".tmp-*"))


def test_json_report_written(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, _, _ = run(capsys, "kernel", "--phi", "geometric", "--d", "1", "--grid", "log:0.5:2:3",
                     "--json", str(target))
    assert code == 0
    report = json.loads(target.read_text())
    assert report["certificates"]["kappa"] == pytest.approx(1.0)
    assert report["table"]["columns"] == ["r", "value", "envelope", "ratio", "regime"]


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\ngrid = log:1:2:2\nn = 16\nrichardson = 0\n")
    code, out, _ = run(capsys, "invert", "--fn", "geometric", "--config", str(cfg), "--n", "32")
    inputs = json.loads(out)["inputs"]
    assert code == 0 and inputs["n"] == 32 and inputs["grid"] == "log:1:2:2" and inputs["richardson"] == 0


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["invert"],
    ["invert", "--fn", "1/(1+"],
    ["invert", "--fn", "geometric", "--grid", "log:0:1:5"],
    ["invert", "--fn", "geometric", "--prec-bits", "16"],
    ["appendix", "--b", "0", "--a", "0.5", "--f", "(1+x)^(-2)", "--certificate", "1,2"],
])
def test_usage_errors_exit_1(argv, capsys):
    assert run(capsys, *argv)[0] == cli.EXIT_USAGE


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = red\n")
    assert run(capsys, "catalog", "--config", str(cfg))[0] == cli.EXIT_USAGE


def test_numerical_failure_exit_2(capsys):
    code, _, err = run(capsys, "envelope", "--fn", "exp(-x)", "--grid", "log:1:2:2")
    assert code == cli.EXIT_NUMERICAL
    assert "A3FitError" in err


def test_appendix_command(capsys):
    code, out, _ = run(capsys, "appendix", "--grid", "log:2:50:3")
    rows = json.loads(out)["table"]["rows"]
    assert code == 0 and rows[-1][3] == pytest.approx(1.7724538509, rel=0.01)


def test_verify_exit_code_reflects_suite(monkeypatch, capsys):
    from laplace_tails import acceptance
    ok = acceptance.CriterionResult(1, "stub", True)
    monkeypatch.setattr(acceptance, "run_all", lambda echo=None: [ok])
    assert run(capsys, "verify")[0] == cli.EXIT_OK
    bad = acceptance.CriterionResult(2, "stub", False)
    monkeypatch.setattr(acceptance, "run_all", lambda echo=None: [ok, bad])
    assert run(capsys, "verify")[0] == cli.EXIT_ACCEPTANCE


def test_envelope_table_columns(capsys):
    code, out, _ = run(capsys, "envelope", "--fn", "geometric", "--grid", "log:0.5:4:3")
    table = json.loads(out)["table"]
    assert table["columns"] == ["t", "nu_hat", "lower", "upper", "ratio_low", "ratio_up"]
    for t, nu, lo, hi, rlo, rup in table["rows"]:
        assert lo <= nu <= hi and rlo >= 1 >= rup


def test_jump_kernel_command(capsys):
    code, out, _ = run(capsys, "kernel", "--phi", "stable:1", "--kind", "jump", "--grid", "log:0.5:2:3")
    report = json.loads(out)
    assert code == 0 and report["certificates"]["beta"] == 0.0
    assert [row[4] for row in report["table"]["rows"]] == ["i", "i", "iii"]
