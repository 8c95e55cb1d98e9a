import csv
import io

import pytest

from spatial_aloha import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_eval_zeta(capsys):
    code, out, _ = run(["eval", "--quantity", "zeta", "--beta", "4"], capsys)
    assert code == 0
    assert rows(out) == [{"quantity": "zeta", "value": "1.33333333333"}]


def test_eval_coverage(capsys):
    args = "eval --quantity coverage --mac slotted --fading rayleigh --lambda 1 --p 0.05 --T 10 --beta 4"
    code, out, _ = run(args.split(), capsys)
    assert code == 0
    assert float(rows(out)[0]["value"]) == pytest.approx(0.4583, abs=5e-5)


def test_eval_kappa_domain_error(capsys):
    code, _, err = run(["eval", "--quantity", "kappa", "--beta", "2"], capsys)
    assert code == 1
    assert "beta must exceed 2" in err


@pytest.mark.parametrize(
    "args",
    [
        ["eval", "--bogus"],
        ["frobnicate"],
        [],
        ["eval", "--quantity", "nonsense"],
        ["eval", "--mac", "renewal", "--tau", "1.5"],
        ["simulate", "--replications", "1"],
        ["reproduce", "fig6_mean_vs_max_tau"],
        ["eval", "--config", "/nonexistent/file.cfg"],
    ],
)
def test_usage_errors(args, capsys):
    assert run(args, capsys)[0] == 1


def test_numeric_failure_exit_code(monkeypatch, capsys):
    from spatial_aloha import analytic
    from spatial_aloha.errors import NumericFailure

    def fail(*args, **kwargs):
        raise NumericFailure("quadrature did not converge", 0.5, 1e-3)

    monkeypatch.setattr(analytic, "renewal_exponent_general", fail)
    code, _, err = run(["eval", "--quantity", "lt", "--mac", "renewal"], capsys)
    assert code == 2
    assert "numeric failure" in err and "0.001" in err


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    assert run(["eval", "--config", str(cfg)], capsys)[0] == 1


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("quantity = zeta\nbeta = 6\n")
    _, out, _ = run(["eval", "--config", str(cfg), "--beta", "4"], capsys)
    assert rows(out)[0]["value"] == "1.33333333333"
    _, out, _ = run(["eval", "--config", str(cfg)], capsys)
    assert rows(out)[0]["value"] == "1.5"


def test_global_flags_before_subcommand(capsys):
    code, out, _ = run(["--quad-rel-tol", "1e-9", "eval", "--quantity", "zeta"], capsys)
    assert code == 0 and "# quad-rel-tol = 1e-09" in out


def test_threshold_in_db_is_echoed_linear(capsys):
    _, out, _ = run(["eval", "--T-db", "10"], capsys)
    assert "# T = 10.0" in out and "T-db" not in out


@pytest.mark.parametrize(
    "args",
    [
        ["eval", "--quantity", "lt", "--mac", "renewal", "--fading", "nakagami", "--k", "2.5", "--xi", "0.7"],
        ["eval", "--quantity", "optima", "--mac", "rain", "--T-db", "7"],
        ["simulate", "--mac", "rain", "--tau-grid", "0.02,0.1", "--constraint", "both", "--replications", "50", "--window", "20"],
        ["reproduce", "fig5_ratio_fixed_tau", "--beta", "3"],
    ],
)
def test_output_round_trips_through_config(args, tmp_path, capsys):
    first = tmp_path / "first"
    second = tmp_path / "second"
    assert run(args + ["--out", str(first)], capsys)[0] == 0
    files = sorted(first.iterdir()) if first.is_dir() else [first]
    for f in files:
        target = second / f.name if first.is_dir() else second
        command = args[0]
        extra = [args[1]] if command == "reproduce" else []
        assert run([command, *extra, "--config", str(f), "--out", str(target if command != "reproduce" else second)], capsys)[0] == 0
        assert target.read_bytes() == f.read_bytes()


def test_simulate_columns_and_determinism(tmp_path, capsys):
    args = ["simulate", "--mac", "renewal", "--replications", "40", "--window", "20", "--seed", "3"]
    run(args + ["--out", str(tmp_path / "a.csv")], capsys)
    run(args + ["--out", str(tmp_path / "b.csv")], capsys)
    text = (tmp_path / "a.csv").read_text()
    assert text == (tmp_path / "b.csv").read_text()
    (row,) = rows(text)
    assert list(row) == ["tau", "constraint", "mean", "std_error", "ci95_halfwidth", "n", "seed"]
    assert row["n"] == "40" and row["seed"] == "3"


def test_reproduce_fig4(tmp_path, capsys):
    code, out, _ = run(["reproduce", "fig4_ratio_optimal", "--out", str(tmp_path)], capsys)
    assert code == 0
    table = rows((tmp_path / "fig4_ratio_optimal.csv").read_text())
    at_four = [r for r in table if float(r["x"]) == 4.0]
    assert float(at_four[0]["value"]) == pytest.approx(75.0, abs=1e-9)


def test_validate_fast(capsys):
    code, out, _ = run(["validate", "--level", "fast"], capsys)
    assert code == 0
    assert "6/6 criteria passed" in out


def test_validate_failure_exit_code(monkeypatch, capsys):
    from spatial_aloha import analytic

    real = analytic.kappa
    monkeypatch.setattr(analytic, "kappa", lambda beta, which="slotted": real(beta, which) * (1.01 if which == "slotted" else 1.0))
    code, out, _ = run(["validate", "--level", "fast"], capsys)
    assert code == 3
    assert "FAIL zeta-consistency" in out
