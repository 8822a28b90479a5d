import json

import pytest
from click.testing import CliRunner

from reductionlab import cli as cli_module
from reductionlab.cli import cli, main
from reductionlab.selector import read_trial_log


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, *args):
    return runner.invoke(cli, [str(a) for a in args], catch_exceptions=False)


class TestPublishedCheck:
    def test_all_pass(self, runner):
        res = run(runner, "paper-check")
        assert res.exit_code == 0
        assert "FAIL" not in res.output and "ALL PASS" in res.output
        assert "1253" in res.output

    def test_tampered_u_breaks_ledger(self, runner):
        res = run(runner, "paper-check", "--u", 633, "--format", "json-report")
        data = json.loads(res.output)
        failed = {c["name"] for c in data["checks"] if not c["passed"]}
        assert "ledger u - d = N_L - N_S" in failed
        assert not data["all_passed"]


class TestReplicate:
    def test_single_trial_report(self, runner):
        data = json.loads(run(runner, "replicate", "--trials", 1).output)
        t = data["tally"]
        assert t["u"] + t["d"] + t["e"] == t["N"] == 1
        assert data["ledger_ok"]
        assert data["config"]["seed"] == 0

    def test_published_p0_supplied(self, runner):
        data = json.loads(run(runner, "replicate", "--seed", 11, "--p0", 0.5044).output)
        assert data["p0_source"] == "supplied"
        assert (data["rounded"]["p"], data["rounded"]["q"], data["rounded"]["r"]) == (0.25, 0.25, 0.5)
        assert data["rounded"]["sigma_ud"] == 35.4
        assert abs(data["stats"]["u"] - data["stats"]["d"]) <= 4 * 35.4
        assert data["stats"]["sigma_ud"] == pytest.approx(35.354, abs=1e-3)

    def test_csv_to_stdout(self, runner):
        out = run(runner, "replicate", "--trials", 20, "--format", "csv").output
        assert len(read_trial_log(out)) == 20

    def test_outputs_written_and_byte_identical(self, runner, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["replicate", "--trials", 3000, "--seed", 99, "--bias-variant", "original", "--beta", 0.3]
        run(runner, *args, "--out", a, "--workers", 1)
        run(runner, *args, "--out", b, "--workers", 8)
        for name in ("report.json", "trials.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()
        assert not [p for p in a.iterdir() if p.name.startswith(".")]

    def test_config_round_trip(self, runner, tmp_path):
        first = tmp_path / "first"
        run(runner, "replicate", "--trials", 500, "--seed", 5, "--bias-variant", "original", "--beta", "inf",
            "--origin", "cm", "--rate-left", 1.2, "--out", first)
        second = tmp_path / "second"
        run(runner, "replicate", "--config", first / "report.json", "--out", second)
        assert (first / "trials.csv").read_bytes() == (second / "trials.csv").read_bytes()
        assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()
        assert json.loads((first / "report.json").read_text())["config"]["beta"] == "inf"

    def test_flags_override_config(self, runner, tmp_path):
        conf = tmp_path / "c.json"
        conf.write_text(json.dumps({"trials": 10, "seed": 1}))
        data = json.loads(run(runner, "replicate", "--config", conf, "--seed", 2).output)
        assert data["config"]["trials"] == 10 and data["config"]["seed"] == 2

    def test_shift_sets_strength(self, runner):
        data = json.loads(run(runner, "replicate", "--trials", 10, "--bias-variant", "original", "--shift", 0.01).output)
        assert data["shock_probability"] == pytest.approx(0.49, abs=1e-12)

    @pytest.mark.parametrize("bad", [
        ["--rate-left", -1],
        ["--trials", 0],
        ["--seed", -3],
        ["--beta", "-1"],
        ["--beta", "abc"],
        ["--p0", 1.0],
        ["--workers", 0],
    ])
    def test_invalid_config_exits_2_without_outputs(self, runner, tmp_path, bad):
        out = tmp_path / "out"
        res = runner.invoke(cli, ["replicate", "--out", str(out), *map(str, bad)])
        assert res.exit_code == 2
        assert not out.exists() or not any(out.iterdir())

    def test_unknown_config_key(self, runner, tmp_path):
        conf = tmp_path / "c.json"
        conf.write_text(json.dumps({"trails": 10}))
        assert runner.invoke(cli, ["replicate", "--config", str(conf)]).exit_code == 2

    def test_unreadable_config(self, runner, tmp_path):
        conf = tmp_path / "c.json"
        conf.write_text("{not json")
        assert runner.invoke(cli, ["replicate", "--config", str(conf)]).exit_code == 2


def test_power(runner):
    res = run(runner, "power", "--delta", 0.01, "--k", 3, "--format", "json-report")
    data = json.loads(res.output)
    assert data["required_trials"] == 45_000
    assert data["power_at_required_trials"] == pytest.approx(0.5, abs=1e-3)
    assert runner.invoke(cli, ["power", "--delta", 0]).exit_code == 2


def test_peptide(runner):
    out = run(runner, "peptide").output
    assert "0.635 mm/s" in out and "63.5 um" in out and "discrepancy     YES" in out
    data = json.loads(run(runner, "peptide", "--format", "json-report").output)
    assert data["discrepancy"] is True
    assert runner.invoke(cli, ["peptide", "--mass", 0]).exit_code == 2


def test_reduce_single_branch(runner):
    res = run(runner, "reduce", "--spec", '[{"label": "only", "modulus": 0.2}]', "--format", "json-report")
    data = json.loads(res.output)
    assert data["first_outcome"] == "only" and data["born"] == {"only": 1.0}


def test_reduce_fish(runner, tmp_path):
    spec = tmp_path / "fish.json"
    spec.write_text(json.dumps([
        {"label": "W", "probability": 0.5, "valence": 0, "origin": {"cm": 0, "group": 0}},
        {"label": "C", "probability": 0.5, "valence": 1, "origin": {"cm": 0, "group": 0}},
    ]))
    data = json.loads(run(runner, "reduce", "--spec", spec, "--beta", "inf", "--samples", 50, "--format", "json-report").output)
    assert data["biased"] == {"W": 1.0, "C": 0.0} and data["counts"] == {"W": 50, "C": 0}


def test_reduce_bad_spec(runner):
    assert runner.invoke(cli, ["reduce", "--spec", '[{"label": "x", "modulus": 0}]']).exit_code == 2
    assert runner.invoke(cli, ["reduce", "--spec", "[{]"]).exit_code == 2


def test_evolve(runner, tmp_path):
    args = ["evolve", "--population", 200, "--generations", 5, "--seed", 3, "--out", tmp_path]
    out = run(runner, *args).output
    assert out.splitlines()[0] == "generation,mode,fraction_alive"
    assert (tmp_path / "survival.csv").read_text() == out
    report = json.loads((tmp_path / "report.json").read_text())
    again = run(runner, "evolve", "--config", tmp_path / "report.json").output
    assert again == out
    assert report["config"]["population"] == 200


def test_evolve_invalid(runner):
    assert runner.invoke(cli, ["evolve", "--bonus", 0.9]).exit_code == 2


def test_main_internal_error_exits_1(monkeypatch, capsys):
    def boom(*a, **k):
        raise RuntimeError("kaboom")

    monkeypatch.setattr(cli_module, "paper_check", boom)
    with pytest.raises(SystemExit) as exc:
        main(["paper-check"])
    assert exc.value.code == 1
    assert "kaboom" in capsys.readouterr().err


def test_main_success_exit_0():
    with pytest.raises(SystemExit) as exc:
        main(["power", "--delta", "0.1"])
    assert exc.value.code == 0


def test_reduce_string_origin(runner):
    spec = '[{"label":"W","probability":0.5,"valence":0,"origin":"cm:0:0"},{"label":"C","probability":0.5,"valence":1,"origin":"cm:0:0"}]'
    data = json.loads(run(runner, "reduce", "--spec", spec, "--beta", "inf", "--samples", 20, "--format", "json-report").output)
    assert data["biased"] == {"W": 1.0, "C": 0.0}
    assert runner.invoke(cli, ["reduce", "--spec", spec.replace("cm:0:0", "cm:x")]).exit_code == 2
