import json
import math

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tempered_ou.dgga import DGGaParams
from tempered_ou.errors import ConfigurationError
from tempered_ou.harness import cli, validate as validate_mod
from tempered_ou.harness.bench import BenchReport, bench, format_bench, machine_descriptor
from tempered_ou.harness.export import (BENCH_SCHEMA, VALIDATION_SCHEMA, export, matrix_to_csv,
                                        paths_csv, plot_script, read_csv, to_json, write_text)
from tempered_ou.harness.stats import cumulant, err_pct, jackknife_se, raw_moment, tolerance_pct
from tempered_ou.harness.validate import (TransitionTarget, build_id, format_report,
                                          validate_moments, validate_sample)
from tempered_ou.ibgm import IBGMParams
from tempered_ou.iga import IGaParams, IGaSampler
from tempered_ou.ou_engine import OUSpec
from tempered_ou.rand_core import RandomStream


# ---------------------------------------------------------------------------
# err_pct and estimators

def test_err_pct_examples():
    assert err_pct(1.0, 1.0) == 0.0
    assert err_pct(0.070, 0.0693) == pytest.approx(1.0, abs=1e-9)
    assert err_pct(2.0, 2.1) == pytest.approx(-5.0, abs=1e-12)


def test_err_pct_zero_truth_falls_back_to_absolute():
    val, absolute = err_pct(0.0, 0.02, with_flag=True)
    assert absolute and val == pytest.approx(-2.0)
    assert err_pct(1.0, 0.5, with_flag=True) == (50.0, False)


@given(st.floats(-1e6, 1e6).filter(lambda v: abs(v) > 1e-6), st.floats(-1e6, 1e6))
def test_err_pct_sign_and_scale(true_v, est):
    e = err_pct(true_v, est)
    assert math.isclose(e, (true_v - est) / true_v * 100, rel_tol=1e-12, abs_tol=1e-9)
    # an estimate beyond the truth in its own direction gives a negative error
    if abs(est) > abs(true_v) and np.sign(est) == np.sign(true_v):
        assert e < 0


def test_estimators_on_known_sample():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    assert raw_moment(x, 2) == pytest.approx(7.5)
    assert cumulant(x, 1) == pytest.approx(2.5)
    assert cumulant(x, 2) == pytest.approx(np.var(x, ddof=1))


def test_jackknife_se_of_mean_matches_textbook():
    x = RandomStream(3).standard_normal(10_000)
    se = jackknife_se(x, np.mean)
    assert se == pytest.approx(x.std(ddof=1) / np.sqrt(x.size), rel=0.05)


def test_tolerance_rule():
    assert tolerance_pct(0.4) == pytest.approx(2.0)
    assert tolerance_pct(0.4, 3.5) == pytest.approx(7.0)
    assert tolerance_pct(2.0, -0.1) == pytest.approx(10.0)


# ---------------------------------------------------------------------------
# validate_moments

@pytest.mark.slow
def test_iga_args_moments_within_five_percent():
    rep = validate_moments(IGaParams(0.9, 1, 1, 2), 50_000, method="ARGS")
    assert [r.order for r in rep.records] == [1, 2, 3, 4]
    assert all(abs(r.err_pct) <= 5 for r in rep.records), format_report(rep)


@pytest.mark.slow
def test_ibgm_inverse_moments_within_eight_percent():
    rep = validate_moments(IBGMParams(0.9, 1, 1, 2), 50_000, method="Inverse")
    assert all(abs(r.err_pct) <= 8 for r in rep.records), format_report(rep)


@pytest.mark.slow
def test_outs_cumulants_within_six_percent():
    spec = OUSpec.rapidly_decreasing("OUTS", 10.0, 0.5, 2.0, 0.1, 1.0)
    rep = validate_moments(TransitionTarget(spec, 0.0, 0.1), 100_000)
    assert rep.statistic == "cumulant"
    assert all(abs(r.err_pct) <= 6 for r in rep.records), format_report(rep)


def test_report_fields_and_reproducibility():
    target = DGGaParams(2.0, 1.0, 2.0)
    a = validate_moments(target, 2_000, seed=11)
    b = validate_moments(target, 2_000, seed=11)
    assert (a.n, a.seed, a.method) == (2_000, 11, "GGSM1")
    assert a.build_id == build_id() and a.build_id
    assert [r.estimate for r in a.records] == [r.estimate for r in b.records]
    c = validate_moments(target, 2_000, seed=12)
    assert [r.estimate for r in a.records] != [r.estimate for r in c.records]
    for r in a.records:
        assert r.err_pct == err_pct(r.true, r.estimate)


def test_missing_oracle_is_configuration_error():
    with pytest.raises(ConfigurationError):
        validate_moments(object(), 100)


def test_validate_sample_uses_reference_cells():
    x = np.full(1000, 1.0) + RandomStream(0).standard_normal(1000) * 1e-6
    recs = validate_sample(x, lambda k: 1.1, "moment", orders=(1,), reference=(4.0,))
    # err is about 9.1%, the reference cell allows 8%
    assert recs[0].tolerance_pct == pytest.approx(8.0) and not recs[0].passed


# ---------------------------------------------------------------------------
# bench

def _iga_samplers():
    par = IGaParams(0.9, 2, 1, 2)
    return {m: IGaSampler(par, m) for m in ("ARGS", "Inverse")}


def test_bench_factors_and_scaling():
    rep = bench(_iga_samplers(), sizes=(1_000, 50_000), repetitions=3, seed=5,
                distribution="iga")
    assert rep.baseline == "ARGS"
    assert all(f == 1.0 for f in rep.factors["ARGS"].values())
    for m in rep.methods:
        assert rep.seconds[m][50_000] > rep.seconds[m][1_000]
        for n in rep.sizes:
            assert rep.factors[m][n] == pytest.approx(rep.seconds[m][n] / rep.seconds["ARGS"][n])
    assert rep.seed == 5 and rep.machine == machine_descriptor() and "Python" in rep.machine
    assert "ARGS" in format_bench(rep)
    jsonschema.validate(json.loads(to_json(rep.to_dict())), BENCH_SCHEMA)


def test_bench_explicit_baseline_and_errors():
    rep = bench(_iga_samplers(), sizes=(500,), repetitions=3, baseline="Inverse")
    assert rep.factors["Inverse"][500] == 1.0
    with pytest.raises(ValueError):
        bench(_iga_samplers(), sizes=(500,), repetitions=2)
    with pytest.raises(ValueError):
        bench(_iga_samplers(), sizes=(500,), repetitions=3, baseline="ARBD")


# ---------------------------------------------------------------------------
# export

@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1,
                max_size=30))
def test_csv_round_trip_is_bitwise(values):
    m = np.array(values).reshape(-1, 1)
    header, back = read_csv(matrix_to_csv(["x"], m))
    assert header == ["x"]
    assert np.array_equal(back.view(np.uint64), m.view(np.uint64)) or np.array_equal(back, m)
    assert np.array_equal(back, m)


def test_csv_file_round_trip(tmp_path):
    m = RandomStream(1).standard_normal((20, 3)) * 1e-7
    path = tmp_path / "m.csv"
    export((["a", "b", "c"], m), "csv", path)
    header, back = read_csv(path)
    assert header == ["a", "b", "c"]
    assert back.tobytes() == m.tobytes()
    assert path.read_text().splitlines()[0] == "a,b,c"


def test_paths_csv_and_plot_script(tmp_path):
    times = np.linspace(0, 1, 5)
    paths = np.arange(15, dtype=float).reshape(3, 5) / 7
    text = paths_csv(times, paths)
    header, back = read_csv(text)
    assert header == ["t", "path_0", "path_1", "path_2"]
    assert np.array_equal(back[:, 0], times) and np.array_equal(back[:, 1:].T, paths)
    script = plot_script("paths.csv", header, "demo")
    assert script.count("ax.plot(") == 3
    for c in header[1:]:
        assert repr(c) in script
    compile(script, "plot.py", "exec")


def test_validation_json_matches_schema_and_is_stable(tmp_path):
    rep = validate_moments(DGGaParams(1.0, 1.0, 2.0), 1_000, seed=2)
    text = to_json(rep)
    jsonschema.validate(json.loads(text), VALIDATION_SCHEMA)
    assert to_json(rep) == text
    keys = list(json.loads(text))
    assert keys == sorted(keys)
    path = tmp_path / "r.json"
    export(rep, "json", path)
    assert path.read_text() == text


def test_schema_rejects_malformed_report():
    bad = {"distribution": "iga", "n": 0}
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, VALIDATION_SCHEMA)


def test_io_errors_carry_the_path(tmp_path):
    target = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match="missing"):
        write_text("x\n", target)
    with pytest.raises(ValueError):
        export((["x"], np.zeros((1, 1))), "xml", tmp_path / "a")


def test_dash_writes_to_stdout(capsys):
    write_text("hello\n", "-")
    assert capsys.readouterr().out == "hello\n"


# ---------------------------------------------------------------------------
# command line

def test_cli_sample_to_stdout(capsys):
    code = cli.main(["sample", "--dist", "iga", "--method", "args", "--n", "50", "--gamma", "2",
                     "--seed", "4", "--out", "-"])
    out = capsys.readouterr().out
    assert code == cli.EXIT_OK
    header, x = read_csv(out)
    assert header == ["x"] and x.shape == (50, 1) and np.all(x > 0)
    expected = IGaSampler(IGaParams(0.9, 2, 1, 2), "ARGS")(RandomStream(4), 50)
    assert np.array_equal(x[:, 0], expected)


def test_cli_ou_simulate_with_plot_script(tmp_path):
    csv_path, plot = tmp_path / "p.csv", tmp_path / "p.py"
    code = cli.main(["ou", "simulate", "--kind", "tsou", "--alpha", "0.5", "--p", "2",
                     "--n-steps", "20", "--paths", "3", "--out", str(csv_path),
                     "--plot-script", str(plot)])
    assert code == cli.EXIT_OK
    header, m = read_csv(csv_path)
    assert header == ["t", "path_0", "path_1", "path_2"] and m.shape == (21, 4)
    assert plot.read_text().count("ax.plot(") == 3


def test_cli_validate_pass_and_json(capsys):
    code = cli.main(["validate", "--dist", "dgga", "--gamma", "2", "--n", "2000",
                     "--format", "json"])
    out = capsys.readouterr().out
    assert code == cli.EXIT_OK
    jsonschema.validate(json.loads(out), VALIDATION_SCHEMA)


def test_cli_validate_failure_exit_code(monkeypatch, capsys):
    true_moment = validate_mod.dgga_moment
    monkeypatch.setattr(validate_mod, "dgga_moment", lambda par, k: 2 * true_moment(par, k))
    code = cli.main(["validate", "--dist", "dgga", "--gamma", "2", "--n", "2000"])
    assert code == cli.EXIT_FAIL
    assert "FAIL" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["sample", "--dist", "nope"],
    ["sample", "--dist", "iga", "--method", "magic"],
    ["sample", "--dist", "iga", "--eta", "0.5"],
    ["sample", "--dist", "ibgm", "--gamma", "1.5"],
    ["sample", "--dist", "iga", "--meth", "ARGS"],
    ["bench", "--dist", "iga", "--repetitions", "2", "--sizes", "10"],
    [],
])
def test_cli_usage_errors_exit_one(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == cli.EXIT_USAGE


def test_cli_bench_json(capsys):
    code = cli.main(["bench", "--dist", "iga", "--methods", "ARGS", "Inverse", "--sizes", "200",
                     "1000", "--repetitions", "3", "--format", "json"])
    assert code == cli.EXIT_OK
    d = json.loads(capsys.readouterr().out)
    jsonschema.validate(d, BENCH_SCHEMA)
    assert d["factors"]["ARGS"] == {"200": 1.0, "1000": 1.0}


def test_cli_write_error_exit_one(tmp_path, capsys):
    code = cli.main(["sample", "--dist", "iga", "--n", "5",
                     "--out", str(tmp_path / "no" / "such" / "file.csv")])
    assert code == cli.EXIT_USAGE
    assert "file.csv" in capsys.readouterr().err
