import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dbarlab.cli import (IOConfig, RunConfig, apply_env, dumps, main, parse_config,
                         render_config, run)
from dbarlab.errors import ParseError, ValidationError
from dbarlab.experiments import ExperimentConfig, QuadratureConfig, Tolerances
from dbarlab.gaussian import WeightSequence


def test_geometric_example_materializes_default():
    cfg = parse_config("run.command = verify\nweights.kind = geometric\n"
                       "weights.c = 1/4\nweights.r = 1/2\n")
    assert cfg.weights.a(1) == Fraction(1, 4) and cfg.weights.a(3) == Fraction(1, 16)
    assert cfg.weights.total_bound() == Fraction(1, 2)


def test_sum_not_below_one_is_validation_error():
    with pytest.raises(ValidationError) as exc:
        parse_config("run.command = verify\nweights.c = 1\nweights.r = 1/2\n")
    key, line, reason = exc.value.errors[0]
    assert key == "weights.c" and line == 2 and "< 1" in reason


def test_empty_command_is_parse_error():
    with pytest.raises(ParseError):
        parse_config("run.command =\n")
    with pytest.raises(ParseError):
        parse_config("")


@pytest.mark.parametrize("text,key", [
    ("run.command = verify\nbogus.key = 1\n", "bogus.key"),
    ("run.command = verify\nexperiment.s = two\n", "experiment.s"),
    ("run.command = verify\nexperiment.s = 1\nexperiment.s = 2\n", "experiment.s"),
    ("run.command = verify\njust words\n", "?"),
    ("run.command = dance\n", "run.command"),
])
def test_parse_errors_name_key_and_line(text, key):
    with pytest.raises(ParseError) as exc:
        parse_config(text)
    assert exc.value.errors[0][0] == key
    assert exc.value.errors[0][1] >= 1 or key == "run.command"


def test_validation_errors():
    with pytest.raises(ValidationError):
        parse_config("run.command = verify\nexperiment.n_range = 3, 2\n")
    with pytest.raises(ValidationError):
        parse_config("run.command = solve\n")
    with pytest.raises(ValidationError):
        parse_config("run.command = solve\nio.form = /nonexistent/f.txt\n")
    with pytest.raises(ValidationError):
        parse_config("run.command = verify\nweights.kind = explicit\n")
    with pytest.raises(ValidationError):
        parse_config("run.command = verify\nio.format = xml\n")


def test_explicit_weights_and_ranges():
    cfg = parse_config("run.command = sweep\nweights.kind = explicit\n"
                       "weights.values = 1/3, 1/5 1/7\nexperiment.n_range = 1..3\n")
    assert cfg.weights.prefix == (Fraction(1, 3), Fraction(1, 5), Fraction(1, 7))
    assert cfg.experiment.n_range == (1, 2, 3)


configs = st.builds(
    lambda cmd, c, seed, nr, cases, mc, cap, fmt, explicit: RunConfig(
        cmd,
        ExperimentConfig(
            weights=(WeightSequence.explicit([Fraction(1, 3), Fraction(1, 4), Fraction(1, 6),
                                              Fraction(1, 8)]) if explicit
                     else WeightSequence.geometric(c, Fraction(1, 3), 8)),
            n_range=nr, seed=seed, case_count=cases,
            quadrature=QuadratureConfig(16, 32, Fraction(2, 3)),
            tolerances=Tolerances(mc, 1e-7)),
        IOConfig(None, "out dir", fmt), 3, cap),
    st.sampled_from(["verify", "sweep", "lempert"]),
    st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(3, 5)]),
    st.integers(0, 2**40), st.sampled_from([(1,), (1, 2, 3), (2, 4)]),
    st.integers(0, 50), st.floats(0.5, 10), st.one_of(st.none(), st.integers(0, 20)),
    st.sampled_from(["json", "csv", "both"]), st.booleans())


@given(configs)
def test_render_parse_roundtrip(cfg):
    assert parse_config(render_config(cfg)) == cfg


def test_env_overrides():
    cfg = parse_config("run.command = verify\n")
    new = apply_env(cfg, {"DBARLAB_OUTPUT": "/tmp/x", "DBARLAB_JOBS": "3"})
    assert new.io.output == "/tmp/x" and new.experiment.jobs == 3
    assert apply_env(cfg, {}) == cfg
    with pytest.raises(ValidationError):
        apply_env(cfg, {"DBARLAB_JOBS": "many"})


def test_dumps_float_format():
    assert dumps(0.1) == "0.10000000000000001"
    assert json.loads(dumps({"b": [1, 2.5], "a": None})) == {"a": None, "b": [1, 2.5]}


# -- run -------------------------------------------------------------------

def _cfg(tmp_path, text):
    return parse_config(text + f"\nio.output = {tmp_path / 'out'}\n")


def test_run_verify_exit_zero(tmp_path):
    code = run(_cfg(tmp_path, "run.command = verify\nexperiment.case_count = 2"))
    assert code == 0
    verdict = json.loads((tmp_path / "out" / "verify.json").read_text())
    assert verdict["passed"]
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["seed"] == 0 and len(manifest["config_sha256"]) == 64
    assert {"python", "numpy", "dbarlab"} <= set(manifest["versions"])


def test_run_solve_not_closed_exit_one(tmp_path):
    form = tmp_path / "f.txt"
    form.write_text("n = 2\n[|1] zb2\n")
    code = run(_cfg(tmp_path, f"run.command = solve\nio.form = {form}"))
    assert code == 1
    rec = json.loads((tmp_path / "out" / "solve.json").read_text())
    assert rec["error"] == "NotClosed"


def test_run_solve_ok(tmp_path):
    form = tmp_path / "f.txt"
    form.write_text("[|1] zb1\n")
    assert run(_cfg(tmp_path, f"run.command = solve\nio.form = {form}")) == 0
    rep = json.loads((tmp_path / "out" / "solve.json").read_text())["report"]
    assert rep["norm_u_sq"] == "1/128"


def test_run_bad_form_file_exit_two(tmp_path):
    form = tmp_path / "f.txt"
    form.write_text("this is not a form\n")
    assert run(_cfg(tmp_path, f"run.command = solve\nio.form = {form}")) == 2


def test_run_sweep_csv(tmp_path):
    code = run(_cfg(tmp_path, "run.command = sweep\nexperiment.n_range = 1..8"))
    assert code == 0
    lines = (tmp_path / "out" / "sweep.csv").read_text().splitlines()
    assert lines[0] == "n,norm_f_sq_num,norm_f_sq_den,norm_u_sq_num,norm_u_sq_den,ratio_float"
    assert len(lines) == 9
    assert len({l.rsplit(",", 1)[1] for l in lines[1:]}) == 1


def test_byte_identical_verdicts(tmp_path):
    text = "run.command = verify\nexperiment.case_count = 2\nexperiment.seed = 5"
    run(parse_config(text + f"\nio.output = {tmp_path / 'a'}"))
    run(parse_config(text + f"\nio.output = {tmp_path / 'b'}"))
    assert (tmp_path / "a" / "verify.json").read_bytes() == \
        (tmp_path / "b" / "verify.json").read_bytes()


def test_main_subcommands(tmp_path, monkeypatch, capsys):
    form = tmp_path / "f.txt"
    form.write_text("[|1,2] 1\n")
    cfgfile = tmp_path / "c.cfg"
    cfgfile.write_text("experiment.samples = 5000\nio.output = ignored\n")
    out = tmp_path / "o"
    assert main(["mc", "--form", str(form), "--out", str(out), "--config", str(cfgfile)]) == 0
    assert json.loads((out / "mc.json").read_text())["samples"] == 5000
    monkeypatch.setenv("DBARLAB_OUTPUT", str(tmp_path / "env"))
    assert main(["lempert", "--p", "1", "--cap", "4"]) == 0
    assert (tmp_path / "env" / "lempert.json").exists()
    bad = tmp_path / "bad.cfg"
    bad.write_text("weights.c = 1\nweights.r = 1/2\n")
    assert main(["verify", "--config", str(bad)]) == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
