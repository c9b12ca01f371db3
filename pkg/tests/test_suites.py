import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from unitary_newforms.suites import (SUITES, ConfigError, RunConfig, dumps, env_overrides,
                                     read_config_file, record, run_suite)


def test_defaults_validate_for_deterministic_suites():
    for s in ("dims", "hecke", "gk", "rs", "oldforms"):
        RunConfig().validate(s)


@pytest.mark.parametrize("suite", ["decomp", "cosets", "trace", "all"])
def test_randomized_suites_need_a_seed(suite):
    with pytest.raises(ConfigError, match="seed"):
        RunConfig().validate(suite)
    RunConfig(seed=1).validate(suite)


@pytest.mark.parametrize("kw,field", [
    ({"p": 2}, "p"), ({"p": 9}, "p"), ({"samples": 0}, "samples"), ({"T": -1}, "T"),
    ({"n": 0}, "n"), ({"m": -1}, "m"), ({"n": 1, "r": 2}, "r"), ({"betas": ()}, "betas"),
    ({"betas": ("x",)}, "betas"), ({"betas": ("1/0",)}, "betas"),
])
def test_invalid_values_name_the_field(kw, field):
    with pytest.raises(ConfigError, match=field):
        RunConfig(**kw).validate("dims")


def test_from_mapping_coerces_and_rejects_unknown_keys():
    cfg = RunConfig.from_mapping({"p": "5", "tol_oracle": "1e-4", "betas": "1/2, 3"})
    assert (cfg.p, cfg.tol_oracle, cfg.betas) == (5, 1e-4, ("1/2", "3"))
    with pytest.raises(ConfigError, match="bogus"):
        RunConfig.from_mapping({"bogus": 1})
    with pytest.raises(ConfigError, match="samples"):
        RunConfig.from_mapping({"samples": "many"})


def test_config_file_and_env(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\np = 5\n\nsamples=10  # trailing\n")
    assert read_config_file(str(path)) == {"p": "5", "samples": "10"}
    path.write_text("p 5\n")
    with pytest.raises(ConfigError):
        read_config_file(str(path))
    env = {"UNITARY_NEWFORMS_SEED": "7", "UNITARY_NEWFORMS_GK_DEPTH": "9", "OTHER": "1"}
    assert env_overrides(env) == {"seed": "7", "gk_depth": "9"}


@given(st.floats(0, 10, allow_nan=False), st.floats(0, 10, allow_nan=False))
def test_record_status(res, tol):
    r = record("x", 1, {}, res, tol, "p")
    assert r["status"] == ("pass" if res <= tol else "fail")
    assert json.loads(dumps(r)) == r


def test_unknown_suite():
    with pytest.raises(ConfigError):
        list(run_suite("nope", RunConfig()))


def _small(**kw) -> RunConfig:
    return RunConfig(seed=11, samples=4, T=8, depth=4, gk_depth=16, **kw)


def test_records_are_deterministic():
    a = [dumps(r) for r in run_suite("all", _small())]
    b = [dumps(r) for r in run_suite("all", _small())]
    assert a == b
    assert {json.loads(x)["suite"] for x in a} == set(SUITES)


def test_deterministic_suite_ignores_the_seed():
    a = [dumps(r) for r in run_suite("dims", _small())]
    b = [dumps(r) for r in run_suite("dims", RunConfig(seed=12, samples=4))]
    assert a == b


@pytest.mark.parametrize("suite", ["dims", "trace", "hecke", "gk"])
def test_small_runs_pass(suite):
    recs = list(run_suite(suite, _small()))
    assert recs
    assert all(r["status"] == "pass" for r in recs), [r for r in recs if r["status"] != "pass"]
    for r in recs:
        assert {"check", "criterion", "parameters", "residual", "tolerance", "status",
                "provenance", "suite"} <= set(r)


def test_restricting_level():
    recs = list(run_suite("gk", _small(m=1)))
    assert recs and all(r["parameters"]["m"] == 1 for r in recs)
