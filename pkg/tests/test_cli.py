import json
import subprocess
import sys

import pytest

from unitary_newforms.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, digest, load_records, main

SMALL = ["--samples", "3", "--T", "8", "--depth", "4", "--seed", "5"]


def test_verify_writes_jsonl(tmp_path, capsys):
    out = tmp_path / "dims.jsonl"
    assert main(["verify", "dims", "--out", str(out)] + SMALL) == EXIT_OK
    recs = load_records([str(out)])
    assert recs and all(r["suite"] == "dims" and r["status"] == "pass" for r in recs)
    assert "elapsed_s" not in recs[0]


def test_verify_is_byte_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["verify", "trace", "--out", str(a)] + SMALL)
    main(["verify", "trace", "--out", str(b)] + SMALL)
    assert a.read_bytes() == b.read_bytes()


def test_verify_csv_and_timings(tmp_path):
    out = tmp_path / "dims.csv"
    assert main(["verify", "dims", "--format", "csv", "--timings", "--out", str(out)]
                + SMALL) == EXIT_OK
    text = out.read_text()
    assert text.startswith("suite,") and "elapsed_s" in text.splitlines()[0]
    recs = load_records([str(out)])
    assert all(isinstance(r["residual"], float) for r in recs)


def test_usage_errors(tmp_path, capsys):
    assert main(["verify", "cosets"]) == EXIT_USAGE
    assert "seed" in capsys.readouterr().err
    assert main(["verify", "dims", "--p", "4"]) == EXIT_USAGE
    assert main(["verify", "dims", "--config", str(tmp_path / "missing")]) == EXIT_USAGE
    assert main(["report", str(tmp_path / "missing")]) == EXIT_USAGE
    with pytest.raises(SystemExit):
        main(["verify", "nosuchsuite"])


def test_failing_checks_exit_nonzero(tmp_path):
    # an impossible tolerance turns oracle comparisons into failures
    out = tmp_path / "gk.jsonl"
    assert main(["verify", "gk", "--m", "0", "--tol-oracle", "-1", "--out", str(out)]) \
        == EXIT_FAIL
    assert main(["report", str(out)]) == EXIT_FAIL


def test_flags_override_config_and_env(tmp_path, monkeypatch):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("samples = 2\nseed = 1\n")
    monkeypatch.setenv("UNITARY_NEWFORMS_SEED", "3")
    from unitary_newforms.cli import build_config, build_parser
    args = build_parser().parse_args(["verify", "dims", "--config", str(cfg), "--samples", "9"])
    c = build_config(args)
    assert (c.samples, c.seed) == (9, 3)


def test_report_digest(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    main(["verify", "dims"] + SMALL + ["--out", str(out)])
    summary = tmp_path / "s.csv"
    assert main(["report", str(out), "--csv", str(summary)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "total:" in text and "0 fail" in text
    assert summary.read_text().startswith("suite,criterion,check")
    assert digest([])[0] == "no records\n"


def test_report_rejects_bad_jsonl(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    with pytest.raises(ValueError, match="bad.jsonl:1"):
        load_records([str(bad)])


def test_compute_satake(capsys):
    assert main(["compute", "satake", "--lambda", "1"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data


def test_compute_xi_level_one_up(capsys):
    assert main(["compute", "xi", "--m", "1", "--exact"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)


def test_compute_oldform_xi_reports_forms(capsys):
    assert main(["compute", "oldform-xi", "--m", "2", "--lambda", "1", "--exact"]) == EXIT_OK
    text = capsys.readouterr().out
    for form in ("printed", "composed", "measured"):
        assert form in text


def test_module_entry_point_and_broken_pipe():
    cmd = [sys.executable, "-m", "unitary_newforms", "verify", "dims"] + SMALL
    p = subprocess.run(cmd + ["--out", "-"], capture_output=True, text=True)
    assert p.returncode == EXIT_OK and p.stdout.count("\n") > 3
    p = subprocess.run(" ".join(cmd) + " | head -1", shell=True, capture_output=True, text=True)
    assert p.stdout.count("\n") == 1 and "Traceback" not in p.stderr
