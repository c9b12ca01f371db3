"""Acceptance run: one pass/fail line per criterion.

Runs every suite once at full scale (1000 samples, fixed seed), groups the
records by criterion and checks the time budget of each criterion. Also
runnable as a script: ``python3 tests/test_acceptance.py``.
"""
import time
from collections import defaultdict

import pytest

from unitary_newforms.suites import SUITES, RunConfig, dumps, run_suite

SEED = 20240601
BUDGET_S = {1: 1, 2: 1, 3: 10, 4: 120, 5: 300, 6: 120, 7: 1, 8: 120, 9: 300, 10: 600,
            11: 600}
DESCRIPTION = {
    1: "dimension formula equals trace count",
    2: "binomial convolution identity",
    3: "conductor and dimension recursions",
    4: "subgroup decomposition round trip",
    5: "double-coset classifier",
    6: "Levi intersection membership",
    7: "involution and trace enumeration",
    8: "GL(2) Whittaker oracle",
    9: "rank-one intertwining integral",
    10: "Rankin-Selberg integral and symbolic properties",
    11: "oldform formulas",
    12: "byte-identical reruns",
}


def full_config() -> RunConfig:
    return RunConfig(seed=SEED, samples=1000)


def collect(cfg: RunConfig) -> tuple[dict, dict]:
    """Records and elapsed seconds per criterion."""
    recs, elapsed = defaultdict(list), defaultdict(float)
    for suite in SUITES:
        t0 = time.perf_counter()
        for rec in run_suite(suite, cfg):
            t1 = time.perf_counter()
            recs[rec["criterion"]].append(rec)
            elapsed[rec["criterion"]] += t1 - t0
            t0 = t1
    return recs, elapsed


def verdict(k: int, recs: list, elapsed: float) -> tuple[bool, str]:
    bad = [r for r in recs if r["status"] != "pass"]
    over = elapsed > BUDGET_S[k]
    ok = bool(recs) and not bad and not over
    detail = f"{len(recs)} records, {len(bad)} failing, {elapsed:.1f}s of {BUDGET_S[k]}s"
    if bad:
        worst = max(bad, key=lambda r: r["residual"] - r["tolerance"])
        names = sorted({r["check"] for r in bad})
        detail += (f"; failing checks {', '.join(names)}; worst {worst['check']} "
                   f"residual {worst['residual']:.3g} > {worst['tolerance']:.3g}")
    if over:
        detail += "; over time budget"
    return ok, f"criterion {k}: {'PASS' if ok else 'FAIL'} {DESCRIPTION[k]} ({detail})"


def determinism() -> tuple[bool, str]:
    cfg = RunConfig(seed=SEED, samples=50)
    a = "\n".join(dumps(r) for r in run_suite("all", cfg)).encode()
    b = "\n".join(dumps(r) for r in run_suite("all", cfg)).encode()
    ok = a == b
    return ok, (f"criterion 12: {'PASS' if ok else 'FAIL'} {DESCRIPTION[12]} "
                f"(all suites, 50 samples, {len(a)} bytes per run)")


@pytest.fixture(scope="module")
def full_run():
    return collect(full_config())


@pytest.fixture(scope="module")
def lines():
    from conftest import ACCEPTANCE_LINES
    return ACCEPTANCE_LINES


@pytest.mark.acceptance
@pytest.mark.parametrize("k", range(1, 12))
def test_criterion(k, full_run, lines):
    recs, elapsed = full_run
    ok, line = verdict(k, recs[k], elapsed[k])
    lines.append(line)
    print(line)
    assert ok, line


@pytest.mark.acceptance
def test_criterion_12_determinism(lines):
    ok, line = determinism()
    lines.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    recs, elapsed = collect(full_config())
    results = [verdict(k, recs[k], elapsed[k]) for k in range(1, 12)] + [determinism()]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
