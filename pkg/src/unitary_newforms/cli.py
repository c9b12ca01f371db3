"""Command line: ``verify`` suites, ``compute`` fixtures, ``report`` digests.

Configuration is layered: defaults, then a ``--config`` key=value file, then
``UNITARY_NEWFORMS_<FIELD>`` environment variables, then flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from typing import Sequence

from .exactnum import LocalField, rat
from .hecke import (apply_level_one_up, apply_level_raising, enumerate_cosets, satake_transform)
from .lfactors import UnramParam
from .rankinselberg import oldform_xi, xi_assemble
from .suites import (SUITES, ConfigError, RunConfig, dumps, env_overrides, read_config_file,
                     run_suite)
from .whittaker import u3_oracle_table, u3_spherical_table_exact

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CSV_FIELDS = ["suite", "criterion", "check", "status", "residual", "tolerance", "parameters",
              "provenance"]

# flag name -> RunConfig field
_FLAG_FIELDS = {"p": "p", "n": "n", "r": "r", "m": "m", "a": "a", "Mprec": "Mprec", "T": "T",
                "depth": "depth", "gk_depth": "gk_depth", "samples": "samples", "seed": "seed",
                "betas": "betas", "tol_symbolic": "tol_symbolic", "tol_oracle": "tol_oracle",
                "tol_gl2": "tol_gl2"}


def _add_config_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=int, help="odd prime (default 3)")
    sp.add_argument("--n", type=int, help="restrict to rank n")
    sp.add_argument("--r", type=int, help="restrict to Levi rank r")
    sp.add_argument("--m", type=int, help="restrict to level m")
    sp.add_argument("--a", type=int, help="restrict to conductor a")
    sp.add_argument("--Mprec", type=int, help="extra p-adic digits (default 8)")
    sp.add_argument("--T", type=int, help="series truncation (default 14)")
    sp.add_argument("--depth", type=int, help="Whittaker oracle depth (default 6)")
    sp.add_argument("--gk-depth", dest="gk_depth", type=int,
                    help="intertwining integral depth (default 20)")
    sp.add_argument("--samples", type=int, help="random samples per configuration (default 1000)")
    sp.add_argument("--seed", type=int, help="RNG seed (required by randomized suites)")
    sp.add_argument("--betas", help="comma-separated U(3) Satake parameters, e.g. 1/2,2/3")
    sp.add_argument("--tol-symbolic", dest="tol_symbolic", type=float)
    sp.add_argument("--tol-oracle", dest="tol_oracle", type=float)
    sp.add_argument("--tol-gl2", dest="tol_gl2", type=float)
    sp.add_argument("--config", help="key=value configuration file")
    sp.add_argument("--out", help="output path (default stdout)")


def build_config(args: argparse.Namespace, environ=None) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    values.update(env_overrides(environ))
    for flag, fname in _FLAG_FIELDS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[fname] = v
    return RunConfig.from_mapping(values)


def _open_out(path: str | None):
    if not path or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _csv_row(rec: dict) -> dict:
    row = {k: rec.get(k, "") for k in CSV_FIELDS}
    row["parameters"] = json.dumps(rec.get("parameters", {}), sort_keys=True)
    return row


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = build_config(args).validate(args.suite)
    fh, close = _open_out(args.out)
    failed = 0
    try:
        writer = None
        if args.format == "csv":
            writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS + (["elapsed_s"] if args.timings
                                                                  else []))
            writer.writeheader()
        t0 = time.perf_counter()
        for rec in run_suite(args.suite, cfg):
            if args.timings:
                t1 = time.perf_counter()
                rec["elapsed_s"] = round(t1 - t0, 3)
                t0 = t1
            failed += rec["status"] != "pass"
            if writer is not None:
                row = _csv_row(rec)
                if args.timings:
                    row["elapsed_s"] = rec["elapsed_s"]
                writer.writerow(row)
            else:
                fh.write(dumps(rec) + "\n")
            fh.flush()
    finally:
        if close:
            fh.close()
    if failed:
        print(f"{failed} check(s) failed", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# compute


def _parse_lambda(text: str | None, n: int) -> tuple[int, ...]:
    if text is None:
        return (0,) * n
    lam = tuple(int(x) for x in str(text).split(","))
    if len(lam) < n:
        lam = lam + (0,) * (n - len(lam))
    if len(lam) != n or any(x < 0 for x in lam) or list(lam) != sorted(lam, reverse=True):
        raise ConfigError(f"lambda: need a partition with {n} parts, got {text!r}")
    return lam


def _base_table(F: LocalField, beta, cfg: RunConfig, oracle: bool):
    if oracle:
        return u3_oracle_table(F, beta, -2, cfg.T + 4, cfg.depth)
    return u3_spherical_table_exact(F, beta, -4, cfg.T + 6)


def _raised_table(F, beta, cfg, m: int, lam, oracle: bool):
    """Table of eta_{lam}(v) at level m, from the newform (m even) or level one."""
    table = _base_table(F, beta, cfg, oracle)
    start = m % 2
    if start == 1:
        table = apply_level_one_up(F, table)
    if m > start:
        table = apply_level_raising(F, lam, start, m, table)
    return table


def _poly_json(P, q) -> dict:
    return P.qfree(q).to_json()


def cmd_compute(args: argparse.Namespace) -> int:
    cfg = build_config(args).validate()
    F = LocalField(cfg.p)
    n = cfg.n or 1
    beta = rat(args.beta) if args.beta is not None else rat(cfg.betas[0])
    m = cfg.m if cfg.m is not None else 0
    prov = {"p": cfg.p, "n": n, "beta": str(beta), "T": cfg.T, "depth": cfg.depth}
    if args.table == "whittaker":
        if n != 1:
            raise ConfigError("n: the Whittaker oracle is available for n = 1 (U(3)) only")
        if args.exact:
            tab = u3_spherical_table_exact(F, beta, -2, cfg.T)
        else:
            tab = u3_oracle_table(F, beta, -2, cfg.T, cfg.depth)
        text = tab.to_json()
    elif args.table == "satake":
        lam = _parse_lambda(args.lam, n)
        counts = enumerate_cosets(F, n, lam, m).counts() if n > 1 else None
        S = satake_transform(F, lam, n, m)
        data = {"kind": "satake", "p": cfg.p, "n": n, "m": m, "lambda": list(lam),
                "satake": S.to_json()}
        if counts is not None:
            data["torus_counts"] = [[list(k), v] for k, v in sorted(counts.items())]
        text = json.dumps(data, sort_keys=True)
    elif args.table in ("xi", "oldform-xi"):
        if n != 1:
            raise ConfigError("n: table-level Xi is available for n = 1 only")
        lam = _parse_lambda(args.lam, 1)
        par = UnramParam.u3_principal(beta)
        q = F.q
        tab = _raised_table(F, beta, cfg, m, lam, args.oracle)
        tol = cfg.tol_oracle if args.oracle else 1e-9
        x = xi_assemble(tab, 1, 1, m, 0, par, T=cfg.T, q=q, tol=tol)
        data = {"kind": args.table, "provenance": dict(prov, m=m, a=0, partition=list(lam),
                                                       table="oracle" if args.oracle else "exact"),
                "xi": dict(x.to_json(), poly=_poly_json(x.poly, q))}
        if args.table == "oldform-xi":
            if m % 2:
                raise ConfigError("m: closed forms from the newform need m - a even")
            base = xi_assemble(_base_table(F, beta, cfg, args.oracle), 1, 1, 0, 0, par,
                               T=cfg.T, q=q, tol=tol)
            S = satake_transform(F, lam, 1, 0)
            preds = {}
            for form in ("printed", "composed", "measured"):
                P = oldform_xi(base.poly, 1, 0, m, S, form).qfree(q)
                preds[form] = {"poly": P.to_json(),
                               "residual": float((x.poly.qfree(q) - P).max_abs_coeff())}
            data["predictions"] = preds
        text = json.dumps(data, sort_keys=True)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"table: unknown {args.table!r}")
    fh, close = _open_out(args.out)
    try:
        fh.write(text + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# report


def load_records(paths: Sequence[str]) -> list[dict]:
    """Records from JSON-lines or CSV report files.

    Raises:
        FileNotFoundError: If a path does not exist.
    """
    out = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        if text.startswith("suite,") or text.startswith("suite,criterion"):
            for row in csv.DictReader(io.StringIO(text)):
                row["residual"] = float(row["residual"])
                row["tolerance"] = float(row["tolerance"])
                row["criterion"] = int(row["criterion"])
                out.append(row)
            continue
        for lineno, line in enumerate(text.splitlines(), 1):
            if line.strip():
                try:
                    out.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out


def digest(records: list[dict]) -> tuple[str, list[dict]]:
    """Text digest plus per-check summary rows."""
    groups: dict[tuple, dict] = {}
    for rec in records:
        key = (rec.get("suite", ""), rec.get("criterion", 0), rec["check"])
        g = groups.setdefault(key, {"suite": key[0], "criterion": key[1], "check": key[2],
                                    "pass": 0, "fail": 0, "worst_residual": 0.0,
                                    "elapsed_s": 0.0})
        g["pass" if rec["status"] == "pass" else "fail"] += 1
        g["worst_residual"] = max(g["worst_residual"], float(rec["residual"]))
        g["elapsed_s"] += float(rec.get("elapsed_s", 0) or 0)
    rows = [groups[k] for k in sorted(groups)]
    if not rows:
        return "no records\n", rows
    lines = [f"{'suite':9} {'crit':>4} {'check':40} {'pass':>5} {'fail':>5} "
             f"{'worst':>11} {'time_s':>8}"]
    for g in rows:
        lines.append(f"{g['suite']:9} {g['criterion']:>4} {g['check']:40} {g['pass']:>5} "
                     f"{g['fail']:>5} {g['worst_residual']:>11.3e} {g['elapsed_s']:>8.2f}")
    npass = sum(g["pass"] for g in rows)
    nfail = sum(g["fail"] for g in rows)
    lines.append(f"total: {npass + nfail} records, {npass} pass, {nfail} fail")
    return "\n".join(lines) + "\n", rows


def cmd_report(args: argparse.Namespace) -> int:
    records = load_records(args.paths)
    text, rows = digest(records)
    sys.stdout.write(text)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["suite", "criterion", "check", "pass", "fail",
                                               "worst_residual", "elapsed_s"])
            w.writeheader()
            w.writerows(rows)
    failing = [r for r in records if r["status"] != "pass"]
    for rec in failing:
        sys.stdout.write("FAILED " + dumps(rec) + "\n")
    return EXIT_FAIL if failing else EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="unitary-newforms",
                                 description="Verification harness for newforms of U(2n+1).")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=list(SUITES) + ["all"])
    v.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    v.add_argument("--timings", action="store_true",
                   help="add per-record elapsed seconds (output is then not reproducible)")
    _add_config_flags(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compute", help="write a fixture")
    c.add_argument("table", choices=["xi", "oldform-xi", "satake", "whittaker"])
    c.add_argument("--beta", help="U(3) Satake parameter (default: first of --betas)")
    c.add_argument("--lambda", dest="lam", help="partition, comma separated")
    c.add_argument("--oracle", action="store_true",
                   help="use the numeric oracle table instead of the exact one")
    c.add_argument("--exact", action="store_true",
                   help="whittaker: write the exact spherical table instead of the oracle")
    _add_config_flags(c)
    c.set_defaults(func=cmd_compute)

    r = sub.add_parser("report", help="digest report files")
    r.add_argument("paths", nargs="*")
    r.add_argument("--csv", help="also write the per-check summary as CSV")
    r.set_defaults(func=cmd_report)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream closed the pipe (e.g. ``| head``); silence the final flush
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
