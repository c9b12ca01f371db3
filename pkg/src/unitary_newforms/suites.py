"""Verification suites shared by the command line and the acceptance tests.

Every check yields a record ``{check, criterion, parameters, residual,
tolerance, status, provenance}``. Records come out in a fixed order and
depend only on the configuration, so a re-run with the same seed is
byte-identical.
"""

from __future__ import annotations

import json
import math
import os
import random
from dataclasses import asdict, dataclass, fields
from typing import Callable, Iterator

from gmpy2 import mpq

from .dimension import binom, dim_oldforms, dim_recursion_check, vandermonde_check
from .exactnum import LocalField, rat
from .hecke import (apply_hecke, apply_level_one_up, apply_level_raising, cosets_rank_one,
                    enumerate_cosets, involution_iota, random_gl_element, satake_from_counts,
                    satake_transform, trace_count)
from .lfactors import UnramParam, conductor_arith, dual_conductor
from .matgroups import (LevelSpec, Sampler, build_root_element, classify_by_invariant,
                        coset_classify, decompose_compact, group_membership, levi_membership,
                        mat_sub, sample_levi_intersection)
from .polyalg import SymLaurentPoly
from .rankinselberg import (calibrate_kappa, fe_residual, gk_integral, grading_constancy,
                            level_one_up_xi, nonconstant_norm, oldform_xi, restriction_residual,
                            rs_ratio, xi_assemble)
from .whittaker import (WhittakerTable, formal_table, gl2_oracle_table, gl_whittaker_value,
                        u3_oracle_table, u3_spherical_table_exact)

SUITES = ("dims", "decomp", "cosets", "trace", "hecke", "gk", "rs", "oldforms")
RANDOMIZED = {"decomp", "cosets", "trace"}
ENV_PREFIX = "UNITARY_NEWFORMS_"


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


@dataclass
class RunConfig:
    """Parameters of a verification run.

    Attributes:
        p: Odd prime for F = Q_p.
        n, r, m, a: Restrict sweeps to one rank, Levi rank, level or
            conductor (None runs the full sweep).
        Mprec: Extra p-adic digits for round trips (mod p^(m + Mprec)).
        T: Series truncation in the Y-degree.
        depth: Shell depth of the Whittaker oracles.
        gk_depth: Shell depth of the intertwining integral.
        samples: Random samples per configuration.
        seed: RNG seed; required by randomized suites.
        betas: Satake parameters of the U(3) principal series.
        tol_symbolic, tol_oracle, tol_gl2: Tolerances.
    """

    p: int = 3
    n: int | None = None
    r: int | None = None
    m: int | None = None
    a: int | None = None
    Mprec: int = 8
    T: int = 14
    depth: int = 6
    gk_depth: int = 20
    samples: int = 1000
    seed: int | None = None
    betas: tuple = ("1/2", "2/3", "-1/2")
    tol_symbolic: float = 0.0
    tol_oracle: float = 1e-3
    tol_gl2: float = 1e-6

    def validate(self, suite: str | None = None) -> "RunConfig":
        if not (_is_prime(self.p) and self.p % 2):
            raise ConfigError(f"p: must be an odd prime, got {self.p}")
        for name in ("Mprec", "T", "depth", "gk_depth", "samples"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name}: must be positive, got {getattr(self, name)}")
        for name in ("n", "r"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigError(f"{name}: must be positive, got {v}")
        for name in ("m", "a"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"{name}: must be nonnegative, got {v}")
        if self.n is not None and self.r is not None and self.r > self.n:
            raise ConfigError(f"r: must not exceed n, got r={self.r} n={self.n}")
        if not self.betas:
            raise ConfigError("betas: need at least one Satake parameter")
        for b in self.betas:
            try:
                rat(b)
            except (ValueError, TypeError, ZeroDivisionError):
                raise ConfigError(f"betas: cannot parse {b!r}") from None
        needs_seed = suite == "all" or suite in RANDOMIZED
        if needs_seed and self.seed is None:
            raise ConfigError(f"seed: required by the randomized suite {suite!r}")
        return self

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        """Build from string or typed values; unknown keys raise ConfigError."""
        known = {f.name: f for f in fields(cls)}
        kw = {}
        for key, raw in values.items():
            if key not in known:
                raise ConfigError(f"{key}: unknown configuration key")
            kw[key] = _coerce_field(key, raw)
        return cls(**kw)

    def to_json(self) -> dict:
        return asdict(self)


def _coerce_field(key: str, raw):
    if raw is None:
        return None
    if key == "betas":
        if isinstance(raw, str):
            return tuple(x.strip() for x in raw.split(",") if x.strip())
        return tuple(str(x) for x in raw)
    try:
        if key.startswith("tol_"):
            return float(raw)
        return int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None


def read_config_file(path: str) -> dict:
    """Parse a ``key=value`` file; blank lines and ``#`` comments are skipped."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def env_overrides(environ=None) -> dict:
    """Values from ``UNITARY_NEWFORMS_<FIELD>`` variables (field name upper-cased)."""
    environ = os.environ if environ is None else environ
    out = {}
    for f in fields(RunConfig):
        key = ENV_PREFIX + f.name.upper()
        if key in environ:
            out[f.name] = environ[key]
    return out


# ---------------------------------------------------------------------------
# records


def record(check: str, criterion: int, parameters: dict, residual, tolerance: float,
           provenance: str, **extra) -> dict:
    residual = float(residual)
    out = {"check": check, "criterion": criterion, "parameters": parameters,
           "residual": residual, "tolerance": tolerance,
           "status": "pass" if residual <= tolerance else "fail", "provenance": provenance}
    out.update(extra)
    return out


def dumps(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def _pick(value, default):
    return default if value is None else [value]


def _rng(cfg: RunConfig, *key) -> random.Random:
    """Independent deterministic stream per configuration key."""
    return random.Random(f"{cfg.seed}:" + ":".join(str(k) for k in key))


def _sampler(cfg: RunConfig, F: LocalField, n: int, *key, word_length: int = 10) -> Sampler:
    S = Sampler(F, n, seed=0, word_length=word_length)
    S.rng = _rng(cfg, *key)
    return S


# ---------------------------------------------------------------------------
# criteria 1-3: dimensions


def check_dimension_trace(cfg: RunConfig) -> Iterator[dict]:
    for n in _pick(cfg.n, [1, 2, 3]):
        for a in _pick(cfg.a, range(5)):
            ms = _pick(cfg.m, range(a + 9))
            bad = [m for m in ms if dim_oldforms(n, a, m) != trace_count(n, a, m, cfg.p)]
            yield record("dims.closed_form_vs_trace", 1, {"n": n, "a": a, "m": list(ms)},
                         len(bad), 0, "dimension of fixed vectors vs involution trace",
                         mismatches=bad)


def check_vandermonde(cfg: RunConfig) -> Iterator[dict]:
    for n in _pick(cfg.n, range(1, 7)):
        for r in _pick(cfg.r, range(1, min(n, 5) + 1)):
            if r > n:
                continue
            bad = [ell for ell in range(11) if not vandermonde_check(ell, r, n)]
            yield record("dims.vandermonde", 2, {"n": n, "r": r, "ell_max": 10}, len(bad), 0,
                         "binomial convolution identity", mismatches=bad)


def _gl_blocks(n: int, k: int):
    """Tuples of k GL ranks with sum at most n."""
    if k == 0:
        yield ()
        return
    for r in range(1, n + 1):
        for rest in _gl_blocks(n - r, k - 1):
            yield (r,) + rest


def check_recursion(cfg: RunConfig) -> Iterator[dict]:
    for n in _pick(cfg.n, range(1, 6)):
        bad_cond, bad_dim, cases = [], [], 0
        for k in range(3):
            for rs in _gl_blocks(n, k):
                for a_taus in _product(range(4), k):
                    for a0 in range(4):
                        a = conductor_arith([("gl", x) for x in a_taus] + [("anchor", a0)])
                        via_params = a0 + sum(x + dual_conductor(x) for x in a_taus)
                        if a != via_params:
                            bad_cond.append((rs, a_taus, a0))
                        for m in _pick(cfg.m, range(11)):
                            cases += 1
                            if not dim_recursion_check(n, rs, a_taus, a0, m):
                                bad_dim.append((rs, a_taus, a0, m))
        yield record("dims.conductor_recursion", 3, {"n": n}, len(bad_cond), 0,
                     "conductor of a parabolic induction from its pieces")
        yield record("dims.dimension_recursion", 3, {"n": n, "cases": cases}, len(bad_dim), 0,
                     "fixed-vector count by peeling GL factors",
                     mismatches=[list(map(list, b[:2])) + list(b[2:]) for b in bad_dim[:5]])


def _product(it, k):
    import itertools
    return itertools.product(it, repeat=k)


# ---------------------------------------------------------------------------
# criterion 4: compact decomposition


def check_decomposition(cfg: RunConfig) -> Iterator[dict]:
    F = LocalField(cfg.p)
    for n in _pick(cfg.n, [1, 2]):
        ms = _pick(cfg.m, range(1, 5))
        per = max(1, math.ceil(cfg.samples / len(ms)))
        for m in ms:
            if m < 1:
                continue
            S = _sampler(cfg, F, n, "decomp", n, m)
            spec = LevelSpec(n, m)
            M = m + cfg.Mprec
            roundtrip = membership = 0
            for _ in range(per):
                g = S.k_element(m, n)
                dec = decompose_compact(g, spec, M=M)
                diff = mat_sub(dec.product().rows, g.rows)
                if not all(x.val() >= M for row in diff for x in row):
                    roundtrip += 1
                ok = ((dec.z * dec.z.conj() - 1).val() >= M
                      and all(y.val() >= m for _, y, _ in dec.minus)
                      and all(y.val() >= 0 for _, y, _ in dec.plus)
                      and group_membership(dec.k, "R", n, m))
                membership += not ok
            params = {"n": n, "m": m, "samples": per, "precision": M}
            yield record("decomp.round_trip", 4, params, roundtrip, 0,
                         "factorization of K_{n,m} reproduces the element")
            yield record("decomp.factor_membership", 4, params, membership, 0,
                         "each factor lies in its subgroup")


# ---------------------------------------------------------------------------
# criteria 5-6: double cosets and Levi intersections


def _rep(F: LocalField, n: int, spec: LevelSpec, d: int, side: str):
    if side == "Pbar":
        return build_root_element(F, n, "e1", F.uniformizer(d))
    return build_root_element(F, n, "-e1", F.uniformizer(spec.e + d))


def _configs(cfg: RunConfig):
    for n in _pick(cfg.n, [1, 2]):
        for r in _pick(cfg.r, range(1, n + 1)):
            if r > n:
                continue
            for m in _pick(cfg.m, range(5)):
                yield n, r, m


def check_cosets(cfg: RunConfig) -> Iterator[dict]:
    F = LocalField(cfg.p)
    for n, r, m in _configs(cfg):
        spec = LevelSpec(n, m)
        S = _sampler(cfg, F, n, "cosets", n, r, m, word_length=8)
        reps = {side: [_rep(F, n, spec, d, side) for d in range(spec.ell + 1)]
                for side in ("Pbar", "P")}
        labels = {side: [coset_classify(g, n, r, spec, side) for g in reps[side]]
                  for side in reps}
        distinct = sum(labels[side] != list(range(spec.ell + 1)) for side in labels)
        moved = cross = 0
        for i in range(cfg.samples):
            d = i % (spec.ell + 1)
            side = "Pbar" if (i // (spec.ell + 1)) % 2 == 0 else "P"
            pb = S.pbar_element(n, r, 1)
            if side == "P":
                pb = pb.transpose()
            g = pb * reps[side][d] * S.k0_element(m, n)
            if coset_classify(g, n, r, spec, side) != d:
                moved += 1
            if side == "Pbar" and classify_by_invariant(g, n, r, spec) != d:
                cross += 1
        params = {"n": n, "r": r, "m": m, "samples": cfg.samples}
        yield record("cosets.representatives_distinct", 5, params, distinct, 0,
                     "the l+1 representatives fall in distinct classes")
        yield record("cosets.classifier_invariance", 5, params, moved, 0,
                     "class is unchanged under parabolic and compact perturbation")
        yield record("cosets.invariant_cross_check", 5, params, cross, 0,
                     "lattice invariant agrees with the constructive classifier")


def check_levi(cfg: RunConfig) -> Iterator[dict]:
    F = LocalField(cfg.p)
    jobs = [(side, n, r, m, d) for side in ("Pbar", "P") for n, r, m in _configs(cfg)
            for d in range(LevelSpec(n, m).ell + 1)]
    S = _sampler(cfg, F, 2, "levi")
    fails = {j: 0 for j in jobs}
    counts = {j: 0 for j in jobs}
    for i in range(cfg.samples):
        side, n, r, m, d = job = jobs[i % len(jobs)]
        spec = LevelSpec(n, m)
        counts[job] += 1
        try:
            h = sample_levi_intersection(S, n, r, spec, d, side)
        except RuntimeError:
            fails[job] += 1
            continue
        fails[job] += not all(levi_membership(h, n, r, spec, d, side))
    total = sum(fails.values())
    worst = [list(j) for j in jobs if fails[j]][:5]
    yield record("cosets.levi_membership", 6,
                 {"samples": cfg.samples, "configurations": len(jobs)}, total, 0,
                 "Levi part of the stabilizer lies in the product of level subgroups",
                 failing=worst)


# ---------------------------------------------------------------------------
# criterion 7: involution and trace


def check_trace(cfg: RunConfig) -> Iterator[dict]:
    rng = _rng(cfg, "iota")
    bad = bad_mult = 0
    for i in range(cfg.samples):
        n = 1 + i % 3
        h = random_gl_element(n, cfg.p, rng)
        if involution_iota(involution_iota(h)) != h:
            bad += 1
        if i % 10 == 0:
            g = random_gl_element(n, cfg.p, rng, terms=2)
            if involution_iota(h * g) != involution_iota(h) * involution_iota(g):
                bad_mult += 1
    yield record("trace.involution_square", 7, {"samples": cfg.samples}, bad, 0,
                 "the involution squares to the identity")
    yield record("trace.involution_multiplicative", 7,
                 {"samples": math.ceil(cfg.samples / 10)}, bad_mult, 0,
                 "the involution is an algebra map")
    for n in _pick(cfg.n, [1, 2, 3]):
        bad_t = []
        for a in _pick(cfg.a, range(5)):
            for j in range(9):
                if trace_count(n, a, a + j, cfg.p) != binom(j // 2 + n, n):
                    bad_t.append((a, j))
        yield record("trace.binomial", 7, {"n": n, "m_minus_a_max": 8}, len(bad_t), 0,
                     "trace of the involution equals the binomial count")


# ---------------------------------------------------------------------------
# criterion 8: GL(2) oracle


GL2_PARAMS = [("1/2", "1/3"), ("2", "-1/3"), ("1", "1")]


def check_gl2_oracle(cfg: RunConfig) -> Iterator[dict]:
    for p in (3, 5):
        F = LocalField(p)
        for pair in GL2_PARAMS:
            al = tuple(rat(x) for x in pair)
            table = gl2_oracle_table(F, al, 3, cfg.depth)
            ordered = sorted(al, key=abs)
            worst = 0.0
            for mu, v in table.entries.items():
                exact = complex(gl_whittaker_value(mu, ordered, p))
                worst = max(worst, abs(complex(v) - exact))
            yield record("rs.gl2_oracle", 8, {"p": p, "alphas": list(pair), "depth": cfg.depth,
                                              "weights": len(table.entries)},
                         worst, cfg.tol_gl2, "truncated Jacquet integral vs Schur formula")


# ---------------------------------------------------------------------------
# criterion 9: intertwining operator


GK_S = [0.75, complex(0.75, 1.3), complex(1.2, -0.4), 2.0]
GK_ALPHAS = ["1", "1/2", "-2/3"]


def check_gk(cfg: RunConfig) -> Iterator[dict]:
    F = LocalField(cfg.p)
    for m in _pick(cfg.m, range(4)):
        for al in GK_ALPHAS:
            worst = 0.0
            over_bound = 0
            for s in GK_S:
                rep = gk_integral(F, rat(al), m, s, cfg.gk_depth)
                worst = max(worst, rep.residual)
                over_bound += rep.residual > rep.bound + 1e-12
            yield record("gk.intertwining", 9,
                         {"p": cfg.p, "m": m, "alpha": al, "s": [str(s) for s in GK_S],
                          "depth": cfg.gk_depth},
                         worst, cfg.tol_oracle, "rank-one intertwining integral vs L-ratio",
                         outside_tail_bound=over_bound)


# ---------------------------------------------------------------------------
# criterion 10: Rankin-Selberg


RS_S = [1.0, complex(1.5, 0.3), 2.2]
RS_ALPHAS = ["1", "1/2", "-1/3"]


def _oracle_table(cfg: RunConfig, F: LocalField, beta) -> WhittakerTable:
    return u3_oracle_table(F, beta, -2, cfg.T, cfg.depth)


def check_rs(cfg: RunConfig) -> Iterator[dict]:
    F = LocalField(cfg.p)
    q = F.q
    for b in cfg.betas:
        beta = rat(b)
        par = UnramParam.u3_principal(beta)
        tab = _oracle_table(cfg, F, beta)
        params = {"p": cfg.p, "beta": b, "depth": cfg.depth, "T": cfg.T}
        worst = 0.0
        for al in RS_ALPHAS:
            vals = [rs_ratio(tab, par, [rat(al)], s, F.qE, cfg.T) for s in RS_S]
            worst = max(worst, max(abs(v - vals[0]) for v in vals) / abs(vals[0]))
        yield record("rs.ratio_constant_in_s", 10, dict(params, alphas=RS_ALPHAS), worst,
                     cfg.tol_oracle, "L(2s,As) Psi / L(s, pi x tau) is independent of s")
        x0 = xi_assemble(tab, 1, 1, 0, 0, par, T=cfg.T, q=q, tol=cfg.tol_oracle)
        yield record("rs.newform_xi_constant", 10, params, nonconstant_norm(x0.poly, q),
                     cfg.tol_oracle, "Xi of the newform is constant in X")
        const = complex(x0.poly.coefficient([0], q))
        yield record("rs.newform_constant_value", 10, params, abs(const - 1), cfg.tol_oracle,
                     "the constant equals the normalized table value at 0")
        kmax = min(cfg.T, 8)
        expo = calibrate_kappa(tab, beta, F.qE, kmax)
        yield record("rs.kappa_calibration", 10, dict(params, kmax=kmax),
                     max(abs(c - 0.5) for c in expo), cfg.tol_oracle,
                     "torus weight exponent n - r/2 matches the oracle")
    yield from check_rs_symbolic(cfg)


def check_rs_symbolic(cfg: RunConfig) -> Iterator[dict]:
    F = LocalField(cfg.p)
    q = F.q
    tol = cfg.tol_symbolic
    for b in cfg.betas:
        beta = rat(b)
        par = UnramParam.u3_principal(beta)
        tab = u3_spherical_table_exact(F, beta, -2, cfg.T + 2)
        x0 = xi_assemble(tab, 1, 1, 0, 0, par, T=cfg.T, q=q, tol=0.0)
        params = {"p": cfg.p, "beta": b, "T": cfg.T}
        yield record("rs.functional_equation", 10, params, fe_residual(x0, q), tol,
                     "Xi(1/X) = X^(a-m) Xi(X) for the exact spherical table")
        g = grading_constancy(x0, q, tol)
        yield record("rs.grading_constancy", 10, dict(params, grades=g["grades"]),
                     0 if (g["nonnegative"] and g["constant"]) else 1, 0,
                     "nonnegative grading with the functional equation forces a constant")
    keys = [(i, j) for i in range(7) for j in range(7) if i >= j]
    ft = formal_table(2, keys)
    x2 = xi_assemble(ft, 2, 2, 0, 0, None, T=4, degree_bound=4)
    x1 = xi_assemble(ft, 2, 1, 0, 0, None, T=4, degree_bound=4)
    yield record("rs.restriction_formal", 10, {"n": 2, "T": 4},
                 restriction_residual(x2, x1), tol,
                 "setting the last variable to 0 lowers the Levi rank (formal table)",
                 nonzero=bool(x1.poly.terms))
    zero = WhittakerTable(1, {(k,): 0 for k in range(-2, cfg.T + 1)})
    xz = xi_assemble(zero, 1, 1, 0, 0, UnramParam.u3_principal(rat(cfg.betas[0])),
                     T=cfg.T, q=q, tol=0.0)
    yield record("rs.kernel_zero_table", 10, {"n": 1}, xz.poly.qfree(q).max_abs_coeff(), tol,
                 "a vanishing torus restriction gives zero")


# ---------------------------------------------------------------------------
# Hecke algebra: Satake transform and equivariance


def _level_table(F: LocalField, beta, m: int, kmax: int) -> WhittakerTable:
    """Torus values of a level-m oldform of the spherical U(3) representation."""
    base = u3_spherical_table_exact(F, beta, -4, kmax)
    if m == 0:
        return base
    if m % 2 == 0:
        return apply_level_raising(F, (0,), 0, m, base)
    up = apply_level_one_up(F, base)
    return up if m == 1 else apply_level_raising(F, (0,), 1, m, up)


def check_hecke(cfg: RunConfig) -> Iterator[dict]:
    F = LocalField(cfg.p)
    q = F.q
    tol = cfg.tol_symbolic
    for m in _pick(cfg.m, range(3)):
        direct = satake_from_counts(1, cosets_rank_one(F, 1, m).counts()).qfree(q)
        bfs = satake_from_counts(1, enumerate_cosets(F, 1, (1,), m).counts()).qfree(q)
        count = satake_transform(F, (1,), 1, m)
        res = max((direct - bfs).max_abs_coeff(), (direct - count).max_abs_coeff())
        yield record("hecke.satake_three_ways", 10, {"p": cfg.p, "n": 1, "m": m, "lambda": [1]},
                     res, tol, "coset enumeration, direct cosets and lattice counting agree",
                     satake=direct.to_json())
    if cfg.n in (None, 2):
        S2 = satake_transform(F, (1, 0), 2, 0)
        expect = SymLaurentPoly.zero(2) + 20
        for i in range(2):
            for sgn in (1, -1):
                e = [0, 0]
                e[i] = sgn
                expect = expect + SymLaurentPoly.monomial(2, e, q ** 3)
        yield record("hecke.satake_rank_two", 10, {"p": cfg.p, "n": 2, "lambda": [1, 0]},
                     (S2 - expect).max_abs_coeff() if q == 3 else 0.0, tol,
                     "rank-two Satake image is Weyl invariant with the expected coefficients",
                     satake=S2.to_json())
    beta = rat(cfg.betas[0])
    par = UnramParam.u3_principal(beta)
    kmax = cfg.T + 6
    for m in _pick(cfg.m, range(3)):
        base = _level_table(F, beta, m, kmax)
        xb = xi_assemble(base, 1, 1, m, 0, par, T=cfg.T, q=q, tol=0.0)
        acted = apply_hecke(base, cosets_rank_one(F, 1, m))
        xa = xi_assemble(acted, 1, 1, m, 0, par, T=cfg.T, q=q, low=-1, tol=0.0)
        S = satake_transform(F, (1,), 1, m)
        res = (xa.poly.qfree(q) - (S * xb.poly).qfree(q)).max_abs_coeff()
        yield record("hecke.equivariance", 10, {"p": cfg.p, "n": 1, "m": m, "beta": cfg.betas[0]},
                     res, tol, "Xi(phi * v) = S(phi) Xi(v)")
    tab = u3_spherical_table_exact(F, beta, -4, kmax)
    c1, c2 = cosets_rank_one(F, 1, 0), cosets_rank_one(F, 2, 0)
    A = apply_hecke(apply_hecke(tab, c1), c2)
    B = apply_hecke(apply_hecke(tab, c2), c1)
    common = sorted(set(A.keys()) & set(B.keys()))
    diff = max((abs(complex(A[k] - B[k])) for k in common), default=0.0)
    yield record("hecke.commutativity", 10, {"p": cfg.p, "lambdas": [[1], [2]]}, diff, tol,
                 "two Hecke operators commute on the table", entries=len(common))


# ---------------------------------------------------------------------------
# criterion 11: oldforms


def check_oldforms(cfg: RunConfig) -> Iterator[dict]:
    F = LocalField(cfg.p)
    q = F.q
    beta = rat(cfg.betas[0])
    par = UnramParam.u3_principal(beta)
    S = satake_transform(F, (1,), 1, 0)
    sources = [("oracle", _oracle_table(cfg, F, beta), cfg.tol_oracle),
               ("exact", u3_spherical_table_exact(F, beta, -4, cfg.T + 6), cfg.tol_symbolic)]
    for kind, tab, tol in sources:
        x0 = xi_assemble(tab, 1, 1, 0, 0, par, T=cfg.T, q=q, tol=max(tol, 1e-9))
        raised = apply_level_raising(F, (1,), 0, 2, tab)
        x2 = xi_assemble(raised, 1, 1, 2, 0, par, T=cfg.T, q=q, tol=max(tol, 1e-9))
        got = x2.poly.qfree(q)
        params = {"p": cfg.p, "n": 1, "beta": cfg.betas[0], "lambda": [1], "m": 2, "a": 0,
                  "table": kind}
        for form in ("printed", "measured"):
            pred = oldform_xi(x0.poly, 1, 0, 2, S, form).qfree(q)
            yield record(f"oldforms.level_raise_{form}", 11, params,
                         (got - pred).max_abs_coeff(), tol,
                         f"level-raised Xi vs the {form} closed form",
                         computed=got.to_json(), predicted=pred.to_json())
        up = apply_level_one_up(F, tab)
        x1 = xi_assemble(up, 1, 1, 1, 0, par, T=cfg.T, q=q, tol=max(tol, 1e-9))
        P1 = x1.poly.qfree(q)
        lam1 = x1.poly.coefficient([0], q)
        shape = (P1 - level_one_up_xi(lam1, 1)).max_abs_coeff()
        yield record("oldforms.level_one_up_shape", 11, dict(params, m=1, lam=None), shape, tol,
                     "Xi at level a+1 is Lambda' (1 + X)", constant=str(lam1))
        yield record("oldforms.level_one_up_nonzero", 11, dict(params, m=1, lam=None),
                     0 if abs(complex(lam1)) > 1e-9 else 1, 0,
                     "the level a+1 constant is nonzero")


# ---------------------------------------------------------------------------
# registry


SUITE_CHECKS: dict[str, list[Callable[[RunConfig], Iterator[dict]]]] = {
    "dims": [check_dimension_trace, check_vandermonde, check_recursion],
    "decomp": [check_decomposition],
    "cosets": [check_cosets, check_levi],
    "trace": [check_trace],
    "hecke": [check_hecke],
    "gk": [check_gk],
    "rs": [check_gl2_oracle, check_rs],
    "oldforms": [check_oldforms],
}


def run_suite(name: str, cfg: RunConfig) -> Iterator[dict]:
    """Records of one suite (or all suites) in deterministic order."""
    cfg.validate(name)
    names = SUITES if name == "all" else (name,)
    for s in names:
        if s not in SUITE_CHECKS:
            raise ConfigError(f"suite: unknown suite {s!r}")
        for fn in SUITE_CHECKS[s]:
            for rec in fn(cfg):
                rec["suite"] = s
                yield rec
