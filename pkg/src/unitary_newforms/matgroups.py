"""Matrix groups over E: G_n = U(2n+1), H_r = U(2r) and their level subgroups.

Conventions: matrices are indexed from 0 internally; the public root labels
use 1-based indices. For size N, ``i* = N - 1 - i``; for G_n the middle index
is ``n``. ``J_N`` is the anti-diagonal matrix of ones, and a unitary g
satisfies ``conj(g)^T J g = J``.

Root labels are strings such as ``"e1-e2"``, ``"e1+e2"``, ``"e1"``, ``"2e1"``
and their negatives ``"-e1+e2"``, ``"-e1-e2"``, ``"-e1"``, ``"-2e1"``. A
negative root element is the transpose of the positive one.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from gmpy2 import mpq

from .exactnum import INF, LocalField, QuadElt, rat


class IndeterminateError(ArithmeticError):
    """A membership answer depends on digits beyond the working precision."""


class MembershipError(ValueError):
    """An input element is outside the group an operation requires."""


class GroupElement:
    """Square matrix over E, exact or known modulo p^M.

    Args:
        F: The field context.
        rows: Row lists of ``QuadElt``.
        M: ``None`` for exact entries, else the precision p^M of every entry.
    """

    __slots__ = ("F", "rows", "M")

    def __init__(self, F: LocalField, rows: Sequence[Sequence[QuadElt]], M: int | None = None):
        self.F = F
        self.rows = [list(r) for r in rows]
        self.M = M

    @property
    def N(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij) -> QuadElt:
        i, j = ij
        return self.rows[i][j]

    def __mul__(self, other) -> "GroupElement":
        if isinstance(other, GroupElement):
            return GroupElement(self.F, mat_mul(self.rows, other.rows), _min_prec(self.M, other.M))
        other = self.F(other)
        return GroupElement(self.F, [[x * other for x in row] for row in self.rows], self.M)

    def __rmul__(self, other) -> "GroupElement":
        other = self.F(other)
        return GroupElement(self.F, [[other * x for x in row] for row in self.rows], self.M)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElement) and self.rows == other.rows

    __hash__ = None

    def __repr__(self) -> str:
        body = "\n ".join("[" + ", ".join(repr(x) for x in r) + "]" for r in self.rows)
        return f"GroupElement(N={self.N}, M={self.M},\n [{body}])"

    def transpose(self) -> "GroupElement":
        return GroupElement(self.F, [list(c) for c in zip(*self.rows)], self.M)

    def conj(self) -> "GroupElement":
        return GroupElement(self.F, [[x.conj() for x in r] for r in self.rows], self.M)

    def unitary_inverse(self) -> "GroupElement":
        """J conj(g)^T J, the inverse of a unitary element."""
        N = self.N
        return GroupElement(
            self.F,
            [[self.rows[N - 1 - j][N - 1 - i].conj() for j in range(N)] for i in range(N)],
            self.M,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.F, mat_inv(self.F, self.rows), self.M)

    def reduce(self, M: int) -> "GroupElement":
        return GroupElement(self.F, [[x.reduce(M) for x in r] for r in self.rows], M)

    def with_precision(self, M: int | None) -> "GroupElement":
        return GroupElement(self.F, self.rows, M)

    def min_val(self):
        return min(x.val() for r in self.rows for x in r)

    def is_upper_triangular(self) -> bool:
        return all(not self.rows[i][j] for i in range(self.N) for j in range(i))

    def is_unitary(self) -> bool:
        """Exact check, or check modulo the effective precision when inexact."""
        res = mat_sub(mat_mul(mat_conj_t_J(self.rows), self.rows), J_rows(self.F, self.N))
        if self.M is None:
            return all(not x for r in res for x in r)
        mv = self.min_val()
        eff = self.M + (min(0, mv) if mv != INF else 0)
        return all(x.val() >= eff for r in res for x in r)

    def to_json(self) -> dict:
        return {"N": self.N, "M": self.M, "rows": [[x.to_json() for x in r] for r in self.rows]}


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def mat_mul(A, B):
    n, m = len(A), len(B[0])
    inner = len(B)
    zero = A[0][0].F.zero
    out = [[zero] * m for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        row = out[i]
        for k in range(inner):
            a = Ai[k]
            if not a:
                continue
            Bk = B[k]
            for j in range(m):
                b = Bk[j]
                if b:
                    row[j] = row[j] + a * b
    return out


def mat_sub(A, B):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_conj_t_J(A):
    """conj(A)^T J for square A."""
    N = len(A)
    return [[A[N - 1 - j][i].conj() for j in range(N)] for i in range(N)]


def mat_inv(F: LocalField, A):
    """Gauss-Jordan inverse over E, choosing pivots of minimal valuation."""
    n = len(A)
    M = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(A)]
    for c in range(n):
        best = min(range(c, n), key=lambda i: (M[i][c].val(), i))
        if not M[best][c]:
            raise ZeroDivisionError("singular matrix")
        M[c], M[best] = M[best], M[c]
        inv = M[c][c].inverse()
        M[c] = [x * inv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [r[n:] for r in M]


def identity_rows(F: LocalField, N: int):
    return [[F.one if i == j else F.zero for j in range(N)] for i in range(N)]


def J_rows(F: LocalField, N: int):
    return [[F.one if i + j == N - 1 else F.zero for j in range(N)] for i in range(N)]


def identity(F: LocalField, N: int) -> GroupElement:
    return GroupElement(F, identity_rows(F, N))


def J_matrix(F: LocalField, N: int) -> GroupElement:
    return GroupElement(F, J_rows(F, N))


def diag(F: LocalField, entries: Sequence) -> GroupElement:
    N = len(entries)
    return GroupElement(F, [[F(entries[i]) if i == j else F.zero for j in range(N)]
                            for i in range(N)])


# ---------------------------------------------------------------------------
# root elements

_ROOT_RE = re.compile(r"^(-?)(2?)e(\d+)(?:([+-])e(\d+))?$")


@dataclass(frozen=True)
class RootLabel:
    """A root of G_n or H_r in 1-based index notation.

    Attributes:
        sign: +1 for the listed positive roots, -1 for their transposes.
        kind: ``"e-e"``, ``"e+e"``, ``"e"`` or ``"2e"``.
        i: First index.
        j: Second index for two-index kinds.
    """

    sign: int
    kind: str
    i: int
    j: int | None = None

    @classmethod
    def parse(cls, label: "str | RootLabel") -> "RootLabel":
        if isinstance(label, RootLabel):
            return label
        m = _ROOT_RE.match(label.replace(" ", ""))
        if not m:
            raise ValueError(f"bad root label {label!r}")
        neg, two, i, op, j = m.groups()
        i = int(i)
        if two and op:
            raise ValueError(f"bad root label {label!r}")
        if neg:
            # "-e_i+e_j" is the transpose of "e_i-e_j", "-e_i-e_j" of "e_i+e_j"
            if op == "+":
                return cls(-1, "e-e", i, int(j))
            if op == "-":
                return cls(-1, "e+e", i, int(j))
            return cls(-1, "2e" if two else "e", i)
        if op:
            return cls(1, "e-e" if op == "-" else "e+e", i, int(j))
        return cls(1, "2e" if two else "e", i)

    def __str__(self) -> str:
        if self.kind == "e-e":
            return f"e{self.i}-e{self.j}" if self.sign > 0 else f"-e{self.i}+e{self.j}"
        if self.kind == "e+e":
            return f"e{self.i}+e{self.j}" if self.sign > 0 else f"-e{self.i}-e{self.j}"
        s = "" if self.sign > 0 else "-"
        return f"{s}{'2' if self.kind == '2e' else ''}e{self.i}"


def _root_rows(F: LocalField, N: int, mid: int | None, lab: RootLabel, y: QuadElt):
    rows = identity_rows(F, N)
    star = lambda t: N - 1 - t
    i = lab.i - 1
    yb = y.conj()
    if lab.kind == "e-e":
        j = lab.j - 1
        rows[i][j] = rows[i][j] + y
        rows[star(j)][star(i)] = rows[star(j)][star(i)] - yb
    elif lab.kind == "e+e":
        j = lab.j - 1
        rows[i][star(j)] = rows[i][star(j)] + y
        rows[j][star(i)] = rows[j][star(i)] - yb
    elif lab.kind == "e":
        if mid is None:
            raise ValueError("short roots need an odd-size group")
        rows[i][mid] = y
        rows[mid][star(i)] = -yb
        rows[i][star(i)] = y * yb * mpq(-1, 2)
    elif lab.kind == "2e":
        if not y.in_F():
            raise ValueError("long-root parameter must lie in F")
        rows[i][star(i)] = y * F.delta
    if lab.sign < 0:
        rows = [list(c) for c in zip(*rows)]
    return rows


def _check_indices(lab: RootLabel, n: int):
    if not 1 <= lab.i <= n:
        raise ValueError(f"index {lab.i} out of range 1..{n}")
    if lab.j is not None:
        if not 1 <= lab.j <= n or lab.j <= lab.i:
            raise ValueError(f"need 1 <= i < j <= {n} for {lab}")


def build_root_element(F: LocalField, n: int, label, y) -> GroupElement:
    """The root element chi_alpha(y) of G_n.

    Args:
        F: Field context.
        n: Rank; the matrix has size 2n+1.
        label: Root label string or ``RootLabel``.
        y: Parameter in E (in F for long roots).

    Raises:
        ValueError: For an invalid index range or a long-root parameter
            outside F.
    """
    lab = RootLabel.parse(label)
    _check_indices(lab, n)
    return GroupElement(F, _root_rows(F, 2 * n + 1, n, lab, F(y)))


def build_root_element_h(F: LocalField, r: int, label, y) -> GroupElement:
    """The root element chi_alpha(y) of H_r (size 2r); short roots excluded."""
    lab = RootLabel.parse(label)
    _check_indices(lab, r)
    if lab.kind == "e":
        raise ValueError("H_r has no short roots")
    return GroupElement(F, _root_rows(F, 2 * r, None, lab, F(y)))


def _perm_rows(F: LocalField, perm: Sequence[int]):
    """Permutation matrix with e_i -> e_{perm[i]} (0-based)."""
    n = len(perm)
    rows = [[F.zero] * n for _ in range(n)]
    for i, j in enumerate(perm):
        rows[j][i] = F.one
    return rows


def hat(a: GroupElement | Sequence, n: int, odd: bool = True) -> GroupElement:
    """Embed a in GL_r(E) as diag(a, I, a*) in G_n (or H_n when ``odd`` is False).

    a* = J conj(a)^{-T} J.
    """
    if not isinstance(a, GroupElement):
        raise TypeError("expected a GroupElement")
    F = a.F
    r = a.N
    N = 2 * n + 1 if odd else 2 * n
    ainv = mat_inv(F, a.rows)
    rows = identity_rows(F, N)
    for i in range(r):
        for j in range(r):
            rows[i][j] = a.rows[i][j]
            # (a*)_{ij} = conj(ainv)_{r-1-j, r-1-i}, placed in the last r slots
            rows[N - r + i][N - r + j] = ainv[r - 1 - j][r - 1 - i].conj()
    return GroupElement(F, rows, a.M)


def embed_h(h: GroupElement, n: int) -> GroupElement:
    """Embed H_r (size 2r) into G_n, acting on e_1..e_r and f_r..f_1."""
    F = h.F
    r2 = h.N
    r = r2 // 2
    N = 2 * n + 1
    idx = list(range(r)) + list(range(N - r, N))
    rows = identity_rows(F, N)
    for a, ia in enumerate(idx):
        for b, ib in enumerate(idx):
            rows[ia][ib] = h.rows[a][b]
    return GroupElement(F, rows, h.M)


def restrict_h(g: GroupElement, r: int) -> GroupElement:
    """Inverse of ``embed_h`` (no membership check)."""
    N = g.N
    idx = list(range(r)) + list(range(N - r, N))
    return GroupElement(g.F, [[g.rows[a][b] for b in idx] for a in idx], g.M)


def embed_g(g0: GroupElement, n: int) -> GroupElement:
    """Embed G_{n0} into G_n as the middle block."""
    F = g0.F
    N = 2 * n + 1
    off = (N - g0.N) // 2
    rows = identity_rows(F, N)
    for i in range(g0.N):
        for j in range(g0.N):
            rows[off + i][off + j] = g0.rows[i][j]
    return GroupElement(F, rows, g0.M)


def middle_block(g: GroupElement, k: int) -> GroupElement:
    """The central (N - 2k) block, dropping k outer indices on each side."""
    return GroupElement(g.F, [r[k:g.N - k] for r in g.rows[k:g.N - k]], g.M)


def build_weyl_rep(F: LocalField, n: int, perm: Sequence[int] | None = None,
                   S: Iterable[int] = (), y=1, odd: bool = True) -> GroupElement:
    """The Weyl representative w_hat * w_S(y) of G_n (or H_n).

    Args:
        F: Field context.
        n: Rank.
        perm: 1-based permutation of 1..n as a sequence (``perm[i-1] = w(i)``).
        S: Subset of 1..n.
        y: Nonzero element of E.
        odd: Build in G_n (size 2n+1) when True, H_n (size 2n) otherwise.

    Raises:
        ValueError: If y = 0 or the data are malformed.
    """
    y = F(y)
    if not y:
        raise ValueError("w_S(y) needs y != 0")
    N = 2 * n + 1 if odd else 2 * n
    S = set(S)
    if any(not 1 <= s <= n for s in S):
        raise ValueError("S must be a subset of 1..n")
    rows = identity_rows(F, N)
    ybinv = y.conj().inverse()
    for s in S:
        j = s - 1
        js = N - 1 - j
        rows[j][j] = F.zero
        rows[js][js] = F.zero
        rows[j][js] = ybinv
        rows[js][j] = y
    w = GroupElement(F, rows)
    if perm is not None:
        perm0 = [p - 1 for p in perm]
        if sorted(perm0) != list(range(n)):
            raise ValueError("perm must be a permutation of 1..n")
        P = GroupElement(F, _perm_rows(F, perm0))
        w = hat(P, n, odd) * w
    return w


def torus(F: LocalField, ys: Sequence, odd: bool = True) -> GroupElement:
    """diag(y_1..y_n, [1,] conj(y_n)^{-1}..conj(y_1)^{-1})."""
    ys = [F(y) for y in ys]
    tail = [y.conj().inverse() for y in reversed(ys)]
    return diag(F, ys + ([F.one] if odd else []) + tail)


def t_ell(F: LocalField, n: int, ell: int, odd: bool = True) -> GroupElement:
    """The torus element diag(p^ell I_n, [1,] p^{-ell} I_n)."""
    return torus(F, [F.uniformizer(ell)] * n, odd)


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class LevelSpec:
    """Level m written as m = e + 2 ell."""

    n: int
    m: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError("rank and level must be nonnegative")

    @property
    def e(self) -> int:
        return self.m % 2

    @property
    def ell(self) -> int:
        return self.m // 2


def _val_ge(x: QuadElt, k, M: int | None) -> bool:
    """Certified test val(x) >= k for x known modulo p^M."""
    v = x.val()
    if M is None:
        return v >= k
    if v < M:
        return v >= k
    if k <= M:
        return True
    raise IndeterminateError(f"val >= {k} undecidable at precision {M}")


def _shape_violation(g: GroupElement, req, M: int | None):
    """First entry (i, j) failing ``val(g_ij - offset) >= k`` for req(i, j) = (k, offset)."""
    F = g.F
    for i in range(g.N):
        for j in range(g.N):
            k, off = req(i, j)
            if k is None:
                continue
            x = g.rows[i][j] - off if off else g.rows[i][j]
            if not _val_ge(x, k, M):
                return (i, j)
    return None


def _blocks(N: int, n: int):
    def blk(i):
        if i < n:
            return 0
        if N % 2 == 1 and i == n:
            return 1
        return 2
    return blk


def k_shape(n: int, m: int):
    """Required valuations of K_{n,m} entries: req(i, j) -> (k, offset)."""
    N = 2 * n + 1
    blk = _blocks(N, n)
    table = [[0, 0, -m], [m, None, 0], [m, m, 0]]

    def req(i, j):
        bi, bj = blk(i), blk(j)
        if bi == 1 and bj == 1:
            return (m, 1)
        return (table[bi][bj], 0)
    return req


def r_shape(r: int, m: int):
    N = 2 * r

    def req(i, j):
        bi, bj = i >= r, j >= r
        if not bi and bj:
            return (-m, 0)
        if bi and not bj:
            return (m, 0)
        return (0, 0)
    return req


def check_K(g: GroupElement, n: int, m: int) -> tuple[int, int] | None:
    """Return the first violating entry of the K_{n,m} shape, or None."""
    return _shape_violation(g, k_shape(n, m), g.M)


def group_membership(g, which: str, n: int = 0, m: int = 0, r: int | None = None,
                     check_unitary: bool = True) -> bool:
    """Certified membership test.

    Args:
        g: A ``GroupElement`` (or a ``QuadElt`` for ``E1``).
        which: One of ``U``, ``K``, ``K0``, ``R``, ``Gamma``, ``GammaPrime``,
            ``E1``, ``B``, ``P``, ``Pbar``, ``H``.
        n: Rank of G_n.
        m: Level.
        r: Rank for R, H, Gamma, P (R and Gamma accept their own sizes).
        check_unitary: Also require unitarity where relevant.

    Raises:
        IndeterminateError: If precision is insufficient to decide.
        ValueError: If sizes do not match.
    """
    if which == "E1":
        z = g if isinstance(g, QuadElt) else g.rows[0][0]
        M = None if isinstance(g, QuadElt) else g.M
        if isinstance(g, GroupElement):
            for i in range(g.N):
                for j in range(g.N):
                    want = z if i == j else z.F.zero
                    if not _val_ge(g.rows[i][j] - want, INF if M is None else M, M):
                        return False
        nrm = z.F(z.norm() - 1)
        return _val_ge(nrm, INF if M is None else M, M) and _val_ge(z - 1, m, M)
    if which in ("Gamma", "GammaPrime"):
        rr = g.N
        M = g.M
        det = mat_det(g.F, g.rows)
        if not all(_val_ge(x, 0, M) for row in g.rows for x in row):
            return False
        if det.val() != 0:
            return False
        for i in range(rr):
            for j in range(rr):
                last_i, last_j = i == rr - 1, j == rr - 1
                if last_i and last_j:
                    if not _val_ge(g.rows[i][j] - 1, m, M):
                        return False
                elif which == "Gamma" and last_i:
                    if not _val_ge(g.rows[i][j], m, M):
                        return False
                elif which == "GammaPrime" and last_j:
                    if not _val_ge(g.rows[i][j], m, M):
                        return False
        return True
    if check_unitary and not g.is_unitary():
        return False
    N = g.N
    if which == "U":
        return True
    if which == "K":
        _need(N == 2 * n + 1, "K needs a G_n element")
        return check_K(g, n, m) is None
    if which == "K0":
        _need(N == 2 * n + 1, "K0 needs a G_n element")
        ell = m // 2
        t = t_ell(g.F, n, ell)
        conj = t.unitary_inverse() * g * t
        return check_K(conj.with_precision(g.M), n, m) is None
    if which == "H":
        rr = r if r is not None else n
        return _in_h(g, n, rr)
    if which == "R":
        if N % 2 == 0:
            return _shape_violation(g, r_shape(N // 2, m), g.M) is None
        rr = r if r is not None else n
        if not _in_h(g, n, rr):
            return False
        return check_K(g, n, m) is None
    if which == "B":
        return all(_val_ge(g.rows[i][j], INF if g.M is None else g.M, g.M)
                   for i in range(N) for j in range(i))
    if which in ("P", "Pbar"):
        rr = r if r is not None else n
        return _in_parabolic(g, rr, upper=(which == "P"))
    raise ValueError(f"unknown group {which!r}")


def _need(cond: bool, msg: str):
    if not cond:
        raise ValueError(msg)


def _zero_entry(x: QuadElt, M) -> bool:
    return _val_ge(x, INF if M is None else M, M)


def _in_h(g: GroupElement, n: int, r: int) -> bool:
    """Whether g lies in the image of H_r in G_n."""
    N = g.N
    outer = set(range(r)) | set(range(N - r, N))
    F = g.F
    for i in range(N):
        for j in range(N):
            if (i in outer) != (j in outer):
                if not _zero_entry(g.rows[i][j], g.M):
                    return False
            elif i not in outer:
                want = F.one if i == j else F.zero
                if not _zero_entry(g.rows[i][j] - want, g.M):
                    return False
    return True


def _in_parabolic(g: GroupElement, r: int, upper: bool) -> bool:
    N = g.N

    def blk(i):
        return 0 if i < r else (2 if i >= N - r else 1)
    for i in range(N):
        for j in range(N):
            bi, bj = blk(i), blk(j)
            if (upper and bi > bj) or (not upper and bi < bj):
                if not _zero_entry(g.rows[i][j], g.M):
                    return False
    return True


def mat_det(F: LocalField, A) -> QuadElt:
    n = len(A)
    M = [list(r) for r in A]
    det = F.one
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return F.zero
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det = det * M[c][c]
        inv = M[c][c].inverse()
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return det


# ---------------------------------------------------------------------------
# Iwasawa decomposition


def _chi(F, n, label, y):
    return build_root_element(F, n, label, y)


def iwasawa_decompose(g: GroupElement, e: int = 0) -> tuple[GroupElement, GroupElement]:
    """Factor g = b k with b upper triangular in G_n and k in K_{n,e}.

    The bottom row is driven to a multiple of the last basis covector by
    right multiplication with elements of K_{n,e}, choosing the pivot of least
    weighted valuation (the weight accounts for the p^{+-e} blocks of K_{n,e}),
    and the procedure recurses on the middle block.

    Args:
        g: Element of G_n (size 2n+1, exact).
        e: 0 or 1.

    Returns:
        (b, k) with g == b * k exactly.
    """
    if e not in (0, 1):
        raise ValueError("e must be 0 or 1")
    F = g.F
    N = g.N
    if N % 2 == 0:
        raise ValueError("use the G_n embedding for H_r elements")
    n = N // 2
    cur = g
    ops: list[GroupElement] = []
    for s in range(n):
        last = N - 1 - s
        row = cur.rows[last]
        cols = range(s, last + 1)

        def nu(j):
            v = row[j].val()
            return v - e if j <= n else v
        best = min(nu(j) for j in cols)
        if best == INF:
            raise MembershipError("singular element")
        rcols = [j for j in cols if j > n and nu(j) == best]
        if rcols:
            piv = max(rcols)
        else:
            lcols = [j for j in cols if j < n and nu(j) == best]
            if not lcols:
                raise ArithmeticError("middle column is strictly minimal; element is not unitary")
            jl = min(lcols)
            w = build_weyl_rep(F, n, None, [jl + 1], F.uniformizer(e))
            cur = cur * w
            ops.append(w)
            piv = N - 1 - jl
        if piv != last:
            jj = N - 1 - piv
            perm = list(range(1, n + 1))
            perm[s], perm[jj] = perm[jj], perm[s]
            w = build_weyl_rep(F, n, perm)
            cur = cur * w
            ops.append(w)
        row = cur.rows[last]
        pv = row[last]
        for j in range(s + 1, n):
            js = N - 1 - j
            if row[js]:
                y = (row[js] / pv).conj()
                k = _chi(F, n, f"-e{s + 1}+e{j + 1}", y)
                cur = cur * k
                ops.append(k)
                row = cur.rows[last]
        for j in range(s + 1, n):
            if row[j]:
                y = (row[j] / pv).conj()
                k = _chi(F, n, f"-e{s + 1}-e{j + 1}", y)
                cur = cur * k
                ops.append(k)
                row = cur.rows[last]
        if row[n]:
            y = (row[n] / pv).conj()
            k = _chi(F, n, f"-e{s + 1}", y)
            cur = cur * k
            ops.append(k)
            row = cur.rows[last]
        if row[s]:
            x = -(row[s] / (pv * F.delta))
            if not x.in_F():
                raise ArithmeticError("isotropy failure; element is not unitary")
            k = _chi(F, n, f"-2e{s + 1}", x)
            cur = cur * k
            ops.append(k)
    if not cur.is_upper_triangular():
        raise ArithmeticError("Iwasawa elimination did not reach B_n")
    kinv = identity(F, N)
    for op in ops:
        kinv = kinv * op
    k = kinv.unitary_inverse()
    return cur, k


def iwasawa_decompose_h(h: GroupElement, e: int = 0, m: int | None = None
                        ) -> tuple[GroupElement, GroupElement]:
    """Factor h = b k in H_r with b upper triangular and k in R_{r,m}.

    ``m`` defaults to ``e``; general m is reduced to m mod 2 by conjugating
    with diag(p^{-ell} I, p^{ell} I).
    """
    F = h.F
    r = h.N // 2
    mm = e if m is None else m
    ee, ell = mm % 2, mm // 2
    s = torus(F, [F.uniformizer(-ell)] * r, odd=False)
    sinv = s.unitary_inverse()
    h0 = sinv * h * s
    b, k = iwasawa_decompose(embed_h(h0, r), ee)
    b_h = restrict_h(b, r)
    k_h = restrict_h(k, r)
    return s * b_h * sinv, s * k_h * sinv


# ---------------------------------------------------------------------------
# compact decomposition


@dataclass
class CompactDecomposition:
    """Factorization g = z * prod(minus) * prod(plus) * k of an element of K_{n,m}.

    Attributes:
        z: Central element of E^1_m (known mod p^M).
        minus: List of (label, y, matrix) for chi_{-e_j}(y), y in p^m.
        plus: List of (label, y, matrix) for chi_{e_i}(y), y in o_E.
        k: Remainder in R_{n,m} (fixes v0 modulo p^M).
        M: Working precision.
        newton_steps: Iterations used by each quadratic solve.
    """

    z: QuadElt
    minus: list
    plus: list
    k: GroupElement
    M: int
    newton_steps: list = field(default_factory=list)

    def product(self) -> GroupElement:
        F = self.k.F
        out = identity(F, self.k.N) * self.z
        for _, _, mat in self.minus:
            out = out * mat
        for _, _, mat in self.plus:
            out = out * mat
        return out * self.k


def hensel_solve(F: LocalField, a: QuadElt, b: QuadElt, c: QuadElt, m: int, M: int,
                 max_steps: int = 64) -> tuple[QuadElt, int]:
    """Solve c - b w - (1/2) p^m a w conj(w) = 0 for w in o_E by Newton's method.

    The unknown is split as w = u + v*delta with u, v in F and the 2x2
    Jacobian over F is inverted exactly; iterates are reduced mod p^(M+2).

    Returns:
        (w, steps) with the residual of valuation at least M.

    Raises:
        ArithmeticError: If b is not a unit or the iteration fails to converge.
    """
    if b.val() != 0:
        raise ArithmeticError("the linear coefficient must be a unit")
    pm = mpq(F.p) ** m
    eps = F.eps
    half = mpq(1, 2)
    w = (c / b).reduce(M + 2)
    for step in range(max_steps + 1):
        res = c - b * w - a * (w * w.conj()) * (pm * half)
        if res.val() >= M:
            return w, step
        u, v = w.a, w.b
        du = -b - a * (pm * u)            # dF/du
        dv = -b * F.delta + a * (pm * eps * v)  # dF/dv
        # solve [du dv] [x; y] = -res as a 2x2 system over F
        a11, a21 = du.a, du.b
        a12, a22 = dv.a, dv.b
        det = a11 * a22 - a12 * a21
        r1, r2 = -res.a, -res.b
        x = (r1 * a22 - a12 * r2) / det
        y = (a11 * r2 - a21 * r1) / det
        w = F(u + x, v + y).reduce(M + 2)
    raise ArithmeticError("Newton iteration did not converge")


def decompose_compact(g: GroupElement, spec: LevelSpec, M: int | None = None,
                      minus_order: Sequence[int] | None = None,
                      plus_order: Sequence[int] | None = None) -> CompactDecomposition:
    """Factor g in K_{n,m} (m >= 1) as z * prod chi_{-e}(p^m) * prod chi_{e}(o) * k.

    Args:
        g: Element of K_{n,m}, exact.
        spec: Rank and level.
        M: Working precision (default m + 8).
        minus_order: 1-based order in which f-coordinates are cleared.
        plus_order: 1-based order in which e-coordinates are cleared.

    Raises:
        MembershipError: If g is not in K_{n,m}; the message names the entry.
    """
    n, m = spec.n, spec.m
    if m < 1:
        raise ValueError("the compact decomposition needs m >= 1")
    F = g.F
    M = m + 8 if M is None else M
    bad = check_K(g, n, m)
    if bad is not None:
        raise MembershipError(f"not in K_{{{n},{m}}}: entry {bad} violates the block shape")
    if not g.is_unitary():
        raise MembershipError("not unitary")
    N = 2 * n + 1
    pm = F.uniformizer(m)
    minus_order = list(range(1, n + 1)) if minus_order is None else list(minus_order)
    plus_order = list(range(1, n + 1)) if plus_order is None else list(plus_order)
    cur = g
    applied: list[GroupElement] = []
    minus_inv = []
    steps = []
    for l in minus_order:
        i = l - 1
        v = [row[n] for row in cur.rows]
        a_l, b_mid, cf = v[i], v[n], v[N - 1 - i]
        c_l = cf / pm
        w, st = hensel_solve(F, a_l, b_mid, c_l, m, M)
        steps.append(st)
        y = pm * w.conj()
        k = build_root_element(F, n, f"-e{l}", y)
        cur = k * cur
        minus_inv.append((f"-e{l}", -y, build_root_element(F, n, f"-e{l}", -y)))
    plus_inv = []
    for l in plus_order:
        i = l - 1
        v = [row[n] for row in cur.rows]
        y = (-(v[i] / v[n])).reduce(M + 2)
        k = build_root_element(F, n, f"e{l}", y)
        cur = k * cur
        plus_inv.append((f"e{l}", -y, build_root_element(F, n, f"e{l}", -y)))
    z = cur.rows[n][n]
    k_rem = (cur * z.inverse()).with_precision(M)
    # cur = P_t..P_1 M_s..M_1 g, so g = M_1^{-1}..M_s^{-1} P_1^{-1}..P_t^{-1} cur
    return CompactDecomposition(z, minus_inv, plus_inv, k_rem, M, steps)


# ---------------------------------------------------------------------------
# elementary divisors


def elementary_divisors(g: GroupElement | Sequence[Sequence[QuadElt]], M: int | None = None
                        ) -> list[int]:
    """Valuations of the elementary divisors over o_E, weakly decreasing.

    Args:
        g: Invertible matrix over E.
        M: Precision of the entries (default: that of g, else exact).

    Raises:
        IndeterminateError: If an entry is indistinguishable from zero at the
            working precision.
        ZeroDivisionError: For a singular matrix.
    """
    rows = g.rows if isinstance(g, GroupElement) else g
    if M is None and isinstance(g, GroupElement):
        M = g.M
    A = [list(r) for r in rows]
    n = len(A)
    out = []
    for c in range(n):
        best = None
        for i in range(c, n):
            for j in range(c, n):
                v = A[i][j].val()
                if best is None or v < best[0]:
                    best = (v, i, j)
        v, bi, bj = best
        if v == INF:
            raise ZeroDivisionError("singular matrix")
        if M is not None and v >= M:
            raise IndeterminateError("pivot valuation reaches the precision limit")
        A[c], A[bi] = A[bi], A[c]
        for row in A:
            row[c], row[bj] = row[bj], row[c]
        inv = A[c][c].inverse()
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
        for j in range(c + 1, n):
            if A[c][j]:
                f = A[c][j] * inv
                for i in range(c, n):
                    A[i][j] = A[i][j] - A[i][c] * f
        out.append(int(v))
    return sorted(out, reverse=True)


# ---------------------------------------------------------------------------
# double cosets


def lu_weyl(k: GroupElement) -> tuple[GroupElement, GroupElement, GroupElement]:
    """Factor k in K_{n,0} as nbar * b * w.

    nbar is lower unipotent in K_{n,0}, b upper triangular in K_{n,0} and w a
    Weyl representative. Row operations by negative root elements clear each
    column below a unit pivot taken in the current first row; the pivot column
    is moved into place by a Weyl element acting on the right.
    """
    F = k.F
    N = k.N
    n = N // 2
    cur = k
    left: list[GroupElement] = []
    right: list[GroupElement] = []
    for s in range(n):
        last = N - 1 - s
        row = cur.rows[s]
        cand = [j for j in range(s, n) if row[j].val() == 0]
        if cand:
            c = cand[0]
        else:
            rc = [j for j in range(n + 1, last + 1) if row[j].val() == 0]
            if not rc:
                raise MembershipError("no unit pivot; element is not in K_{n,0}")
            jr = max(rc)
            jl = N - 1 - jr
            w = build_weyl_rep(F, n, None, [jl + 1], 1)
            cur = cur * w
            right.append(w)
            c = jl
        if c != s:
            perm = list(range(1, n + 1))
            perm[s], perm[c] = perm[c], perm[s]
            w = build_weyl_rep(F, n, perm)
            cur = cur * w
            right.append(w)
        pv = cur.rows[s][s]

        def col():
            return [cur.rows[i][s] for i in range(N)]
        for j in range(s + 1, n):
            x = col()[j]
            if x:
                op = build_root_element(F, n, f"-e{s + 1}+e{j + 1}", -(x / pv))
                cur = op * cur
                left.append(op)
        for j in range(s + 1, n):
            x = col()[N - 1 - j]
            if x:
                op = build_root_element(F, n, f"-e{s + 1}-e{j + 1}", -(x / pv))
                cur = op * cur
                left.append(op)
        x = col()[n]
        if x:
            op = build_root_element(F, n, f"-e{s + 1}", -(x / pv))
            cur = op * cur
            left.append(op)
        x = col()[last]
        if x:
            t = -(x / (pv * F.delta))
            if not t.in_F():
                raise ArithmeticError("isotropy failure")
            op = build_root_element(F, n, f"-2e{s + 1}", t)
            cur = op * cur
            left.append(op)
    if not cur.is_upper_triangular():
        raise ArithmeticError("elimination did not reach B_n")
    nbar_inv = identity(F, N)
    for op in left:
        nbar_inv = op * nbar_inv
    wprod = identity(F, N)
    for op in right:
        wprod = wprod * op
    return nbar_inv.unitary_inverse(), cur, wprod.unitary_inverse()


@dataclass
class CosetReport:
    """Classifier output with the per-index exponents it was derived from."""

    d: int
    exponents: list
    ell: int
    e: int


def _classify_pbar(g: GroupElement, n: int, r: int, m: int, M: int | None) -> CosetReport:
    F = g.F
    e, ell = m % 2, m // 2
    if m <= 1:
        return CosetReport(0, [], ell, e)
    w = build_weyl_rep(F, n, None, range(1, n + 1), F.uniformizer(e))
    b, kp = iwasawa_decompose(w.unitary_inverse() * g, e)
    k = w * kp
    if e == 1:
        dec = decompose_compact(k, LevelSpec(n, 1), M=(M if M is not None else m + 8),
                                plus_order=list(range(n, 0, -1)))
        ys = {int(lab[1:]): y for lab, y, _ in dec.plus}
        exps = [ys[i].val() for i in range(1, r + 1)]
    else:
        _, bb, _ = lu_weyl(k)
        exps = [(bb.rows[i][n] / bb.rows[n][n]).val() for i in range(r)]
    d = min([ell] + [x for x in exps if x != INF])
    return CosetReport(int(d), exps, ell, e)


def coset_classify(g: GroupElement, n: int, r: int, spec: LevelSpec, side: str = "Pbar",
                   M: int | None = None) -> int:
    """Index d in 0..ell of the double coset of g in Pbar\\G_n/K0_{n,m} (or P\\G/K0).

    The representative of class d is chi_{e_1}(p^d) on the Pbar side and
    chi_{-e_1}(p^{e+d}) on the P side.
    """
    return coset_classify_report(g, n, r, spec, side, M).d


def coset_classify_report(g: GroupElement, n: int, r: int, spec: LevelSpec, side: str = "Pbar",
                          M: int | None = None) -> CosetReport:
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    m = spec.m
    if side == "P":
        F = g.F
        w = build_weyl_rep(F, n, None, range(1, r + 1), F.uniformizer(m % 2))
        g = w.unitary_inverse() * g
    elif side != "Pbar":
        raise ValueError("side must be 'P' or 'Pbar'")
    return _classify_pbar(g, n, r, m, M)


def saturate_columns(F: LocalField, C: list[list[QuadElt]]) -> list[list[QuadElt]]:
    """Basis of (column span of C) intersected with o_E^N, as columns.

    Columns are scaled and combined by elimination on the entry of globally
    least valuation, which keeps each step unimodular over o_E.
    """
    N = len(C)
    cols = [[C[i][j] for i in range(N)] for j in range(len(C[0]))]
    out = []
    used_rows: list[int] = []
    while cols:
        best = None
        for ci, c in enumerate(cols):
            for i in range(N):
                if i in used_rows:
                    continue
                v = c[i].val()
                if best is None or v < best[0]:
                    best = (v, ci, i)
        v, ci, i = best
        if v == INF:
            raise ZeroDivisionError("degenerate span")
        piv = cols.pop(ci)
        piv = [x / piv[i] for x in piv]
        cols = [[x - c[i] * y for x, y in zip(c, piv)] for c in cols]
        used_rows.append(i)
        out.append(piv)
    # primitive vectors: after echelon form with unit pivots the span over o_E
    # of these columns is the saturated lattice once entries are integral
    return [[col[i] for col in out] for i in range(N)]


def classify_by_invariant(g: GroupElement, n: int, r: int, spec: LevelSpec) -> int:
    """Double-coset index from a lattice invariant (independent cross-check).

    Let W = g^{-1} span(f_1..f_r) and L0 = (p^ell, o, p^{ell+e}), a lattice
    stable under K0_{n,m}. The middle coordinate of W cap L0 generates
    p^{d'} modulo p^m, and d = min(d', m) - ell - e.
    """
    F = g.F
    m, e, ell = spec.m, spec.e, spec.ell
    N = 2 * n + 1
    ginv = g.unitary_inverse()
    C = [[ginv.rows[i][N - 1 - j] for j in range(r)] for i in range(N)]
    scale = [F.uniformizer(-ell)] * n + [F.one] + [F.uniformizer(-(ell + e))] * n
    DC = [[scale[i] * C[i][j] for j in range(r)] for i in range(N)]
    B = saturate_columns(F, DC)
    mids = [B[n][j] / scale[n] for j in range(r)]
    dprime = min([m] + [x.val() for x in mids if x])
    return int(dprime) - ell - e


def levi_part_extract(h: GroupElement, n: int, r: int, side: str = "Pbar"
                      ) -> tuple[GroupElement, GroupElement]:
    """Levi component (a, g0) of h in Pbar_{n,r} (or P_{n,r}).

    Raises:
        MembershipError: If h does not have the block shape of the parabolic.
    """
    if not _in_parabolic(h, r, upper=(side == "P")):
        raise MembershipError("element is not in the parabolic subgroup")
    a = GroupElement(h.F, [row[:r] for row in h.rows[:r]], h.M)
    g0 = middle_block(h, r)
    return a, g0


def _sub(A, r0, r1, c0, c1):
    return [row[c0:c1] for row in A[r0:r1]]


def block_lu_pbar_n(x: GroupElement, r: int) -> tuple[GroupElement, GroupElement]:
    """Factor x = pbar * u with pbar in Pbar_{n,r} and u in the unipotent radical N_{n,r}.

    With u = [[I, X, Z], [0, I, Y], [0, 0, I]] in block form (sizes r, N-2r, r),
    X = x00^{-1} x01, Z = x00^{-1} x02 and Y = (x11 - x10 X)^{-1} (x12 - x10 Z).

    Raises:
        ZeroDivisionError: If x is outside the big cell Pbar * N.
    """
    F = x.F
    N = x.N
    a, b = r, N - r
    A = x.rows
    x00inv = mat_inv(F, _sub(A, 0, a, 0, a))
    X = mat_mul(x00inv, _sub(A, 0, a, a, b))
    Z = mat_mul(x00inv, _sub(A, 0, a, b, N))
    x10 = _sub(A, a, b, 0, a)
    p11 = mat_sub(_sub(A, a, b, a, b), mat_mul(x10, X))
    Y = mat_mul(mat_inv(F, p11), mat_sub(_sub(A, a, b, b, N), mat_mul(x10, Z)))
    u = identity_rows(F, N)
    for i in range(a):
        for j in range(a, b):
            u[i][j] = X[i][j - a]
        for j in range(b, N):
            u[i][j] = Z[i][j - b]
    for i in range(a, b):
        for j in range(b, N):
            u[i][j] = Y[i - a][j - b]
    U = GroupElement(F, u, x.M)
    return x * U.inverse(), U


def parabolic_big_cell(x: GroupElement, r: int, side: str = "Pbar"
                       ) -> tuple[GroupElement, GroupElement]:
    """Split x = p * u (side Pbar, u in N_{n,r}) or x = u * p (side P, u in Nbar_{n,r}).

    The P case is the transpose of the Pbar case.

    Returns:
        (p, u) with p in the requested parabolic.
    """
    if side == "Pbar":
        return block_lu_pbar_n(x, r)
    if side != "P":
        raise ValueError("side must be 'P' or 'Pbar'")
    pt, ut = block_lu_pbar_n(x.transpose(), r)
    return pt.transpose(), ut.transpose()


def levi_representative(F: LocalField, n: int, r: int, spec: LevelSpec, d: int,
                        side: str = "Pbar") -> GroupElement:
    """s = chi_{e_r}(p^d) on the Pbar side, chi_{-e_r}(p^{e+d}) on the P side."""
    if side == "Pbar":
        return build_root_element(F, n, f"e{r}", F.uniformizer(d))
    return build_root_element(F, n, f"-e{r}", F.uniformizer(spec.e + d))


def sample_levi_intersection(sampler: "Sampler", n: int, r: int, spec: LevelSpec, d: int,
                             side: str = "Pbar", max_tries: int = 200) -> GroupElement:
    """Random h in s K0_{n,m} s^{-1} cap Pbar_{n,r} (or P_{n,r}).

    A random x = s k s^{-1} is split along the big cell; the parabolic factor
    is accepted when the unipotent factor conjugates back into K0_{n,m}.

    Raises:
        RuntimeError: If no sample is accepted within ``max_tries``.
    """
    F = sampler.F
    s = levi_representative(F, n, r, spec, d, side)
    sinv = s.unitary_inverse()
    for _ in range(max_tries):
        x = s * sampler.k0_element(spec.m, n) * sinv
        try:
            h, u = parabolic_big_cell(x, r, side)
        except ZeroDivisionError:
            continue
        if group_membership(sinv * u * s, "K0", n, spec.m, check_unitary=False):
            return h
    raise RuntimeError("no sample accepted; increase max_tries")


def levi_membership(h: GroupElement, n: int, r: int, spec: LevelSpec, d: int,
                    side: str = "Pbar") -> tuple[bool, bool]:
    """Check a in Gamma'_{r,l-d} (Gamma on the P side) and g0 in K0_{n-r,e+2d}."""
    a, g0 = levi_part_extract(h, n, r, side)
    which = "GammaPrime" if side == "Pbar" else "Gamma"
    ok_a = group_membership(a, which, m=spec.ell - d)
    ok_g = n == r or group_membership(g0, "K0", n - r, spec.e + 2 * d)
    return ok_a, ok_g


def identity_factors(F: LocalField, n: int, k: int, d: int, dp: int, printed: bool = False
                     ) -> tuple[GroupElement, GroupElement]:
    """Both sides of the chi_{e_{k-1}} chi_{e_k} commutation identity.

    LHS = chi_{e_{k-1}}(p^{d'}) chi_{e_k}(p^d) and
    RHS = chi_{-e_{k-1}+e_k}(p^{d-d'}) chi_{e_{k-1}}(p^{d'}) chi_{-e_{k-1}+e_k}(-p^{d-d'})
    chi_{e_{k-1}+e_k}(c p^{d+d'}) with c = -1/2. ``printed=True`` uses c = +1/2.
    """
    if not 1 < k <= n:
        raise ValueError("need 1 < k <= n")
    pw = F.uniformizer
    c = mpq(1, 2) if printed else mpq(-1, 2)
    lhs = build_root_element(F, n, f"e{k - 1}", pw(dp)) * build_root_element(F, n, f"e{k}", pw(d))
    rhs = (build_root_element(F, n, f"-e{k - 1}+e{k}", pw(d - dp))
           * build_root_element(F, n, f"e{k - 1}", pw(dp))
           * build_root_element(F, n, f"-e{k - 1}+e{k}", -pw(d - dp))
           * build_root_element(F, n, f"e{k - 1}+e{k}", pw(d + dp) * c))
    return lhs, rhs


def identity_residual(F: LocalField, n: int, k: int, d: int, dp: int, printed: bool = False
                      ) -> list[tuple[int, int, QuadElt]]:
    """Nonzero entries of LHS - RHS for ``identity_factors``."""
    lhs, rhs = identity_factors(F, n, k, d, dp, printed)
    diff = mat_sub(lhs.rows, rhs.rows)
    return [(i, j, x) for i, row in enumerate(diff) for j, x in enumerate(row) if x]


# ---------------------------------------------------------------------------
# random generation


class Sampler:
    """Random exact elements built from generator words.

    Args:
        F: Field context.
        n: Rank of G_n.
        seed: RNG seed.
        M: Digits used for random integral parameters.
        word_length: Number of generators per word.
    """

    def __init__(self, F: LocalField, n: int, seed: int = 0, M: int = 6, word_length: int = 12):
        self.F = F
        self.n = n
        self.rng = random.Random(seed)
        self.M = M
        self.L = word_length

    def elt(self, val: int = 0) -> QuadElt:
        return self.F.random_integer(self.rng, self.M, val)

    def felt(self, val: int = 0) -> QuadElt:
        pM = self.F.p ** self.M
        return self.F(mpq(self.F.p) ** val * self.rng.randrange(pM))

    def unit(self) -> QuadElt:
        return self.F.random_unit(self.rng, self.M)

    def _rand_perm(self, n):
        p = list(range(1, n + 1))
        self.rng.shuffle(p)
        return p

    def r_generator(self, n: int, m: int) -> GroupElement:
        """Random generator of R_{n,m} viewed in G_n."""
        F, rng = self.F, self.rng
        kind = rng.randrange(6) if n >= 2 else rng.choice([2, 3, 4, 5])
        if kind == 0:
            i, j = sorted(rng.sample(range(1, n + 1), 2))
            return build_root_element(F, n, f"e{i}-e{j}", self.elt())
        if kind == 1:
            i, j = sorted(rng.sample(range(1, n + 1), 2))
            return build_root_element(F, n, f"-e{i}+e{j}", self.elt())
        if kind == 2 and n >= 2:
            i, j = sorted(rng.sample(range(1, n + 1), 2))
            sgn = rng.choice(["", "-"])
            if sgn:
                return build_root_element(F, n, f"-e{i}-e{j}", self.elt(m))
            return build_root_element(F, n, f"e{i}+e{j}", self.elt(-m))
        if kind in (2, 3):
            k = rng.randrange(1, n + 1)
            if rng.random() < 0.5:
                return build_root_element(F, n, f"2e{k}", self.felt(-m))
            return build_root_element(F, n, f"-2e{k}", self.felt(m))
        if kind == 4:
            return torus(F, [self.unit() for _ in range(n)])
        S = [i for i in range(1, n + 1) if rng.random() < 0.5]
        return build_weyl_rep(F, n, self._rand_perm(n), S, F.uniformizer(m))

    def k_element(self, m: int, n: int | None = None) -> GroupElement:
        """Random word in generators of K_{n,m}."""
        n = self.n if n is None else n
        F, rng = self.F, self.rng
        g = identity(F, 2 * n + 1)
        for _ in range(self.L):
            c = rng.randrange(4)
            if c == 0:
                k = rng.randrange(1, n + 1)
                h = build_root_element(F, n, f"-e{k}", self.elt(m))
            elif c == 1:
                k = rng.randrange(1, n + 1)
                h = build_root_element(F, n, f"e{k}", self.elt())
            elif c == 2 and m >= 1:
                w = 1 + self.elt(m)
                h = identity(F, 2 * n + 1) * (w / w.conj())
            else:
                h = self.r_generator(n, m)
            g = g * h
        return g

    def k0_element(self, m: int, n: int | None = None) -> GroupElement:
        n = self.n if n is None else n
        t = t_ell(self.F, n, m // 2)
        return t * self.k_element(m, n) * t.unitary_inverse()

    def r_element(self, r: int, m: int) -> GroupElement:
        """Random element of R_{r,m} as a 2r-size matrix."""
        g = identity(self.F, 2 * r + 1)
        for _ in range(self.L):
            g = g * self.r_generator(r, m)
        return restrict_h(g, r)

    def gl_element(self, r: int, lo: int = -1, hi: int = 1) -> GroupElement:
        """Random invertible r x r matrix with entries of valuation in [lo, hi]."""
        F = self.F
        while True:
            rows = [[self.elt(self.rng.randint(lo, hi)) for _ in range(r)] for _ in range(r)]
            a = GroupElement(F, rows)
            if mat_det(F, rows):
                return a

    def g_element(self, n: int | None = None, spread: int = 2) -> GroupElement:
        """Random element of G_n from root, torus and Weyl factors."""
        n = self.n if n is None else n
        F, rng = self.F, self.rng
        g = identity(F, 2 * n + 1)
        labels = [f"e{k}" for k in range(1, n + 1)] + [f"-e{k}" for k in range(1, n + 1)]
        labels += [f"e{i}-e{j}" for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        labels += [f"-e{i}+e{j}" for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        for _ in range(self.L):
            c = rng.randrange(6)
            if c < 4:
                lab = rng.choice(labels)
                h = build_root_element(F, n, lab, self.elt(rng.randint(-spread, spread)))
            elif c == 4:
                h = torus(F, [self.unit() * F.uniformizer(rng.randint(-spread, spread))
                              for _ in range(n)])
            else:
                S = [i for i in range(1, n + 1) if rng.random() < 0.5]
                h = build_weyl_rep(F, n, self._rand_perm(n), S, 1)
            g = g * h
        return g

    def pbar_element(self, n: int, r: int, spread: int = 2) -> GroupElement:
        """Random element of Pbar_{n,r}: Levi part times lower unipotent radical."""
        F, rng = self.F, self.rng
        a = self.gl_element(r, -spread, spread)
        g0 = self.g_element(n - r, spread) if n > r else identity(F, 1)
        p = hat(a, n) * embed_g(g0, n)
        labels = []
        for i in range(1, r + 1):
            labels.append(f"-e{i}")
            labels.append(f"-2e{i}")
            for j in range(r + 1, n + 1):
                labels.append(f"-e{i}+e{j}")
            for j in range(1, n + 1):
                if j != i:
                    labels.append((i, j))
        for _ in range(self.L // 2):
            lab = rng.choice(labels)
            v = rng.randint(-spread, spread)
            if isinstance(lab, tuple):
                i, j = sorted(lab)
                u = build_root_element(F, n, f"-e{i}-e{j}", self.elt(v))
            elif lab.startswith("-2e"):
                u = build_root_element(F, n, lab, self.felt(v))
            else:
                u = build_root_element(F, n, lab, self.elt(v))
            p = p * u
        return p
