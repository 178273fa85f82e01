"""Exact integer matrices: Smith and Hermite forms, ranks, minor gcds, l1 norms.

Everything here works on Python ints, so no rounding ever happens.  The
Smith form is computed on a sparse copy of the matrix, which keeps the
large but very sparse relation matrices produced by coinvariant pushdowns
cheap to diagonalize.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

MINOR_ENUMERATION_LIMIT = 10**6


@dataclass(frozen=True)
class IntMatrix:
    """Dense row-major integer matrix.

    ``cols`` is stored explicitly so that matrices with zero rows still know
    their width.
    """

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError(f"negative shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries for a {self.rows}x{self.cols} "
                f"matrix, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols must be given for a matrix with no rows")
            cols = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != cols:
                raise ValueError(f"row {i} has length {len(r)}, expected {cols}")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.diagonal([1] * n)

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        entries = [0] * (n * n)
        for i, v in enumerate(values):
            entries[i * n + i] = int(v)
        return cls(n, n, tuple(entries))

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines += [" ".join(str(x) for x in self.row(i)) for i in range(self.rows)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IntMatrix":
        """Parse ``"rows cols"`` followed by row-major integers."""
        tokens = text.split()
        if len(tokens) < 2:
            raise ValueError("matrix text must start with 'rows cols'")
        try:
            values = [int(t) for t in tokens]
        except ValueError as exc:
            raise ValueError(f"non-integer token in matrix text: {exc}") from None
        rows, cols = values[0], values[1]
        body = values[2:]
        if len(body) != rows * cols:
            raise ValueError(
                f"matrix header says {rows}x{cols} but {len(body)} entries follow"
            )
        return cls(rows, cols, tuple(body))


@dataclass(frozen=True)
class SmithForm:
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


@dataclass(frozen=True)
class AbelianInvariants:
    """Invariants of Z^n / (row span): torsion factors and free rank."""

    torsion_factors: tuple[int, ...]
    free_rank: int

    @property
    def torsion_size(self) -> int:
        return math.prod(self.torsion_factors)

    @property
    def log2_torsion(self) -> float:
        return exact_log2(self.torsion_size)

    def __str__(self):
        parts = [f"Z/{d}" for d in self.torsion_factors]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) or "0"


def exact_log2(x: int) -> float:
    if x <= 0:
        raise ValueError(f"log2 of non-positive integer {x}")
    # math.log2 handles arbitrarily large ints without overflowing to float
    return math.log2(x)


def _sparse_rows(M: IntMatrix) -> list[dict[int, int]]:
    out = []
    for i in range(M.rows):
        r = {j: v for j, v in enumerate(M.row(i)) if v}
        if r:
            out.append(r)
    return out


def _nearest_quotient(a: int, p: int) -> int:
    # quotient giving a remainder of minimal absolute value
    q, r = divmod(a, p)
    if 2 * abs(r) > abs(p):
        q += 1 if (r > 0) == (p > 0) else -1
    return q


def _axpy(target: dict[int, int], q: int, source: dict[int, int]) -> None:
    """target -= q * source, dropping zeros."""
    for c, v in source.items():
        nv = target.get(c, 0) - q * v
        if nv:
            target[c] = nv
        else:
            target.pop(c, None)


def _diagonalize(rows: list[dict[int, int]]) -> list[int]:
    """Reduce sparse rows to a diagonal (not yet divisibility-chained).

    Each stage picks the nonzero entry of least absolute value (ties broken
    by lowest row, then lowest column) and clears its row and column.
    When a remainder survives, the pivot moves to the smaller entry inside
    the current row or column.
    """
    rows = [dict(r) for r in rows if r]
    diag = []
    while rows:
        best = None
        for i, r in enumerate(rows):
            for j, v in r.items():
                key = (abs(v), i, j)
                if best is None or key < best:
                    best = key
        _, i, j = best
        while True:
            prow = rows[i]
            p = prow[j]
            leftover = False
            for k, r in enumerate(rows):
                if k == i:
                    continue
                v = r.get(j)
                if v is None:
                    continue
                _axpy(r, _nearest_quotient(v, p), prow)
                if j in r:
                    leftover = True
            if leftover:
                i = min(
                    (k for k, r in enumerate(rows) if j in r),
                    key=lambda k: (abs(rows[k][j]), k),
                )
                continue
            # column j now holds only the pivot, so column ops touch row i alone
            for c in [c for c in prow if c != j]:
                nv = prow[c] - _nearest_quotient(prow[c], p) * p
                if nv:
                    prow[c] = nv
                else:
                    del prow[c]
            if len(prow) > 1:
                j = min((c for c in prow), key=lambda c: (abs(prow[c]), c))
                continue
            break
        diag.append(abs(p))
        rows.pop(i)
        rows = [r for r in rows if r]
    return diag


def _chain(diag: list[int]) -> tuple[int, ...]:
    d = sorted(diag)
    n = len(d)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = d[i], d[j]
            if b % a == 0:
                continue
            g = math.gcd(a, b)
            d[i], d[j] = g, a // g * b
    return tuple(d)


def smith_normal_form(M: IntMatrix) -> SmithForm:
    """Invariant factors d_1 | d_2 | ... | d_s of M (all positive)."""
    return SmithForm(_chain(_diagonalize(_sparse_rows(M))))


def abelian_invariants(relations: IntMatrix, ambient_rank: int) -> AbelianInvariants:
    """Invariants of Z^ambient_rank modulo the row span of ``relations``."""
    if relations.cols != ambient_rank:
        raise ValueError(
            f"relation matrix has {relations.cols} columns but ambient rank is {ambient_rank}"
        )
    snf = smith_normal_form(relations)
    return AbelianInvariants(
        torsion_factors=tuple(d for d in snf.invariant_factors if d > 1),
        free_rank=ambient_rank - snf.rank,
    )


def determinant(rows: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank(M: IntMatrix) -> int:
    """Rank over Q by fraction-free elimination."""
    a = M.to_rows()
    r = 0
    for c in range(M.cols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, len(a)):
            if a[i][c]:
                f, g = a[r][c], a[i][c]
                a[i] = [f * x - g * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


def torsion_via_minor_gcd(M: IntMatrix) -> int:
    """gcd of the nonzero r x r minors, r = rank(M).

    This equals the torsion order of Z^cols / (row span).  Falls back to
    the Smith form product when there are too many minors to enumerate.
    """
    r = rank(M)
    if r == 0:
        return 1
    if math.comb(M.rows, r) * math.comb(M.cols, r) > MINOR_ENUMERATION_LIMIT:
        return math.prod(smith_normal_form(M).invariant_factors)
    rows = M.to_rows()
    g = 0
    for rs in combinations(range(M.rows), r):
        sub = [rows[i] for i in rs]
        for cs in combinations(range(M.cols), r):
            det = determinant([[row[c] for c in cs] for row in sub])
            if det:
                g = math.gcd(g, det)
                if g == 1:
                    return 1
    return g


def l1_row_norms(M: IntMatrix) -> list[int]:
    return [sum(abs(x) for x in M.row(i)) for i in range(M.rows)]


def torsion_upper_bound_l1(M: IntMatrix) -> int:
    """Product of the ``cols`` largest l1 row norms (zeros and padding count as 1)."""
    norms = sorted((n or 1 for n in l1_row_norms(M)), reverse=True)[: M.cols]
    return math.prod(norms)


def hermite_normal_form(M: IntMatrix) -> IntMatrix:
    """Row-style Hermite form: upper echelon, positive pivots, entries above
    each pivot reduced into [0, pivot).  Zero rows are dropped."""
    a = [r for r in M.to_rows() if any(r)]
    top = 0
    pivots = []
    for c in range(M.cols):
        while True:
            live = [i for i in range(top, len(a)) if a[i][c]]
            if not live:
                break
            i = min(live, key=lambda k: (abs(a[k][c]), k))
            a[top], a[i] = a[i], a[top]
            p = a[top][c]
            done = True
            for k in range(top + 1, len(a)):
                if a[k][c]:
                    q = a[k][c] // p
                    a[k] = [x - q * y for x, y in zip(a[k], a[top])]
                    if a[k][c]:
                        done = False
            if done:
                break
        if top < len(a) and a[top][c]:
            if a[top][c] < 0:
                a[top] = [-x for x in a[top]]
            pivots.append((top, c))
            top += 1
    a = a[:top]
    for t, c in pivots:
        p = a[t][c]
        for k in range(t):
            q = a[k][c] // p
            if q:
                a[k] = [x - q * y for x, y in zip(a[k], a[t])]
    return IntMatrix.from_rows(a, cols=M.cols)
