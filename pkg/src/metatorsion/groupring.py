"""The integral group ring Z[Z^r] as Laurent polynomials, plus sublattices of
Z^r with canonical coset representatives.

Text syntax for elements: terms such as ``3*x0^-2*x1`` joined by ``+`` and
``-``.  Variables are ``x0 .. x{r-1}``; the aliases ``t``/``x``, ``y``,
``z`` stand for ``x0``, ``x1``, ``x2``.  ``str()`` always prints the
``x<i>`` form with terms in lexicographic exponent order, and ``parse``
reads it back exactly.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

from .intlinalg import IntMatrix, determinant, hermite_normal_form

Exponent = tuple[int, ...]

EXP_MIN, EXP_MAX = -(2**63), 2**63 - 1
ALIASES = {"t": 0, "x": 0, "y": 1, "z": 2}


def _check_exponent(e: Exponent) -> None:
    for k in e:
        if not EXP_MIN <= k <= EXP_MAX:
            raise OverflowError(f"exponent {k} does not fit in a signed 64-bit integer")


class LaurentElt:
    """Element of Z[Z^r]; immutable, with no zero coefficients stored."""

    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: Mapping[Exponent, int] | None = None):
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != rank:
                raise ValueError(f"exponent {e} has length {len(e)}, ring rank is {rank}")
            if c:
                _check_exponent(e)
                clean[e] = clean.get(e, 0) + int(c)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c})

    def __setattr__(self, name, value):
        raise AttributeError("LaurentElt is immutable")

    def __reduce__(self):
        return (LaurentElt, (self.rank, self.terms))

    @classmethod
    def zero(cls, rank: int) -> "LaurentElt":
        return cls(rank)

    @classmethod
    def one(cls, rank: int) -> "LaurentElt":
        return cls(rank, {(0,) * rank: 1})

    @classmethod
    def monomial(cls, exponent: Iterable[int], coeff: int = 1) -> "LaurentElt":
        e = tuple(exponent)
        return cls(len(e), {e: coeff})

    @classmethod
    def variable(cls, axis: int, rank: int) -> "LaurentElt":
        e = [0] * rank
        e[axis] = 1
        return cls.monomial(e)

    def is_zero(self) -> bool:
        return not self.terms

    def _same_rank(self, other: "LaurentElt") -> None:
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __eq__(self, other):
        if isinstance(other, int):
            return self == LaurentElt(self.rank, {(0,) * self.rank: other})
        if not isinstance(other, LaurentElt):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        return hash((self.rank, frozenset(self.terms.items())))

    def __add__(self, other: "LaurentElt") -> "LaurentElt":
        self._same_rank(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentElt(self.rank, out)

    def __neg__(self) -> "LaurentElt":
        return LaurentElt(self.rank, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentElt") -> "LaurentElt":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentElt(self.rank, {e: c * other for e, c in self.terms.items()})
        return multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentElt":
        if n < 0:
            raise ValueError("negative powers are only defined for monomials; use monomial()")
        out = LaurentElt.one(self.rank)
        for _ in range(n):
            out = out * self
        return out

    def shift(self, exponent: Exponent) -> "LaurentElt":
        """Multiply by the monomial with the given exponent."""
        return LaurentElt(
            self.rank,
            {tuple(a + b for a, b in zip(e, exponent)): c for e, c in self.terms.items()},
        )

    def degree_span(self, axis: int = 0) -> int:
        if not self.terms:
            raise ValueError("degree span of zero")
        ks = [e[axis] for e in self.terms]
        return max(ks) - min(ks)

    def __repr__(self):
        return f"LaurentElt({self.rank}, {str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for e in sorted(self.terms):
            c = self.terms[e]
            factors = []
            for i, k in enumerate(e):
                if k == 1:
                    factors.append(f"x{i}")
                elif k:
                    factors.append(f"x{i}^{k}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if not out:
                out.append(f"-{body}" if c < 0 else body)
            else:
                out.append(f" {'-' if c < 0 else '+'} {body}")
        return "".join(out)


def multiply(a: LaurentElt, b: LaurentElt) -> LaurentElt:
    a._same_rank(b)
    out: dict[Exponent, int] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return LaurentElt(a.rank, out)


def l1_norm(a: LaurentElt) -> int:
    return sum(abs(c) for c in a.terms.values())


def nu(n: int, axis: int, r: int) -> LaurentElt:
    """The geometric sum 1 + x + ... + x^(n-1) in the variable ``x_axis``."""
    if n < 1:
        raise ValueError(f"nu needs n >= 1, got {n}")
    if not 0 <= axis < r:
        raise ValueError(f"axis {axis} out of range for rank {r}")
    terms = {}
    for k in range(n):
        e = [0] * r
        e[axis] = k
        terms[tuple(e)] = 1
    return LaurentElt(r, terms)


def commutator_conjugation_weight(n: int) -> LaurentElt:
    """w with [g^n, h^n] = [g, h]^w in a metabelian group, as an element of Z[Z^2]."""
    return nu(n, 0, 2) * nu(n, 1, 2)


def _split_terms(text: str) -> list[tuple[int, str]]:
    """Split on '+'/'-' except where the sign belongs to an exponent."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty Laurent expression")
    out = []
    sign, begin = 1, 0
    if s[0] in "+-":
        sign, begin = (-1 if s[0] == "-" else 1), 1
    for i in range(begin, len(s) + 1):
        if i == len(s) or (s[i] in "+-" and s[i - 1] != "^"):
            term = s[begin:i]
            if not term:
                raise ValueError(f"missing term before position {i} in {text!r}")
            out.append((sign, term))
            if i < len(s):
                sign, begin = (-1 if s[i] == "-" else 1), i + 1
    return out


_VAR = re.compile(r"^(x\d+|[txyz])(?:\^(-?\d+))?$")


def parse(text: str, rank: int) -> LaurentElt:
    """Parse the textual Laurent syntax into an element of Z[Z^rank]."""
    total: dict[Exponent, int] = {}
    for sign, term in _split_terms(text):
        coeff = sign
        e = [0] * rank
        for factor in term.split("*"):
            if not factor:
                raise ValueError(f"empty factor in term {term!r}")
            if factor.isdigit():
                coeff *= int(factor)
                continue
            m = _VAR.match(factor)
            if not m:
                raise ValueError(f"cannot parse factor {factor!r}")
            name, power = m.group(1), m.group(2)
            axis = int(name[1:]) if name.startswith("x") and len(name) > 1 else ALIASES[name]
            if axis >= rank:
                raise ValueError(f"variable {name!r} needs rank > {axis}, ring rank is {rank}")
            e[axis] += int(power) if power is not None else 1
        key = tuple(e)
        total[key] = total.get(key, 0) + coeff
    return LaurentElt(rank, total)


class Sublattice:
    """A full-rank sublattice P of Z^r; the columns of ``basis`` generate it."""

    def __init__(self, basis: IntMatrix):
        if basis.rows != basis.cols:
            raise ValueError(f"lattice basis must be square, got {basis.rows}x{basis.cols}")
        det = determinant(basis.to_rows())
        if det == 0:
            raise ValueError("lattice basis is singular")
        self.rank = basis.rows
        self.basis = basis
        self.index = abs(det)
        # column Hermite form: lower triangular, columns generate P
        self.hnf = hermite_normal_form(basis.transpose()).transpose()

    @classmethod
    def scaled(cls, n: int, r: int) -> "Sublattice":
        """n Z^r."""
        return cls(IntMatrix.diagonal([n] * r))

    @classmethod
    def full(cls, r: int) -> "Sublattice":
        return cls(IntMatrix.identity(r))

    @property
    def m(self) -> int:
        return self.index

    def contains(self, v: Exponent) -> bool:
        return not any(coset_table(self).residue(v))

    def __eq__(self, other):
        return isinstance(other, Sublattice) and self.hnf == other.hnf

    def __hash__(self):
        return hash(self.hnf)

    def __repr__(self):
        return f"Sublattice(index={self.index}, hnf={self.hnf.to_rows()})"


@dataclass(frozen=True)
class CosetTable:
    """Canonical representatives of Z^r / P.

    A representative has coordinates 0 <= v_i < h_ii for the diagonal of the
    column Hermite form; representatives are listed lexicographically.
    """

    lattice: Sublattice
    diag: tuple[int, ...]
    columns: tuple[tuple[int, ...], ...]
    representatives: tuple[Exponent, ...] = field(repr=False)

    def residue(self, v: Exponent) -> Exponent:
        v = list(v)
        for i, (h, col) in enumerate(zip(self.diag, self.columns)):
            q = v[i] // h
            if q:
                for k in range(i, len(v)):
                    v[k] -= q * col[k]
        return tuple(v)

    def reduce(self, v: Exponent) -> int:
        """Index of the representative congruent to v."""
        idx = 0
        for d, x in zip(self.diag, self.residue(v)):
            idx = idx * d + x
        return idx

    def __len__(self):
        return len(self.representatives)


def coset_table(P: Sublattice) -> CosetTable:
    cache = getattr(P, "_table", None)
    if cache is not None:
        return cache
    r = P.rank
    diag = tuple(P.hnf[i, i] for i in range(r))
    columns = tuple(tuple(P.hnf[k, i] for k in range(r)) for i in range(r))
    reps = tuple(product(*(range(d) for d in diag)))
    assert len(reps) == P.index == math.prod(diag)
    table = CosetTable(P, diag, columns, reps)
    P._table = table
    return table


def reduce_mod_lattice(a: LaurentElt, T: CosetTable) -> LaurentElt:
    """Image of a in Z[Z^r / P], written on the canonical representatives."""
    if a.rank != T.lattice.rank:
        raise ValueError(f"rank mismatch: element {a.rank}, lattice {T.lattice.rank}")
    out: dict[Exponent, int] = {}
    for e, c in a.terms.items():
        rep = T.residue(e)
        out[rep] = out.get(rep, 0) + c
    return LaurentElt(a.rank, out)
