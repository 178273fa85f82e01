"""Finitely presented Z[Z^r]-modules and their coinvariants over a sublattice.

For a module M = Z[Z^r]^s / (relations) and a finite-index sublattice P,
the coinvariants M / M(P - 1) are presented over Z by translating every
relation by every coset representative of Z^r / P and folding monomials
back onto the representatives.  Right exactness of coinvariants makes this
relation set complete.

File format::

    rank 1 gens 1
    2
    x0 - 2

Header ``rank r gens s`` and then one relation per line, written as ``s``
Laurent expressions separated by ``;``.  Blank lines and ``#`` comments
are skipped.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .groupring import LaurentElt, Sublattice, coset_table, l1_norm, parse
from .intlinalg import AbelianInvariants, IntMatrix, abelian_invariants


@dataclass(frozen=True)
class ModulePresentation:
    rank: int
    gens: int
    relations: tuple[tuple[LaurentElt, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(tuple(r) for r in self.relations))
        for k, rel in enumerate(self.relations):
            if len(rel) != self.gens:
                raise ValueError(f"relation {k} has {len(rel)} components, expected {self.gens}")
            for a in rel:
                if a.rank != self.rank:
                    raise ValueError(f"relation {k} has an entry of rank {a.rank}, module rank is {self.rank}")

    @classmethod
    def cyclic(cls, rank: int, *relations: LaurentElt) -> "ModulePresentation":
        """One generator, each relation a single ring element."""
        return cls(rank, 1, tuple((r,) for r in relations))

    def to_text(self) -> str:
        lines = [f"rank {self.rank} gens {self.gens}"]
        lines += ["; ".join(str(a) for a in rel) for rel in self.relations]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ModulePresentation":
        header = None
        relations = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if header is None:
                words = line.split()
                if len(words) != 4 or words[0] != "rank" or words[2] != "gens":
                    raise ValueError(f"line {lineno}: expected 'rank r gens s', got {line!r}")
                try:
                    header = (int(words[1]), int(words[3]))
                except ValueError:
                    raise ValueError(f"line {lineno}: non-integer rank or gens in {line!r}") from None
                continue
            r, s = header
            parts = line.split(";")
            if len(parts) != s:
                raise ValueError(f"line {lineno}: {len(parts)} components, expected {s}")
            try:
                relations.append(tuple(parse(p, r) for p in parts))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if header is None:
            raise ValueError("missing 'rank r gens s' header")
        return cls(header[0], header[1], tuple(relations))

    @classmethod
    def load(cls, path: str | Path) -> "ModulePresentation":
        return cls.from_text(Path(path).read_text())


@dataclass(frozen=True)
class PushdownResult:
    matrix: IntMatrix
    basis_labels: tuple[tuple[int, tuple[int, ...]], ...]
    m: int


def pushdown(Mp: ModulePresentation, P: Sublattice) -> PushdownResult:
    """Integer relation matrix of the coinvariants Mp / Mp(P - 1).

    Columns are generator-major, coset-minor; rows run over relations and,
    within a relation, over the coset representatives in order.
    """
    if Mp.rank != P.rank:
        raise ValueError(f"rank mismatch: module {Mp.rank}, lattice {P.rank}")
    T = coset_table(P)
    m = len(T)
    width = Mp.gens * m
    entries: list[int] = []
    for rel in Mp.relations:
        # residues of each monomial, once per relation
        folded = [[(e, c) for e, c in a.terms.items()] for a in rel]
        for g in T.representatives:
            row = [0] * width
            for j, terms in enumerate(folded):
                base = j * m
                for e, c in terms:
                    row[base + T.reduce(tuple(x + y for x, y in zip(e, g)))] += c
            entries.extend(row)
    labels = tuple((j, g) for j in range(Mp.gens) for g in T.representatives)
    matrix = IntMatrix(len(Mp.relations) * m, width, tuple(entries))
    return PushdownResult(matrix, labels, m)


def coinvariant_invariants(Mp: ModulePresentation, P: Sublattice) -> AbelianInvariants:
    res = pushdown(Mp, P)
    return abelian_invariants(res.matrix, Mp.gens * res.m)


def relation_norm(rel: Sequence[LaurentElt]) -> int:
    return sum(l1_norm(a) for a in rel)


def max_relation_norm(Mp: ModulePresentation) -> int:
    return max((relation_norm(rel) for rel in Mp.relations), default=0)
