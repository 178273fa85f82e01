"""Split metabelian groups A x| Z^r, standard subgroups B x| P, and their
abelianizations.

A standard subgroup H = B x| P is split, so H' = B(P - 1) and

    H^ab = B / B(P - 1)  (+)  P,

with P free abelian.  Its torsion is therefore the torsion of the
coinvariants of B over P, which is what ``subgroup_abelianization`` computes.

The effective lamplighter model at the bottom multiplies actual group
elements of C_m wr Z^r and serves as an oracle for the module-level
computations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .groupring import (
    LaurentElt,
    Sublattice,
    commutator_conjugation_weight,
    parse,
)
from .intlinalg import AbelianInvariants
from .modules import ModulePresentation, coinvariant_invariants


@dataclass(frozen=True)
class SplitMetabelianGroup:
    """G = A x| Z^r with A given as a Z[Z^r]-module.

    ``derived`` presents G' as a module; for the built-in families it is
    supplied by the constructor.  ``modulus`` is set for lamplighter groups.
    """

    name: str
    r: int
    A: ModulePresentation
    derived: ModulePresentation
    modulus: int | None = None

    def __post_init__(self):
        if self.A.rank != self.r or self.derived.rank != self.r:
            raise ValueError(
                f"module ranks {self.A.rank}, {self.derived.rank} do not match top rank {self.r}"
            )

    @property
    def gen_count(self) -> int:
        # module generators plus one per top-group coordinate
        return self.A.gens + self.r


@dataclass(frozen=True)
class StandardSubgroup:
    B: ModulePresentation
    P: Sublattice
    index_in_A: int = 1
    contains_derived: bool = True
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.index_in_A < 1:
            raise ValueError(f"[A:B] must be >= 1, got {self.index_in_A}")

    @property
    def index(self) -> int:
        return self.index_in_A * self.P.m


def augmentation_ideal(r: int, modulus: int | None = None) -> ModulePresentation:
    """Presentation of (x_1 - 1, ..., x_r - 1) over Z[Z^r], or over F_m[Z^r]
    when ``modulus`` is given.

    Generators e_i map to x_i - 1.  The Koszul relations
    (x_j - 1) e_i - (x_i - 1) e_j are complete because x_1 - 1, ..., x_r - 1
    is a regular sequence.
    """
    one = LaurentElt.one(r)
    zero = LaurentElt.zero(r)
    rels = []
    if modulus is not None:
        for i in range(r):
            rels.append(tuple(one * modulus if k == i else zero for k in range(r)))
    for i in range(r):
        for j in range(i + 1, r):
            rel = [zero] * r
            rel[i] = LaurentElt.variable(j, r) - one
            rel[j] = one - LaurentElt.variable(i, r)
            rels.append(tuple(rel))
    return ModulePresentation(r, r, tuple(rels))


def family_lamplighter(m: int, r: int = 1) -> SplitMetabelianGroup:
    """C_m wr Z^r."""
    if m < 2:
        raise ValueError(f"lamplighter needs m >= 2, got {m}")
    if r < 1:
        raise ValueError(f"lamplighter needs r >= 1, got {r}")
    A = ModulePresentation.cyclic(r, LaurentElt.one(r) * m)
    # for r = 1 the ideal (t - 1) is principal and F_m[t^{+-1}] is a domain
    derived = A if r == 1 else augmentation_ideal(r, modulus=m)
    return SplitMetabelianGroup(f"C{m} wr Z^{r}", r, A, derived, modulus=m)


def family_bs_module(k: int) -> SplitMetabelianGroup:
    """BS(1, k) = Z[1/k] x| Z, with t acting as multiplication by k."""
    if k < 2:
        raise ValueError(f"BS(1,k) family needs k >= 2, got {k}")
    t = LaurentElt.variable(0, 1)
    A = ModulePresentation.cyclic(1, t - LaurentElt.one(1) * k)
    # t - 1 acts injectively on Z[1/k], so G' = A(t - 1) is isomorphic to A
    return SplitMetabelianGroup(f"BS(1,{k})", 1, A, A)


def family_free_wreath(r: int = 1) -> SplitMetabelianGroup:
    """Z wr Z^r."""
    if r < 1:
        raise ValueError(f"free wreath needs r >= 1, got {r}")
    A = ModulePresentation(r, 1, ())
    derived = A if r == 1 else augmentation_ideal(r)
    return SplitMetabelianGroup(f"Z wr Z^{r}", r, A, derived)


def subgroup_from_lattice(G: SplitMetabelianGroup, P: Sublattice) -> StandardSubgroup:
    """H = A x| P, the preimage of P under the projection to the top group."""
    if P.rank != G.r:
        raise ValueError(f"lattice rank {P.rank} does not match top rank {G.r}")
    return StandardSubgroup(G.A, P, 1, True, label=f"A x| P(index {P.m})")


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, int(n**0.5) + 1))


def _extremes(f: LaurentElt) -> tuple[int, int]:
    ks = [e[0] for e in f.terms]
    return min(ks), max(ks)


def subgroup_from_ideal(G: SplitMetabelianGroup, f, P: Sublattice) -> StandardSubgroup:
    """H = fA x| P in C_m wr Z with m prime.

    fA is again free of rank one over F_m[t^{+-1}], and [A : fA] = m^span(f).
    H contains G' = (t - 1)A exactly when f divides t - 1 modulo m.
    """
    m = G.modulus
    if m is None or G.r != 1:
        raise ValueError(f"ideal subgroups need a lamplighter group C_m wr Z, got {G.name}")
    if not _is_prime(m):
        raise ValueError(f"ideal subgroups need prime m, got {m}")
    if isinstance(f, str):
        f = parse(f, 1)
    if f.rank != 1:
        raise ValueError("ideal generator must be univariate")
    if P.rank != 1:
        raise ValueError(f"lattice rank {P.rank} does not match top rank 1")
    if f.is_zero():
        raise ValueError("ideal generator is zero")
    lo, hi = _extremes(f)
    if f.terms[(lo,)] % m == 0 or f.terms[(hi,)] % m == 0:
        raise ValueError(f"extreme coefficients of {f} vanish mod {m}")
    span = hi - lo
    if span == 0:
        contains = True
    elif span == 1:
        # f ~ unit * (t - 1) iff its two coefficients are negatives mod m
        contains = (f.terms[(lo,)] + f.terms[(hi,)]) % m == 0
    else:
        contains = False
    return StandardSubgroup(
        G.A, P, m**span, contains, label=f"({f})A x| P(index {P.m})"
    )


def subgroup_abelianization(G: SplitMetabelianGroup, H: StandardSubgroup) -> AbelianInvariants:
    if H.B.rank != G.r or H.P.rank != G.r:
        raise ValueError(f"subgroup data has rank {H.B.rank}/{H.P.rank}, group top rank is {G.r}")
    inv = coinvariant_invariants(H.B, H.P)
    return AbelianInvariants(inv.torsion_factors, inv.free_rank + G.r)


def group_abelianization(G: SplitMetabelianGroup) -> AbelianInvariants:
    return subgroup_abelianization(G, subgroup_from_lattice(G, Sublattice.full(G.r)))


def subgroup_index(G: SplitMetabelianGroup, H: StandardSubgroup) -> int:
    return H.index


# effective model of C_m wr Z^r


@dataclass(frozen=True)
class EffectiveElement:
    """(lamp configuration, shift) in C_m wr Z^r.

    Multiplication is (f, v)(f', v') = (f + f'(. - v), v + v'), so
    conjugating a pure lamp element by (f, v) translates it by -v.
    """

    modulus: int
    lamp: tuple[tuple[tuple[int, ...], int], ...]
    shift: tuple[int, ...]

    @classmethod
    def make(cls, modulus: int, lamp: dict, shift) -> "EffectiveElement":
        clean = {tuple(p): v % modulus for p, v in lamp.items() if v % modulus}
        return cls(modulus, tuple(sorted(clean.items())), tuple(shift))

    @classmethod
    def identity(cls, modulus: int, r: int) -> "EffectiveElement":
        return cls(modulus, (), (0,) * r)

    def lamps(self) -> dict:
        return dict(self.lamp)

    def __mul__(self, other: "EffectiveElement") -> "EffectiveElement":
        out = self.lamps()
        for p, v in other.lamp:
            q = tuple(a + b for a, b in zip(p, self.shift))
            out[q] = out.get(q, 0) + v
        return EffectiveElement.make(
            self.modulus, out, tuple(a + b for a, b in zip(self.shift, other.shift))
        )

    def inverse(self) -> "EffectiveElement":
        back = tuple(-a for a in self.shift)
        out = {tuple(a + b for a, b in zip(p, back)): -v for p, v in self.lamp}
        return EffectiveElement.make(self.modulus, out, back)

    def __pow__(self, n: int) -> "EffectiveElement":
        base = self if n >= 0 else self.inverse()
        out = EffectiveElement.identity(self.modulus, len(self.shift))
        for _ in range(abs(n)):
            out = out * base
        return out


def commutator(a: EffectiveElement, b: EffectiveElement) -> EffectiveElement:
    """[a, b] = a^-1 b^-1 a b."""
    return a.inverse() * b.inverse() * a * b


def act_on_lamp(c: EffectiveElement, w: LaurentElt, shifts) -> EffectiveElement:
    """c^w for a pure lamp element c, where the monomial with exponent k acts
    as conjugation by prod_i g_i^(k_i), g_i having shift ``shifts[i]``."""
    if any(c.shift):
        raise ValueError("act_on_lamp needs an element of the base group")
    out: dict = {}
    for e, coeff in w.terms.items():
        move = [0] * len(c.shift)
        for k, s in zip(e, shifts):
            for i, x in enumerate(s):
                move[i] -= k * x
        for p, v in c.lamp:
            q = tuple(a + b for a, b in zip(p, move))
            out[q] = out.get(q, 0) + coeff * v
    return EffectiveElement.make(c.modulus, out, c.shift)


def effective_commutator_check(m: int, n: int, g: EffectiveElement | None = None,
                               h: EffectiveElement | None = None) -> bool:
    """Compare [g^n, h^n] computed by multiplication in C_m wr Z^2 with
    [g, h]^w, w = sum_{k,l<n} x^k y^l, where x, y act by conjugation by g, h."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if g is None:
        g = EffectiveElement.make(m, {(0, 0): 1}, (1, 0))
    if h is None:
        h = EffectiveElement.make(m, {(0, 0): 1, (1, 1): 1}, (0, 1))
    lhs = commutator(g**n, h**n)
    rhs = act_on_lamp(commutator(g, h), commutator_conjugation_weight(n), (g.shift, h.shift))
    return lhs == rhs


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    a = [[x % p for x in r] for r in rows]
    rank = 0
    cols = len(a[0]) if a else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][c], -1, p)
        a[rank] = [x * inv % p for x in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def effective_coinvariant_order(m: int, n: int, window: int | None = None) -> int:
    """|A / (t^n - 1)A| for C_m wr Z (m prime), by linear algebra on lamps.

    Lamp positions are taken from a window [-W, W); lamps p and p + n are
    identified.  The quotient dimension is the window size minus the rank
    of the identifications.
    """
    if not _is_prime(m):
        raise ValueError(f"modulus must be prime, got {m}")
    W = window if window is not None else 2 * n
    positions = list(range(-W, W))
    col = {p: i for i, p in enumerate(positions)}
    rows = []
    for p in positions:
        if p + n in col:
            row = [0] * len(positions)
            row[col[p]] += 1
            row[col[p + n]] -= 1
            rows.append(row)
    return m ** (len(positions) - _rank_mod_p(rows, m))


def _poly_mod(coeffs: list[int], f: list[int], p: int) -> list[int]:
    """Remainder of a polynomial (ascending coefficients) modulo monic-able f."""
    r = [c % p for c in coeffs]
    d = len(f) - 1
    inv = pow(f[-1], -1, p)
    for k in range(len(r) - 1, d - 1, -1):
        q = r[k] * inv % p
        if q:
            for i in range(d + 1):
                r[k - d + i] = (r[k - d + i] - q * f[i]) % p
    return (r + [0] * d)[:d]


def brute_force_index_in_A(G: SplitMetabelianGroup, f) -> int:
    """[A : fA] for C_m wr Z by reducing monomials modulo f over F_m.

    The residues of t^k for k in a window around 0 (negative powers via the
    inverse of t, which exists since f(0) != 0) span A/fA; the index is
    m^dimension of that span.
    """
    m = G.modulus
    if m is None or G.r != 1 or not _is_prime(m) or m > 5:
        raise ValueError("brute-force index needs C_m wr Z with m prime and m <= 5")
    if isinstance(f, str):
        f = parse(f, 1)
    lo, hi = _extremes(f)
    deg = hi - lo
    if deg > 12:
        raise ValueError(f"brute-force index supports deg f <= 12, got {deg}")
    coeffs = [f.terms.get((lo + i,), 0) % m for i in range(deg + 1)]
    if coeffs[0] == 0 or coeffs[-1] == 0:
        raise ValueError(f"extreme coefficients of {f} vanish mod {m}")
    if deg == 0:
        return 1
    residues = []
    for k in range(0, 2 * deg + 2):
        residues.append(_poly_mod([0] * k + [1], coeffs, m))
    # t^-1 = -(f - f_0)/(f_0 t) mod f
    inv0 = pow(coeffs[0], -1, m)
    t_inv = [(-c * inv0) % m for c in coeffs[1:]]
    cur = [1] + [0] * (deg - 1)
    for _ in range(deg + 1):
        nxt = [0] * (2 * deg)
        for i, a in enumerate(cur):
            for j, b in enumerate(t_inv):
                nxt[i + j] += a * b
        cur = _poly_mod(nxt, coeffs, m)
        residues.append(cur)
    return m ** _rank_mod_p(residues, m)


def all_ideal_generators(m: int, max_degree: int):
    """Every polynomial over F_m of degree <= max_degree with nonzero
    constant and leading coefficient, as a LaurentElt with coefficients in
    [0, m)."""
    for deg in range(max_degree + 1):
        for lead in range(1, m):
            for const in range(1, m) if deg else [lead]:
                for middle in product(range(m), repeat=max(deg - 1, 0)):
                    coeffs = [const, *middle, lead] if deg else [lead]
                    yield LaurentElt(1, {(i,): c for i, c in enumerate(coeffs)})
