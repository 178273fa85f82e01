"""Checkers for the torsion inequalities and growth-sequence analytics.

Every checker returns ``BoundReport`` values; a report whose ``holds`` is
false on an in-scope instance is a genuine counterexample.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .groupring import Sublattice, l1_norm, commutator_conjugation_weight
from .intlinalg import (
    IntMatrix,
    abelian_invariants,
    determinant,
    exact_log2,
    hermite_normal_form,
    smith_normal_form,
    torsion_upper_bound_l1,
    torsion_via_minor_gcd,
)
from .metabelian import (
    SplitMetabelianGroup,
    StandardSubgroup,
    effective_commutator_check,
    group_abelianization,
    subgroup_abelianization,
)
from .modules import max_relation_norm


class HypothesisViolation(ValueError):
    """The schedule does not satisfy [A : A n H_i] -> infinity."""


_RELATIONS = {
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    "==": lambda a, b: a == b,
}


@dataclass(frozen=True)
class BoundReport:
    context: str
    lhs: object
    rhs: object
    relation: str = "<="

    @property
    def holds(self) -> bool:
        return _RELATIONS[self.relation](self.lhs, self.rhs)

    @property
    def slack(self) -> float:
        if self.lhs == 0:
            return math.inf if self.rhs else 1.0
        try:
            return float(Fraction(self.rhs) / Fraction(self.lhs))
        except OverflowError:
            return math.inf

    def to_line(self) -> str:
        return ",".join([
            self.context,
            self.relation,
            format_value(self.lhs),
            format_value(self.rhs),
            "true" if self.holds else "false",
            format_value(self.slack),
        ])


REPORT_HEADER = "context,relation,lhs,rhs,holds,slack"


def format_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".15g")


@dataclass(frozen=True)
class GrowthRecord:
    step: int
    index: int
    a: int
    m: int
    torsion_size: int
    free_rank: int

    @property
    def log2_torsion(self) -> float:
        return exact_log2(self.torsion_size)

    @property
    def ratio(self) -> float:
        return self.log2_torsion * math.log(2) / self.index

    CSV_HEADER = "step,index,a,m,torsion,log2_torsion,ratio,free_rank"

    def to_csv_row(self) -> str:
        return ",".join([
            str(self.step), str(self.index), str(self.a), str(self.m),
            str(self.torsion_size), format_value(self.log2_torsion),
            format_value(self.ratio), str(self.free_rank),
        ])


# random lattice checks


def _random_matrix(rng: random.Random, rows: int, cols: int, bound: int) -> IntMatrix:
    return IntMatrix.from_rows(
        [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)], cols=cols
    )


def _matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return IntMatrix.from_rows(
        [[sum(a[i, k] * b[k, j] for k in range(a.cols)) for j in range(b.cols)]
         for i in range(a.rows)],
        cols=b.cols,
    )


def t_multiplicativity_reports(L1_coords: IntMatrix, L2_basis: IntMatrix, label: str) -> list[BoundReport]:
    """Reports for G = Z^n/L1, N = L2/L1, G/N = Z^n/L2.

    ``L2_basis`` has independent rows; ``L1_coords`` expresses generators of
    L1 in that basis, so N = Z^k / rowspan(L1_coords).
    """
    n, k = L2_basis.cols, L2_basis.rows
    G = abelian_invariants(_matmul(L1_coords, L2_basis), n)
    N = abelian_invariants(L1_coords, k)
    Q = abelian_invariants(L2_basis, n)
    tG, tN, tQ = G.torsion_size, N.torsion_size, Q.torsion_size
    out = [
        BoundReport(f"{label}:t(N)<=t(G)", tN, tG),
        BoundReport(f"{label}:t(G)<=t(N)t(G/N)", tG, tN * tQ),
    ]
    if tQ == 1:
        out.append(BoundReport(f"{label}:G/N torsion-free=>t(N)=t(G)", tN, tG, "=="))
    if N.free_rank == 0:
        out.append(BoundReport(f"{label}:N finite=>t(G)=|N|t(G/N)", tG, tN * tQ, "=="))
    return out


def check_t_multiplicativity(trials: int, seed: int = 0) -> list[BoundReport]:
    """Random nested lattices L1 <= L2 <= Z^n (n <= 4, entries <= 5)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    reports = []
    for trial in range(trials):
        n = rng.randint(1, 4)
        gens = _random_matrix(rng, rng.randint(1, n + 1), n, 5)
        basis = hermite_normal_form(gens)
        if basis.rows == 0:
            basis = IntMatrix.identity(n)
        coords = _random_matrix(rng, rng.randint(1, basis.rows + 1), basis.rows, 5)
        reports += t_multiplicativity_reports(coords, basis, f"multiplicativity[seed={seed},trial={trial}]")
    return reports


# finite modules


def _span(gens: Iterable[tuple[int, ...]], N: int, k: int) -> frozenset:
    """Additive subgroup of (Z/N)^k generated by ``gens``."""
    zero = (0,) * k
    seen = {zero}
    frontier = [zero]
    gens = [g for g in gens if any(g)]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % N for a, b in zip(v, g))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return frozenset(seen)


def _act(v, g, N):
    k = len(v)
    return tuple(sum(v[i] * g[i][j] for i in range(k)) % N for j in range(k))


def _submodule(gens, actions, N, k) -> tuple[frozenset, list]:
    """Smallest subgroup containing ``gens`` and closed under the actions,
    with an additive generating set for it."""
    gens = [tuple(g) for g in gens]
    current = _span(gens, N, k)
    while True:
        gens = list(dict.fromkeys(gens + [_act(v, g, N) for g in actions for v in gens]))
        bigger = _span(gens, N, k)
        if bigger == current:
            return current, gens
        current = bigger


def fin_lemma_report(N: int, k: int, actions, L_gens, label: str) -> BoundReport:
    """[M(G-1) : L(G-1)] <= [M : L]^d for M = (Z/N)^k, G generated by ``actions``.

    ``L_gens`` generates the submodule L additively, so L(G-1) is spanned by
    the l(g-1) for l in ``L_gens``.
    """
    d = len(actions)
    basis = [tuple(1 if j == i else 0 for j in range(k)) for i in range(k)]

    def minus_one(vs):
        return [tuple((a - b) % N for a, b in zip(_act(v, g, N), v)) for g in actions for v in vs]

    L = _span(L_gens, N, k)
    MG = _span(minus_one(basis), N, k)
    LG = _span(minus_one(L_gens), N, k)
    assert LG <= MG
    return BoundReport(label, len(MG) // len(LG), (N**k // len(L)) ** d)


def _random_invertible(rng, N, k):
    while True:
        g = [[rng.randrange(N) for _ in range(k)] for _ in range(k)]
        det = determinant(g) % N
        if math.gcd(det, N) == 1:
            return g


def _matmul_mod(a, b, N):
    k = len(a)
    return [[sum(a[i][l] * b[l][j] for l in range(k)) % N for j in range(k)] for i in range(k)]


def check_fin_lemma(trials: int, seed: int = 0) -> list[BoundReport]:
    """Random M = (Z/N)^k (N <= 8, k <= 3) with up to two commuting
    automorphisms and a random submodule L."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    reports = []
    for trial in range(trials):
        N = rng.randint(2, 8)
        k = rng.randint(1, 3)
        d = rng.randint(1, 2)
        g1 = _random_invertible(rng, N, k)
        actions = [g1]
        if d == 2:
            # a power of g1 commutes with it
            g2 = g1
            for _ in range(rng.randint(0, 3)):
                g2 = _matmul_mod(g2, g1, N)
            actions.append(g2)
        gens = [tuple(rng.randrange(N) for _ in range(k)) for _ in range(rng.randint(0, 2))]
        _, L_gens = _submodule(gens, actions, N, k)
        reports.append(fin_lemma_report(N, k, actions, L_gens, f"fin[seed={seed},trial={trial},N={N},k={k},d={d}]"))
    return reports


# torsion lemma


def torsion_lemma_reports(M: IntMatrix, label: str) -> list[BoundReport]:
    t_minor = torsion_via_minor_gcd(M)
    t_snf = math.prod(smith_normal_form(M).invariant_factors)
    return [
        BoundReport(f"{label}:minor-gcd=snf", t_minor, t_snf, "=="),
        BoundReport(f"{label}:t<=l1-bound", t_minor, torsion_upper_bound_l1(M)),
    ]


def check_torsion_lemma(trials: int, seed: int = 0, max_rows: int = 6, max_cols: int = 8,
                        bound: int = 9) -> list[BoundReport]:
    rng = random.Random(seed)
    reports = []
    for trial in range(trials):
        M = _random_matrix(rng, rng.randint(0, max_rows), rng.randint(1, max_cols), bound)
        reports += torsion_lemma_reports(M, f"torsion-lemma[seed={seed},trial={trial}]")
    return reports


# group-level bounds


def check_MA(G: SplitMetabelianGroup, H: StandardSubgroup) -> BoundReport:
    """t(H^ab) <= [G:H]^r t(G^ab) for H with HA = G, i.e. P = Z^r."""
    if H.P != Sublattice.full(G.r):
        raise ValueError("check_MA needs P = Z^r so that HA = G")
    lhs = subgroup_abelianization(G, H).torsion_size
    rhs = H.index ** G.r * group_abelianization(G).torsion_size
    return BoundReport(f"MA:{G.name}:{H.label}", lhs, rhs)


def prop_exp_bound(G: SplitMetabelianGroup, H: StandardSubgroup, n: int) -> list[BoundReport]:
    """The coinvariant bound t(G^ab) (n^2)^(d(d-1)/2) c^(n d(d-1)/2) and the
    packaged C^n with C = (t(G^ab) 3c)^(d^2/2), for H containing G'.

    c is the largest l1 norm of a relation of G'; with no relations the
    l1 bound pads with ones, so c is taken as at least 1.
    """
    if not H.contains_derived:
        raise ValueError(f"{H.label} does not contain G'")
    if H.index != n:
        raise ValueError(f"n = {n} but [G:H] = {H.index}")
    lhs = subgroup_abelianization(G, H).torsion_size
    tG = group_abelianization(G).torsion_size
    c = max(max_relation_norm(G.derived), 1)
    d = G.gen_count
    pairs = d * (d - 1) // 2
    rhs = tG * (n * n) ** pairs * c ** (n * pairs)
    base = tG * 3 * c
    ctx = f"exp:{G.name}:{H.label}:n={n}"
    reports = [BoundReport(f"{ctx}:intermediate", lhs, rhs)]
    # C^n = base^(n d^2 / 2); compare squares to stay exact when n d^2 is odd
    reports.append(BoundReport(f"{ctx}:packaged(squared)", lhs * lhs, base ** (n * d * d), "<"))
    return reports


def _record(args) -> GrowthRecord:
    G, H, step = args
    inv = subgroup_abelianization(G, H)
    return GrowthRecord(step, H.index, H.index_in_A, H.P.m, inv.torsion_size, inv.free_rank)


def growth_sequence(G: SplitMetabelianGroup, schedule: Sequence[StandardSubgroup],
                    steps: Sequence[int] | None = None, jobs: int = 1) -> list[GrowthRecord]:
    """One record per subgroup, in schedule order."""
    if not schedule:
        raise ValueError("schedule is empty")
    steps = list(steps) if steps is not None else list(range(1, len(schedule) + 1))
    work = [(G, H, s) for H, s in zip(schedule, steps)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_record, work))
    return [_record(w) for w in work]


def fit_exponential_base(records: Sequence[GrowthRecord]) -> float:
    """Smallest D with torsion <= D^index across the records."""
    if not records:
        raise ValueError("no records")
    return max(2.0 ** (r.log2_torsion / r.index) for r in records)


def _tail_split(n: int, tail_fraction: float) -> int:
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail fraction must lie in (0, 1], got {tail_fraction}")
    return min(n - 1, max(1, math.ceil(n * tail_fraction)))


def subexp_ratio_check(records: Sequence[GrowthRecord], tail_fraction: float = 0.3,
                       threshold: float = 0.05) -> BoundReport:
    """Tail surrogate for log t / [G:H] -> 0.

    Holds when every tail ratio is below ``threshold`` and the tail maximum
    is below the head maximum.
    """
    if len(records) < 2:
        raise ValueError("need at least two records")
    if any(b.index < a.index for a, b in zip(records, records[1:])):
        raise ValueError("records must be sorted by index")
    if any(b.a <= a.a for a, b in zip(records, records[1:])):
        raise HypothesisViolation("[A : A n H_i] is not strictly increasing along the schedule")
    k = _tail_split(len(records), tail_fraction)
    head, tail = records[:-k], records[-k:]
    tail_max = max(r.ratio for r in tail)
    head_max = max(r.ratio for r in head)
    return BoundReport(
        f"subexp:tail={k}/{len(records)},threshold={threshold}",
        tail_max, min(threshold, head_max), "<",
    )


def tail_ratio_stats(records: Sequence[GrowthRecord], tail_fraction: float = 0.3) -> dict:
    k = max(1, math.ceil(len(records) * tail_fraction))
    tail = [r.ratio for r in records[-k:]]
    return {"tail_count": k, "tail_max": max(tail), "tail_min": min(tail),
            "tail_mean": math.fsum(tail) / k, "last": tail[-1]}


def commutator_reports(max_n: int = 8, max_norm_n: int = 32, m: int = 2) -> list[BoundReport]:
    out = [
        BoundReport(f"commutator:C{m} wr Z^2:n={n}", effective_commutator_check(m, n), True, "==")
        for n in range(1, max_n + 1)
    ]
    out += [
        BoundReport(f"commutator:|w|=n^2:n={n}", l1_norm(commutator_conjugation_weight(n)), n * n, "==")
        for n in range(1, max_norm_n + 1)
    ]
    return out
