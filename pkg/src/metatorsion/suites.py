"""Named verification suites driven by ``metatorsion verify``."""
from __future__ import annotations

from .bounds import (
    BoundReport,
    check_fin_lemma,
    check_MA,
    check_t_multiplicativity,
    check_torsion_lemma,
    commutator_reports,
    fit_exponential_base,
    growth_sequence,
    prop_exp_bound,
    subexp_ratio_check,
)
from .groupring import Sublattice
from .metabelian import (
    all_ideal_generators,
    family_bs_module,
    family_free_wreath,
    family_lamplighter,
    subgroup_abelianization,
    subgroup_from_ideal,
    subgroup_from_lattice,
)


def lamplighter_schedule(G, ns):
    return [subgroup_from_lattice(G, Sublattice.scaled(n, G.r)) for n in ns]


def ideal_schedule(G, ns, template="t^{n}+1"):
    """B_i = f_i A with deg f_i = i and P_i = iZ."""
    return [subgroup_from_ideal(G, template.replace("{n}", str(n)), Sublattice.scaled(n, 1)) for n in ns]


def multiplicativity_suite(seed: int) -> list[BoundReport]:
    return check_t_multiplicativity(500, seed)


def fin_suite(seed: int) -> list[BoundReport]:
    return check_fin_lemma(500, seed)


def torsion_lemma_suite(seed: int) -> list[BoundReport]:
    return check_torsion_lemma(1000, seed)


def ma_suite(seed: int, max_degree: int = 6) -> list[BoundReport]:
    out = []
    for m in (2, 3):
        G = family_lamplighter(m, 1)
        for f in all_ideal_generators(m, max_degree):
            out.append(check_MA(G, subgroup_from_ideal(G, f, Sublattice.full(1))))
    return out


def exp_suite(seed: int, max_n: int = 20) -> list[BoundReport]:
    out = []
    for G in (family_lamplighter(2), family_lamplighter(3), family_bs_module(2), family_free_wreath(1)):
        for H in lamplighter_schedule(G, range(1, max_n + 1)):
            out += prop_exp_bound(G, H, H.index)
    return out


def growth_suite(seed: int) -> list[BoundReport]:
    out = []
    G = family_lamplighter(2)
    recs = growth_sequence(G, lamplighter_schedule(G, range(1, 41)), range(1, 41))
    out += [BoundReport(f"growth:C2 wr Z:n={r.step}:t=2^n", r.torsion_size, 2**r.step, "==") for r in recs]
    out.append(BoundReport("growth:C2 wr Z:D_hat=2", fit_exponential_base(recs), 2.0, "=="))
    for m in (3, 5):
        Gm = family_lamplighter(m)
        for H, n in zip(lamplighter_schedule(Gm, range(1, 21)), range(1, 21)):
            t = subgroup_abelianization(Gm, H).torsion_size
            out.append(BoundReport(f"growth:C{m} wr Z:n={n}:t=m^n", t, m**n, "=="))
    B = family_bs_module(2)
    for H, n in zip(lamplighter_schedule(B, range(1, 31)), range(1, 31)):
        t = subgroup_abelianization(B, H).torsion_size
        out.append(BoundReport(f"growth:BS(1,2):n={n}:t=2^n-1", t, 2**n - 1, "=="))
    Z = family_free_wreath(1)
    for H, n in zip(lamplighter_schedule(Z, range(1, 21)), range(1, 21)):
        inv = subgroup_abelianization(Z, H)
        out.append(BoundReport(f"growth:Z wr Z:n={n}:rank=n+1", inv.free_rank, n + 1, "=="))
        out.append(BoundReport(f"growth:Z wr Z:n={n}:t=1", inv.torsion_size, 1, "=="))
    steps = range(1, 13)
    recs = growth_sequence(G, ideal_schedule(G, steps), steps)
    for a, b in zip(recs, recs[1:]):
        out.append(BoundReport(f"growth:ideal:ratio[{b.step}]<ratio[{a.step}]", b.ratio, a.ratio, "<"))
    out.append(BoundReport("growth:ideal:final ratio<0.05", recs[-1].ratio, 0.05, "<"))
    out.append(subexp_ratio_check(recs, 0.3, 0.05))
    for r in recs:
        out.append(BoundReport(f"growth:ideal:n={r.step}:t=2^n", r.torsion_size, 2**r.step, "=="))
        out.append(BoundReport(f"growth:ideal:n={r.step}:a=2^n", r.a, 2**r.step, "=="))
    return out


def commutator_suite(seed: int) -> list[BoundReport]:
    return commutator_reports(8, 32, 2)


SUITES = {
    "multiplicativity": multiplicativity_suite,
    "fin": fin_suite,
    "torsion-lemma": torsion_lemma_suite,
    "MA": ma_suite,
    "exp": exp_suite,
    "growth": growth_suite,
    "commutator": commutator_suite,
}


def run_suite(name: str, seed: int = 0) -> dict[str, list[BoundReport]]:
    if name == "all":
        return {k: f(seed) for k, f in SUITES.items()}
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {sorted(SUITES) + ['all']}")
    return {name: SUITES[name](seed)}
