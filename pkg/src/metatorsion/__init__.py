"""Torsion in abelianizations of finite-index subgroups of split metabelian groups."""

from .groupring import LaurentElt, Sublattice, coset_table, parse
from .intlinalg import AbelianInvariants, IntMatrix, abelian_invariants, smith_normal_form
from .metabelian import (
    family_bs_module,
    family_free_wreath,
    family_lamplighter,
    group_abelianization,
    subgroup_abelianization,
    subgroup_from_ideal,
    subgroup_from_lattice,
)
from .modules import ModulePresentation, coinvariant_invariants, pushdown

__version__ = "0.1.0"
