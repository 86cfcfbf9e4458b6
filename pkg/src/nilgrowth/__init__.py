"""Exact computations around uniform finite presentation of polynomial-growth groups.

Free nilpotent Lie algebras with BCH and Zassenhaus products, integer
lattices and convex bodies, harmonious lattices in the Heisenberg group,
and growth and relation-scale experiments on concrete groups.
"""

from .errors import BoundViolation, ConstantTableError, NilgrowthError, ResourceError, UsageError
from .lie import (HallBasis, LieElement, LiePolynomialTerm, bch, bracket, build_hall_basis, dilate,
                  heisenberg_exp, heisenberg_log, pnorm, pnorm_le, zassenhaus_terms)
from .lattice import IntegerLattice, index, intersect, span_z
from .convex import ConvexBody, box, graded_box, l1_ball, l2_ball, polytope
from .geometry import ExplorationReport, explore, minkowski_second_check, successive_minima
from .harmonious import (ConstantTable, GradedLattice, HarmoniousVerdict, bracket_closure, default_constants,
                         folner_count, h_minus, h_plus, index_sandwich_bound_check, is_harmonious,
                         multiplicative_index)
from .heisenberg import HeisenbergSubgroup, subgroup_generated
from .groups import (ConcreteGroup, ScaleReport, abelian_group, abelian_relation_scales, ball,
                     chain_count_check, finite_index_generating_check, growth_profile, heisenberg_group,
                     heisenberg_mod_group, injectivity_radius_check, subgroup_scales, tao_example_profile)
from .report import emit_report

__version__ = "0.1.0"
