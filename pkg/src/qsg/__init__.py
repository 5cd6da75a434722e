"""Presented quantum semigroups over exact Gaussian rationals."""

from .builtins import lookup, m2_commutant_phi, qmap_M2, qmap_Xn
from .commutant import M2Automorphism, PermFamily, build_commutant, commutant_ideal, group_closure
from .dsl import DSLError, parse, print_presentation, print_semigroup
from .ncpoly import Alphabet, NCPoly, Scalar, TensorPoly
from .presentation import GeneratorMap, Presentation, check_morphism, make_presentation, quotient
from .rewrite import RewriteSystem, complete, normal_form
from .semigroup import QuantumSemigroup, Report, verify_all

__all__ = [
    "Alphabet", "DSLError", "GeneratorMap", "M2Automorphism", "NCPoly", "PermFamily", "Presentation",
    "QuantumSemigroup", "Report", "RewriteSystem", "Scalar", "TensorPoly", "build_commutant",
    "check_morphism", "commutant_ideal", "complete", "group_closure", "lookup", "m2_commutant_phi",
    "make_presentation", "normal_form", "parse", "print_presentation", "print_semigroup", "qmap_M2",
    "qmap_Xn", "quotient", "verify_all",
]
