"""Dihedral weight one modular forms from imaginary quadratic class groups."""
from .character import ClassCharacter, all_characters, conjugate_pairs, is_real
from .classgroup import ClassGroup, QuadraticForm, class_number, compose, enumerate_class_group, reduce
from .cyclotomic import CyclotomicSum, RootOfUnity
from .theta import ThetaSeries, dihedral_basis, direct_coefficient_oracle, theta_coefficients, verify_hecke

__version__ = "0.1.0"

__all__ = [
    "ClassCharacter",
    "ClassGroup",
    "CyclotomicSum",
    "QuadraticForm",
    "RootOfUnity",
    "ThetaSeries",
    "all_characters",
    "class_number",
    "compose",
    "conjugate_pairs",
    "dihedral_basis",
    "direct_coefficient_oracle",
    "enumerate_class_group",
    "is_real",
    "reduce",
    "theta_coefficients",
    "verify_hecke",
]
