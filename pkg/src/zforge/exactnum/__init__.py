"""Exact arithmetic: rationals, Gaussian rationals, number fields, algebraic numbers."""

from .algebraic import (AlgebraicNumber, AmbiguousRootError, bombieri_lower_bound, certify_separation,
                        check_conversion, conversion_bounds, height_H, log_height_h, make_algebraic)
from .enclosure import Ball, RealEnclosure, UndecidableError, log_enclosure, exp_enclosure
from .field import FieldElement, NumberField, element_min_poly, floor_real, from_generators
from .heights import check_h_rules
from .rational import GaussianRational, frac_str, parse_frac, parse_gaussian

__all__ = [
    "AlgebraicNumber", "AmbiguousRootError", "Ball", "FieldElement", "GaussianRational", "NumberField",
    "RealEnclosure", "UndecidableError", "bombieri_lower_bound", "certify_separation", "check_conversion",
    "check_h_rules", "conversion_bounds", "element_min_poly", "exp_enclosure", "floor_real", "frac_str",
    "from_generators", "height_H", "log_enclosure", "log_height_h", "make_algebraic", "parse_frac",
    "parse_gaussian",
]
