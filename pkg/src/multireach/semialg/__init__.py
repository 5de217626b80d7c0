"""Bivariate semialgebraic set engine."""
from .sets import (SignSystem, SemiAlgebraicSet2D, normalize, parse_formula, intersect, transform,
                   member, halfplane, poly2, poly_str)
from .points import RationalPoint, FieldPoint, TowerPoint, QuadraticPoint, as_point
from .cad import is_empty, find_point
from .radii import extremal_radii, radial_ranges, circle_arc_test

__all__ = [
    "SignSystem", "SemiAlgebraicSet2D", "normalize", "parse_formula", "intersect", "transform",
    "member", "halfplane", "poly2", "poly_str", "RationalPoint", "FieldPoint", "TowerPoint",
    "QuadraticPoint", "as_point", "is_empty", "find_point", "extremal_radii", "radial_ranges",
    "circle_arc_test",
]
