"""Exact arithmetic kernel."""
from .quadratic import QuadraticNumber
from .realalg import RealAlgebraic, isolate_real_roots, real_roots
from .numberfield import NumberField, FieldElement
from .logs import LogInterval, certified_log, certified_log_quadratic
from .height import weil_height, mahler_measure

__all__ = [
    "QuadraticNumber", "RealAlgebraic", "isolate_real_roots", "real_roots",
    "NumberField", "FieldElement", "LogInterval", "certified_log",
    "certified_log_quadratic", "weil_height", "mahler_measure",
]
