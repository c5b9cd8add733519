"""Conics of PG(2,q^2) viewed inside the Hall plane of order q^2."""

from .conic import (
    Conic,
    DegenerateConicError,
    format_conic,
    hyperbola_xy,
    normalform,
    parabola,
    parse_conic,
)
from .field import FieldElement, FieldError, FieldSpec, field_for_q, get_field
from .inherited import (
    ArcReport,
    SecantSpectrum,
    TheoremViolation,
    arc_report,
    collinear_triples,
    secant_spectrum,
    spectrum_report,
)
from .plane import HallPlane, NewLine, OldLine

__all__ = [
    "ArcReport",
    "Conic",
    "DegenerateConicError",
    "FieldElement",
    "FieldError",
    "FieldSpec",
    "HallPlane",
    "NewLine",
    "OldLine",
    "SecantSpectrum",
    "TheoremViolation",
    "arc_report",
    "collinear_triples",
    "field_for_q",
    "format_conic",
    "get_field",
    "hyperbola_xy",
    "normalform",
    "parabola",
    "parse_conic",
    "secant_spectrum",
    "spectrum_report",
]
