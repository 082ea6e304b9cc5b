"""Numerical laboratory for Gabriel-type inequalities on harmonic Hardy spaces."""

__version__ = "0.1.0"

from gabriel_lab.harmonic import (
    BoundaryTrace,
    FunctionSpec,
    HarmonicSeries,
    boundary_trace,
    conjugate,
    integral_mean,
    normalize,
    poisson_extend,
    submean_defect,
)
from gabriel_lab.curves import (
    Circle,
    ConvexCurve,
    Ellipse,
    Parametric,
    Polygon,
    Segment,
    arc_panels,
    containment_margin,
    convexity_check,
)
from gabriel_lab.quadrature import (
    QuadratureResult,
    boundary_integral,
    circle_max,
    contour_integral,
    oracle_integral,
    radial_integral,
)
from gabriel_lab.errors import DomainError, NumericalFailure

__all__ = [
    "BoundaryTrace",
    "Circle",
    "ConvexCurve",
    "DomainError",
    "Ellipse",
    "FunctionSpec",
    "HarmonicSeries",
    "NumericalFailure",
    "Parametric",
    "Polygon",
    "QuadratureResult",
    "Segment",
    "arc_panels",
    "boundary_integral",
    "boundary_trace",
    "circle_max",
    "conjugate",
    "containment_margin",
    "contour_integral",
    "convexity_check",
    "integral_mean",
    "normalize",
    "oracle_integral",
    "poisson_extend",
    "radial_integral",
    "submean_defect",
]
