"""Taylor series of the string solution of the dispersionless 2D Toda
hierarchy, and the exterior conformal maps it produces from harmonic moments."""

from .coefficients import CoefficientCache, MomentSignature, n1, n2, p_count, s_weight, t1, t2
from .conformal import Contour, LaurentMap, boundary_image, exterior_map, moments_from_contour, phi_coefficients
from .series import (
    CapacityError,
    FormalSeries,
    Monomial,
    MomentVector,
    TruncatedF,
    build_f,
    coefficient,
    differentiate,
    evaluate,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CoefficientCache",
    "Contour",
    "FormalSeries",
    "LaurentMap",
    "MomentSignature",
    "MomentVector",
    "Monomial",
    "TruncatedF",
    "boundary_image",
    "build_f",
    "coefficient",
    "differentiate",
    "evaluate",
    "exterior_map",
    "moments_from_contour",
    "n1",
    "n2",
    "p_count",
    "phi_coefficients",
    "s_weight",
    "t1",
    "t2",
]
