"""Turbulence-induced crosstalk between opposite-helicity twisted photons.

Single-phase-screen model: four mutually cross-checking routes to the
survival amplitude a, crosstalk amplitude b and relative crosstalk
b_tilde = b/a (deterministic quadrature, steepest-descent asymptotics,
a divergent asymptotic series, and exact hypergeometric forms for the
quadratic exponent), a Monte Carlo phase-screen oracle, and the
universal entanglement-decay laws they imply.
"""

from .lg_modes import OamMode, radial_profile, xi, xi_asymptotic
from .map_asymptotic import (
    AsymptoticContext,
    a_asym,
    amplitudes_asymptotic,
    b_asym,
    b_contour,
    b_series,
    exact_quadratic,
    series_coefficients,
)
from .map_numeric import AmplitudePair, QuadratureConfig, amplitudes_numeric, lambda_diag
from .montecarlo import (
    OverlapEstimate,
    PhaseScreen,
    ScreenGeometry,
    estimate_amplitudes,
    generate_screen,
    measure_structure_function,
    project_overlap,
)
from .turbulence import GAMMA, TurbulenceParams, fried_parameter, structure_function
from .universal import (
    UniversalPoint,
    btilde_leading,
    btilde_universal,
    concurrence,
    death_point,
    leonhard_fit,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudePair",
    "AsymptoticContext",
    "GAMMA",
    "OamMode",
    "OverlapEstimate",
    "PhaseScreen",
    "QuadratureConfig",
    "ScreenGeometry",
    "TurbulenceParams",
    "UniversalPoint",
    "a_asym",
    "amplitudes_asymptotic",
    "amplitudes_numeric",
    "b_asym",
    "b_contour",
    "b_series",
    "btilde_leading",
    "btilde_universal",
    "concurrence",
    "death_point",
    "estimate_amplitudes",
    "exact_quadratic",
    "fried_parameter",
    "generate_screen",
    "lambda_diag",
    "leonhard_fit",
    "measure_structure_function",
    "project_overlap",
    "radial_profile",
    "series_coefficients",
    "structure_function",
    "xi",
    "xi_asymptotic",
]
