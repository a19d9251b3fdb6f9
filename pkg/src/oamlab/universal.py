"""Universal rescaled crosstalk b(x) with x = xi/r0, and concurrence laws.

For the integer exponents the universal curves are elementary:

    alpha = 1:  btilde = (g x / 2)^2 / (pi^2 + (g x / 2)^2)
    alpha = 2:  btilde = exp(-pi^2 / (2 g x^2))

The Kolmogorov curve is a function of x alone as well, but its closed
form is a higher special function; it is evaluated here through the
rotated-contour route at a large representative azimuthal index, whose
value drops out (checked by the independence test).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from . import map_asymptotic as asym
from .turbulence import ALPHA_KOLMOGOROV, GAMMA, TurbulenceParams

#: Representative azimuthal index used to trace the Kolmogorov curve.
DEFAULT_REF_L0 = 10_000

_SUPPORTED = (1.0, ALPHA_KOLMOGOROV, 2.0)


@dataclass(frozen=True)
class UniversalPoint:
    x: float
    b_tilde: float
    concurrence: float
    alpha: float


def concurrence(b_tilde: float) -> float:
    """Concurrence of the output qubit pair, C = max[0, (1-2b)/(1+b)^2]."""
    if b_tilde < 0:
        raise ValueError("relative crosstalk must be >= 0")
    return max(0.0, (1.0 - 2.0 * b_tilde) / (1.0 + b_tilde) ** 2)


def btilde_from_concurrence(c: float) -> float:
    """Inverse of the concurrence law on its decaying branch.

    Stable form of the quadratic root: btilde = (1-C) / (sqrt(3C+1) + C + 1),
    so C -> 0 maps to 1/2 without cancellation.
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError("concurrence must lie in [0, 1]")
    return (1.0 - c) / (math.sqrt(3.0 * c + 1.0) + c + 1.0)


def btilde_universal(x: float, alpha: float, gamma: float = GAMMA, ref_l0: int = DEFAULT_REF_L0) -> float:
    """Universal relative crosstalk at rescaled turbulence strength x."""
    if x < 0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        return 0.0
    if alpha == 1.0:
        u = (gamma * x / 2.0) ** 2
        return u / (math.pi**2 + u)
    if alpha == 2.0:
        expo = -math.pi**2 / (2.0 * gamma * x * x)
        return math.exp(expo) if expo > -745.0 else 0.0
    if alpha == ALPHA_KOLMOGOROV:
        # Invert the asymptotic correlation length for the strength that
        # puts the representative index at coordinate x.
        t = 2.0 * math.sqrt(2.0) * math.sqrt(ref_l0) * x / math.pi
        params = TurbulenceParams(alpha=alpha, t=t, gamma=gamma)
        return asym.b_asym(ref_l0, params) / asym.a_asym(ref_l0, params)
    raise ValueError(f"unsupported exponent {alpha}; expected one of {_SUPPORTED}")


def btilde_leading(x: float, alpha: float, gamma: float = GAMMA) -> float:
    """Leading small-x law of the universal crosstalk."""
    if x < 0:
        raise ValueError("x must be >= 0")
    if alpha == 2.0:
        if x == 0.0:
            return 0.0
        expo = -math.pi**2 / (leading_coefficient(2.0, gamma) * x * x)
        return math.exp(expo) if expo > -745.0 else 0.0
    if alpha == 1.0:
        return leading_coefficient(1.0, gamma) * x**2
    if alpha == ALPHA_KOLMOGOROV:
        return leading_coefficient(alpha, gamma) * x ** (8.0 / 3.0)
    raise ValueError(f"unsupported exponent {alpha}; expected one of {_SUPPORTED}")


def leading_coefficient(alpha: float, gamma: float = GAMMA) -> float:
    """Constant of the leading small-x law, generated rather than quoted.

    alpha=1: coefficient of x^2; alpha=5/3: coefficient of x^(8/3);
    alpha=2: the constant c in exp(-pi^2/(c x^2)), equal to 2 gamma.
    """
    if alpha == 1.0:
        return (gamma / 2.0) ** 2 / math.pi**2
    if alpha == ALPHA_KOLMOGOROV:
        coeffs, _ = asym.series_coefficients(1, alpha=alpha, variable="xi_over_r0", gamma=gamma)
        return float(coeffs[0])
    if alpha == 2.0:
        return 2.0 * gamma
    raise ValueError(f"unsupported exponent {alpha}; expected one of {_SUPPORTED}")


def leonhard_fit(x: float) -> float:
    """Reference concurrence fit g(x) = exp(-4.16 x^3.24) from earlier work.

    Accurate on x <~ 0.8 but implies the wrong crosstalk saturation: the
    decaying exponential forces btilde(inf) = 1/2 instead of 1.
    """
    if x < 0:
        raise ValueError("x must be >= 0")
    return math.exp(-4.16 * x**3.24)


def death_point(alpha: float, gamma: float = GAMMA) -> float:
    """Rescaled strength x at which entanglement dies (btilde = 1/2)."""
    return brentq(
        lambda x: btilde_universal(x, alpha, gamma=gamma) - 0.5, 1e-3, 10.0, xtol=1e-12, rtol=1e-14
    )


def universal_point(x: float, alpha: float, gamma: float = GAMMA) -> UniversalPoint:
    bt = btilde_universal(x, alpha, gamma=gamma)
    return UniversalPoint(x=x, b_tilde=bt, concurrence=concurrence(bt), alpha=alpha)
