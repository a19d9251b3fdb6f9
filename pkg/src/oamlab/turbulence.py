"""Turbulence statistics: structure function, Fried parameter, strength."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

#: Structure-function constant, kept at the conventional two-decimal value.
GAMMA = 6.88

#: The three canonical structure-function exponents.
ALPHA_LINEAR = 1.0
ALPHA_KOLMOGOROV = 5.0 / 3.0
ALPHA_QUADRATIC = 2.0


def parse_alpha(text) -> float:
    """Parse an exponent given as a decimal or a literal fraction like '5/3'."""
    if isinstance(text, (int, float)):
        return float(text)
    return float(Fraction(text))


@dataclass(frozen=True)
class TurbulenceParams:
    """Single-screen turbulence model: exponent, constant, and strength.

    t = w0/r0 is the dimensionless turbulence strength; all crosstalk
    results depend on the medium only through (alpha, gamma, t).  The
    atmospheric inputs (Cn2, k, L) are optional provenance for r0.
    """

    alpha: float
    t: float
    w0: float = 1.0
    gamma: float = GAMMA
    Cn2: float | None = None
    k: float | None = None
    L: float | None = None

    def __post_init__(self):
        if not (1.0 <= self.alpha <= 2.0):
            raise ValueError(f"alpha must lie in [1, 2], got {self.alpha}")
        if self.t <= 0:
            raise ValueError(f"turbulence strength must be positive, got {self.t}")
        if self.w0 <= 0:
            raise ValueError(f"beam width must be positive, got {self.w0}")

    @property
    def r0(self) -> float:
        return self.w0 / self.t

    @classmethod
    def from_fried(cls, alpha, r0, w0=1.0, gamma=GAMMA) -> "TurbulenceParams":
        if r0 <= 0:
            raise ValueError(f"Fried parameter must be positive, got {r0}")
        return cls(alpha=float(alpha), t=w0 / r0, w0=w0, gamma=gamma)

    @classmethod
    def from_atmosphere(cls, alpha, Cn2, k, L, w0=1.0, gamma=GAMMA) -> "TurbulenceParams":
        r0 = fried_parameter(Cn2, k, L)
        return cls(alpha=float(alpha), t=w0 / r0, w0=w0, gamma=gamma, Cn2=Cn2, k=k, L=L)


def structure_function(x, params: TurbulenceParams):
    """Phase structure function D(x) = gamma (x/r0)^alpha, in squared radians."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("separation must be >= 0")
    out = params.gamma * (x / params.r0) ** params.alpha
    return float(out) if out.ndim == 0 else out


def fried_parameter(Cn2: float, k: float, L: float) -> float:
    """Fried parameter r0 = (0.423 Cn2 k^2 L)^(-3/5) for a uniform path."""
    if Cn2 <= 0 or k <= 0 or L <= 0:
        raise ValueError("Cn2, k and L must all be positive")
    return (0.423 * Cn2 * k * k * L) ** (-3.0 / 5.0)
