"""Special-function kernels: log-gamma and the Gauss hypergeometric series.

Everything here works in log-magnitude/sign space so that the huge
factorials, binomials and power prefactors appearing in the crosstalk
closed forms never overflow a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SeriesConvergenceError

#: Hard cap on hypergeometric series length before giving up.
MAX_2F1_TERMS = 10**6

#: Relative contribution below which the series is declared converged.
TERM_TOL = 1e-15


@dataclass(frozen=True)
class LogSigned:
    """A real number stored as (ln|value|, sign).

    sign is 0 exactly when the value is zero, in which case log_magnitude
    is -inf by convention.  Multiplication adds logs and multiplies signs.
    """

    log_magnitude: float
    sign: int

    @staticmethod
    def from_value(x: float) -> "LogSigned":
        if x == 0.0:
            return LogSigned(float("-inf"), 0)
        return LogSigned(math.log(abs(x)), 1 if x > 0 else -1)

    @property
    def value(self) -> float:
        """The represented number; may over/underflow for extreme logs."""
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogSigned") -> "LogSigned":
        sign = self.sign * other.sign
        if sign == 0:
            return LogSigned(float("-inf"), 0)
        return LogSigned(self.log_magnitude + other.log_magnitude, sign)


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for positive real x."""
    if not x > 0:
        raise ValueError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def ln_binomial(n: float, k: float) -> float:
    """ln of the binomial coefficient n-choose-k via log-gamma differences."""
    return ln_gamma(n + 1) - ln_gamma(k + 1) - ln_gamma(n - k + 1)


def gauss_2f1(beta: float, delta: float, eta: float, z: float) -> LogSigned:
    """Gauss hypergeometric series 2F1(beta, delta; eta; z) for z in [0, 1).

    For large parameters the terms grow by orders of magnitude for
    thousands of indices before decaying, so the running sum is kept as a
    scaled, compensated (Kahan) accumulator whose scale tracks the largest
    term seen.  Convergence is declared once the terms are decreasing and
    the last term contributes less than TERM_TOL of the accumulated sum.

    Returns the result as a LogSigned since the sum itself can exceed the
    double range long before the physical quantities it feeds do.
    """
    if not (0.0 <= z < 1.0):
        raise ValueError(f"gauss_2f1 requires 0 <= z < 1, got z={z}")
    if eta <= 0 and float(eta).is_integer():
        raise ValueError(f"gauss_2f1 pole: eta is a non-positive integer ({eta})")
    if z == 0.0:
        return LogSigned(0.0, 1)

    # Scaled accumulator: sum = acc * exp(scale), |term| tracked in logs.
    scale = 0.0
    acc = 1.0       # k = 0 term
    comp = 0.0      # Kahan compensation for acc
    log_term = 0.0
    term_sign = 1
    log_z = math.log(z)

    for k in range(MAX_2F1_TERMS):
        num = (beta + k) * (delta + k)
        if num == 0.0:
            # Terminating (polynomial) case: one factor hit zero.
            return _finalize(acc, comp, scale)
        ratio = num / ((eta + k) * (1.0 + k))
        log_term += math.log(abs(ratio)) + log_z
        if ratio < 0:
            term_sign = -term_sign
        growing = abs(ratio) * z >= 1.0

        if log_term > scale:
            # Rescale so the largest term maps to exp(0).
            shift = math.exp(scale - log_term)
            acc *= shift
            comp *= shift
            scale = log_term

        y = term_sign * math.exp(log_term - scale) - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t

        if not growing and acc != 0.0:
            if log_term - (scale + math.log(abs(acc))) < math.log(TERM_TOL):
                return _finalize(acc, comp, scale)

    residual = math.exp(log_term - scale) / abs(acc) if acc != 0.0 else float("inf")
    raise SeriesConvergenceError(
        f"2F1({beta}, {delta}; {eta}; {z}) did not converge within "
        f"{MAX_2F1_TERMS} terms (relative residual {residual:.3e})",
        z=z,
        residual=residual,
        n_terms=MAX_2F1_TERMS,
    )


def _finalize(acc: float, comp: float, scale: float) -> LogSigned:
    total = acc - comp
    if total == 0.0:
        return LogSigned(float("-inf"), 0)
    return LogSigned(scale + math.log(abs(total)), 1 if total > 0 else -1)
