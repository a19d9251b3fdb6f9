import math

import numpy as np
import pytest

from oamlab.errors import QuadratureConvergenceError
from oamlab.map_numeric import (
    AmplitudePair,
    QuadratureConfig,
    amplitudes_numeric,
    lambda_diag,
)
from oamlab.turbulence import TurbulenceParams


def riemann_map_element(l1, l0, params, n_rho=4000, n_theta=4000, chunk=500):
    """Plain fixed-grid midpoint sum of the defining double integral.

    Returns the complex value including the angular phase factor over the
    full circle, so the vanishing of the imaginary part is itself checked.
    """
    alpha, gamma, t = params.alpha, params.gamma, params.t
    rho_max = math.sqrt(l0 / 2.0) + 6.0
    rho = (np.arange(n_rho) + 0.5) * rho_max / n_rho
    theta = (np.arange(n_theta) + 0.5) * 2.0 * np.pi / n_theta
    damping = 2.0 ** (alpha - 1.0) * gamma * t**alpha * np.sin(theta / 2.0) ** alpha
    log_radial = (2.0 * l0 + 1.0) * np.log(rho) - 2.0 * rho**2
    log_pref = (l0 + 1.0) * math.log(2.0) - math.log(math.pi) - math.lgamma(l0 + 1.0)
    rho_a = rho**alpha

    total = 0.0 + 0.0j
    for start in range(0, n_theta, chunk):
        dpart = damping[start : start + chunk]
        block = np.exp(log_pref + log_radial[None, :] - np.outer(dpart, rho_a))
        phases = np.exp(1j * (l1 - l0) * theta[start : start + chunk])
        total += (phases[:, None] * block).sum()
    return total * (rho_max / n_rho) * (2.0 * np.pi / n_theta)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            QuadratureConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureConfig(theta_points_per_period=4)

    def test_amplitude_pair_needs_method(self):
        with pytest.raises(ValueError):
            AmplitudePair(a=1.0, b=0.0, b_tilde=0.0, method="", err=0.0)


class TestAgainstBruteForce:
    # Frozen values: verified independently by a 4000x4000 midpoint sum
    # and by the hypergeometric closed form of the quadratic model.
    def test_quadratic_reference_point(self):
        params = TurbulenceParams(alpha=2.0, t=0.5)
        assert lambda_diag(1, 1, params) == pytest.approx(0.4146289178010839, rel=1e-9)
        assert lambda_diag(-1, 1, params) == pytest.approx(0.0690619723739657, rel=1e-9)

    @pytest.mark.parametrize(
        "alpha,l0,t",
        [(5.0 / 3.0, 2, 0.5), (1.0, 1, 1.0), (2.0, 5, 1.0), (5.0 / 3.0, 5, 2.0)],
    )
    def test_riemann_oracle(self, alpha, l0, t):
        params = TurbulenceParams(alpha=alpha, t=t)
        # The linear exponent leaves a corner in the angular damping, so
        # the midpoint sum converges only as n^-2 there and needs a finer
        # angular grid to act as a 1e-6 oracle.
        n_theta = 32000 if alpha == 1.0 else 4000
        for l1 in (l0, -l0):
            oracle = riemann_map_element(l1, l0, params, n_theta=n_theta)
            value = lambda_diag(l1, l0, params)
            assert abs(oracle.imag) < 1e-10 * abs(oracle.real)
            assert value == pytest.approx(oracle.real, rel=1e-6)


class TestLimits:
    def test_no_turbulence_limit(self):
        params = TurbulenceParams(alpha=5.0 / 3.0, t=1e-8)
        res = amplitudes_numeric(3, params)
        assert res.a == pytest.approx(1.0, abs=1e-5)
        assert 0.0 <= res.b < 1e-8

    def test_survival_bounds_and_ratio(self):
        for alpha in (1.0, 5.0 / 3.0, 2.0):
            for l0 in (1, 10, 100):
                for t in (0.1, 1.0, 5.0):
                    res = amplitudes_numeric(l0, TurbulenceParams(alpha=alpha, t=t))
                    assert 0.0 < res.a <= 1.0 + 1e-12
                    if not res.noise_floor:
                        assert -1e-12 <= res.b <= res.a
                        assert 0.0 <= res.b_tilde <= 1.0

    def test_monotone_in_strength(self):
        # Monotonicity applies to converged values; points flagged at the
        # quadrature noise floor carry no comparable magnitude.
        for alpha in (1.0, 5.0 / 3.0, 2.0):
            for l0 in (1, 10, 100):
                bts = [
                    amplitudes_numeric(l0, TurbulenceParams(alpha=alpha, t=t))
                    for t in (0.1, 0.5, 1.0, 2.0, 5.0)
                ]
                clean = [r.b_tilde for r in bts if not r.noise_floor]
                assert len(clean) >= 2
                assert all(b2 > b1 for b1, b2 in zip(clean, clean[1:]))

    def test_noise_floor_flagged(self):
        # Quadratic exponent at large l0 drives the crosstalk below any
        # floating-point quadrature; the flag must say so.
        res = amplitudes_numeric(300, TurbulenceParams(alpha=2.0, t=0.1))
        assert res.noise_floor
        assert abs(res.b) < 10.0 * res.err

    def test_method_tag_and_error(self):
        res = amplitudes_numeric(5, TurbulenceParams(alpha=1.0, t=0.7))
        assert res.method == "quadrature"
        assert res.err > 0.0

    def test_l0_must_be_positive(self):
        with pytest.raises(ValueError):
            lambda_diag(0, 0, TurbulenceParams(alpha=1.0, t=1.0))


class TestCrossMethod:
    def test_quadratic_matches_closed_form(self):
        from oamlab.map_asymptotic import exact_quadratic

        for l0, t in [(1, 0.5), (10, 1.0), (50, 2.0)]:
            params = TurbulenceParams(alpha=2.0, t=t)
            quad = amplitudes_numeric(l0, params)
            closed = exact_quadratic(l0, params)
            assert quad.a == pytest.approx(closed.a, rel=1e-6)
            assert quad.b == pytest.approx(closed.b, rel=1e-6)
