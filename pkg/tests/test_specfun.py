import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oamlab.errors import SeriesConvergenceError
from oamlab.specfun import LogSigned, gauss_2f1, ln_binomial, ln_gamma


class TestLnGamma:
    def test_integer_fixed_points(self):
        assert ln_gamma(1.0) == 0.0
        assert ln_gamma(2.0) == 0.0

    def test_half_integer(self):
        # Oracle: recurrence from Gamma(0.5) = sqrt(pi):
        # Gamma(2.5) = 1.5 * 0.5 * sqrt(pi) = 0.75 sqrt(pi).
        expected = math.log(0.75 * math.sqrt(math.pi))
        assert ln_gamma(2.5) == pytest.approx(expected, rel=1e-13)

    def test_accuracy_against_recurrence_ladder(self):
        # Oracle: climb Gamma(x+1) = x Gamma(x) from the exactly known
        # Gamma(0.5); covers the contract range without external tables.
        acc = math.log(math.sqrt(math.pi))
        x = 0.5
        while x < 9.5e5:
            acc += math.log(x)
            x += 1.0
            if x in (1.5, 10.5, 100.5, 1000.5, 10000.5, 999999.5):
                assert ln_gamma(x) == pytest.approx(acc, rel=1e-13)

    def test_small_argument(self):
        # Gamma(1e-3) = Gamma(1 + 1e-3) / 1e-3; the shifted value is
        # within the Taylor ball of -euler_gamma * eps to high accuracy.
        lhs = ln_gamma(1e-3)
        rhs = ln_gamma(1.0 + 1e-3) - math.log(1e-3)
        assert lhs == pytest.approx(rhs, rel=1e-13)

    @pytest.mark.parametrize("bad", [0.0, -1.0, -0.5])
    def test_domain_error(self, bad):
        with pytest.raises(ValueError):
            ln_gamma(bad)

    @pytest.mark.parametrize("x", [0.5, 1.5, 10.0, 100.5])
    def test_recurrence_consistency(self, x):
        assert math.exp(ln_gamma(x + 1.0)) == pytest.approx(
            x * math.exp(ln_gamma(x)), rel=1e-12
        )

    def test_binomial(self):
        assert math.exp(ln_binomial(6, 2)) == pytest.approx(15.0, rel=1e-12)
        assert math.exp(ln_binomial(3, 1)) == pytest.approx(3.0, rel=1e-12)


class TestLogSigned:
    def test_zero_convention(self):
        z = LogSigned.from_value(0.0)
        assert z.sign == 0 and z.value == 0.0

    def test_roundtrip(self):
        # log/exp roundtrip loses ~|log| ulps, so extreme magnitudes are
        # recovered to 1e-13 rather than machine epsilon.
        for v in (3.5, -2.25, 1e-200, -1e200):
            ls = LogSigned.from_value(v)
            assert ls.value == pytest.approx(v, rel=1e-13)

    @given(
        st.floats(min_value=1e-100, max_value=1e100),
        st.floats(min_value=1e-100, max_value=1e100),
        st.sampled_from([1, -1]),
        st.sampled_from([1, -1]),
    )
    @settings(max_examples=50, deadline=None)
    def test_product_adds_logs_multiplies_signs(self, m1, m2, s1, s2):
        a = LogSigned.from_value(s1 * m1)
        b = LogSigned.from_value(s2 * m2)
        prod = a * b
        assert prod.sign == s1 * s2
        assert prod.log_magnitude == pytest.approx(
            a.log_magnitude + b.log_magnitude, abs=1e-12
        )

    def test_product_with_zero(self):
        a = LogSigned.from_value(2.0)
        z = LogSigned.from_value(0.0)
        assert (a * z).sign == 0


def _series_oracle(beta, delta, eta, z, n_terms):
    """Plain term-by-term summation, double precision."""
    total, term = 0.0, 1.0
    for k in range(n_terms):
        total += term
        term *= (beta + k) * (delta + k) / ((eta + k) * (1.0 + k)) * z
    return total


class TestGauss2F1:
    def test_z_zero_is_one(self):
        res = gauss_2f1(7.3, -2.1, 0.4, 0.0)
        assert res.sign == 1 and res.log_magnitude == 0.0

    def test_logarithm_closed_form(self):
        # 2F1(1, 1; 2; z) = -ln(1-z)/z; at z = 1/2 this is 2 ln 2.
        res = gauss_2f1(1.0, 1.0, 2.0, 0.5)
        assert res.value == pytest.approx(2.0 * math.log(2.0), rel=1e-13)
        assert res.value == pytest.approx(_series_oracle(1.0, 1.0, 2.0, 0.5, 60), rel=1e-13)

    def test_spec_point_from_quadratic_map(self):
        # Frozen oracle: direct summation (30+ terms) at the literal input.
        assert gauss_2f1(1.5, 2.0, 1.0, 0.21379).value == pytest.approx(
            _series_oracle(1.5, 2.0, 1.0, 0.21379, 60), rel=1e-12
        )
        assert gauss_2f1(1.5, 2.0, 1.0, 0.21379).value == pytest.approx(2.0196, abs=2e-4)

    def test_binomial_closed_form(self):
        # 2F1(a, b; b; z) = (1-z)^(-a) independently of b.
        res = gauss_2f1(2.5, 4.0, 4.0, 0.3)
        assert res.value == pytest.approx(0.7 ** (-2.5), rel=1e-13)

    def test_terminating_polynomial(self):
        # beta = -2 terminates: 1 - 2 b z /eta + ... exactly 3 terms.
        res = gauss_2f1(-2.0, 3.0, 1.5, 0.25)
        assert res.value == pytest.approx(_series_oracle(-2.0, 3.0, 1.5, 0.25, 3), rel=1e-14)

    def test_large_parameters_against_scaled_oracle(self):
        # The quadratic-map regime: huge symmetric parameters, z near 0.87.
        # Oracle: same series in extended precision via mpmath.
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 40
        beta, delta, eta = 225.5, 226.0, 301.0
        z = 0.869087
        res = gauss_2f1(beta, delta, eta, z)
        ref = mp.log(mp.hyp2f1(beta, delta, eta, z))
        assert res.sign == 1
        assert res.log_magnitude == pytest.approx(float(ref), abs=5e-11)

    @given(
        st.floats(min_value=0.1, max_value=50.0),
        st.floats(min_value=0.1, max_value=50.0),
        st.floats(min_value=0.5, max_value=60.0),
        st.floats(min_value=0.0, max_value=0.9),
    )
    @settings(max_examples=40, deadline=None)
    def test_symmetry_in_first_two_arguments(self, beta, delta, eta, z):
        a = gauss_2f1(beta, delta, eta, z)
        b = gauss_2f1(delta, beta, eta, z)
        assert a.sign == b.sign
        assert a.log_magnitude == pytest.approx(b.log_magnitude, abs=1e-14)

    @pytest.mark.parametrize("beta,delta,eta", [(1.5, 2.0, 3.0), (10.0, 0.5, 4.0)])
    def test_small_z_slope(self, beta, delta, eta):
        z = 1e-6
        slope = (gauss_2f1(beta, delta, eta, z).value - 1.0) / z
        assert slope == pytest.approx(beta * delta / eta, rel=1e-4)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            gauss_2f1(1.0, 1.0, 2.0, -0.1)
        with pytest.raises(ValueError):
            gauss_2f1(1.0, 1.0, 2.0, 1.0)
        with pytest.raises(ValueError):
            gauss_2f1(1.0, 1.0, 0.0, 0.5)
        with pytest.raises(ValueError):
            gauss_2f1(1.0, 1.0, -3.0, 0.5)

    def test_term_cap_reports_context(self):
        with pytest.raises(SeriesConvergenceError) as exc:
            gauss_2f1(100.0, 100.0, 1.0, 0.999999)
        assert exc.value.z == 0.999999
        assert exc.value.residual is not None
