import math

import numpy as np
import pytest
from scipy.integrate import quad

from oamlab.lg_modes import OamMode, radial_profile, xi, xi_asymptotic


class TestOamMode:
    def test_validation(self):
        with pytest.raises(ValueError):
            OamMode(l0=1, w0=0.0)
        with pytest.raises(ValueError):
            OamMode(l0=1, w0=1.0, p=1)

    def test_phi_stored(self):
        assert OamMode(l0=3, w0=1.0, phi=0.7).phi == 0.7


class TestRadialProfile:
    def test_axis_values(self):
        assert radial_profile(OamMode(l0=1, w0=1.0), 0.0) == 0.0
        assert radial_profile(OamMode(l0=0, w0=1.0), 0.0) == pytest.approx(2.0, rel=1e-14)

    @pytest.mark.parametrize("l0", [0, 1, 2, 5, 20, 50, 60])
    def test_normalization(self, l0):
        # Oracle: the substitution u = 2 r^2 / w0^2 reduces the norm to
        # Gamma(l0+1)/l0! = 1; verified here by direct quadrature.
        mode = OamMode(l0=l0, w0=1.3)
        peak = 1.3 * math.sqrt(max(l0, 1) / 2.0)
        val, err = quad(
            lambda r: radial_profile(mode, r) ** 2 * r, 0.0, peak + 12.0, limit=200
        )
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_vectorized_matches_scalar(self):
        mode = OamMode(l0=3, w0=0.8)
        rs = np.linspace(0.0, 5.0, 17)
        vec = radial_profile(mode, rs)
        assert vec == pytest.approx([radial_profile(mode, float(r)) for r in rs])

    def test_nonnegative_and_underflow_guard(self):
        mode = OamMode(l0=2, w0=1.0)
        rs = np.linspace(0.0, 60.0, 301)
        vals = radial_profile(mode, rs)
        assert np.all(vals >= 0.0)
        assert radial_profile(mode, 50.0) == 0.0  # exponent below double range

    def test_sign_of_l0_irrelevant(self):
        rs = np.linspace(0.0, 4.0, 9)
        assert radial_profile(OamMode(l0=-7, w0=1.0), rs) == pytest.approx(
            radial_profile(OamMode(l0=7, w0=1.0), rs)
        )

    @pytest.mark.parametrize("l0", [10, 100])
    def test_peak_near_saddle_radius(self, l0):
        # Bright ring sits at w0 sqrt(l0/2); locate by scan.
        mode = OamMode(l0=l0, w0=1.0)
        target = math.sqrt(l0 / 2.0)
        rs = np.arange(0.5 * target, 1.5 * target, 0.01)
        peak = rs[np.argmax(radial_profile(mode, rs))]
        assert abs(peak - target) <= 0.01 + 1e-12

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError):
            radial_profile(OamMode(l0=1, w0=1.0), -0.5)


class TestCorrelationLength:
    def test_l0_one_closed_form(self):
        # Oracle: sin(pi/2) = 1 and Gamma(5/2)/Gamma(2) = 3 sqrt(pi)/4.
        expected = 3.0 * math.sqrt(math.pi) / (4.0 * math.sqrt(2.0))
        assert xi(1, 1.0) == pytest.approx(expected, rel=1e-13)

    def test_l0_hundred(self):
        # Frozen from the independent log-gamma ladder evaluation.
        assert xi(100, 1.0) == pytest.approx(0.11148340257906665, rel=1e-12)

    def test_scales_with_w0(self):
        assert xi(5, 2.5) == pytest.approx(2.5 * xi(5, 1.0), rel=1e-14)

    @pytest.mark.parametrize("l0", range(1, 21))
    def test_sign_symmetry(self, l0):
        assert xi(-l0, 1.0) == xi(l0, 1.0)

    def test_l0_zero_rejected(self):
        with pytest.raises(ValueError):
            xi(0, 1.0)

    def test_asymptotic_values(self):
        assert xi_asymptotic(100, 1.0) == pytest.approx(
            math.pi / (2.0 * math.sqrt(2.0) * 10.0), rel=1e-14
        )
        # At l0 = 1 the asymptotic form overshoots the exact one by ~18%.
        assert xi_asymptotic(1, 1.0) == pytest.approx(1.1107207345395915, rel=1e-14)
        assert xi_asymptotic(1, 1.0) / xi(1, 1.0) == pytest.approx(1.18, abs=0.01)

    def test_asymptotic_ratio_converges_monotonically(self):
        ratios = [xi(l0, 1.0) / xi_asymptotic(l0, 1.0) for l0 in (10, 100, 1000)]
        assert ratios[0] > ratios[1] > ratios[2] > 1.0
        assert ratios[1] == pytest.approx(1.0, abs=5e-3)   # < 0.5% at l0 = 100
        assert ratios[2] == pytest.approx(1.0, abs=5e-4)   # < 0.05% at l0 = 1000
        assert ratios[1] == pytest.approx(1.0037, abs=2e-4)

    def test_asymptotic_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            xi_asymptotic(0, 1.0)
