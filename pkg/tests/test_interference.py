import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from hangersim import (
    DriveTone,
    InterferenceSetting,
    PointerPair,
    Port,
    QubitState,
    combine,
    enhancement_factor,
    interference_distance,
    normalize_phase,
    path_phase_from_spacing,
    pointer_distance,
    reflection,
    transmission,
)
from hangersim.exceptions import (
    InconsistentPairError,
    InvalidParameterError,
    NonFiniteInputError,
)

SQRT2 = math.sqrt(2.0)


def pointer_pairs(cavity, omega_d, alpha_in=1.0):
    d = DriveTone(omega_d=omega_d, alpha_in=alpha_in)
    pair_t = PointerPair(
        alpha_g=transmission(cavity, QubitState.GROUND, d),
        alpha_e=transmission(cavity, QubitState.EXCITED, d),
    )
    pair_r = PointerPair(
        alpha_g=reflection(cavity, QubitState.GROUND, d),
        alpha_e=reflection(cavity, QubitState.EXCITED, d),
    )
    return pair_t, pair_r


class TestNormalization:
    @pytest.mark.parametrize(
        "theta,expected",
        [
            (0.0, 0.0),
            (math.pi, math.pi),
            (-math.pi, math.pi),
            (3.0 * math.pi, math.pi),
            (2.0 * math.pi, 0.0),
            (math.pi + 0.3, -math.pi + 0.3),
            (-4.0, -4.0 + 2.0 * math.pi),
        ],
    )
    def test_principal_interval(self, theta, expected):
        value = normalize_phase(theta)
        assert -math.pi < value <= math.pi
        assert value == pytest.approx(expected, abs=1e-12)

    def test_setting_normalizes_on_construction(self):
        assert InterferenceSetting(3.0 * math.pi).theta_rt == pytest.approx(math.pi)


class TestCombine:
    def test_transmission_only(self):
        plus, minus = combine(1.0, 0.0, InterferenceSetting(0.7))
        assert plus == pytest.approx(1.0 / SQRT2)
        assert minus == pytest.approx(1.0 / SQRT2)

    def test_perfect_constructive_split(self):
        plus, minus = combine(1.0, 1.0, InterferenceSetting(0.0))
        assert plus == pytest.approx(SQRT2)
        assert minus == pytest.approx(0.0, abs=1e-15)

    def test_quarter_wave_phase_algebra(self):
        plus, minus = combine(1.0, 1.0j, InterferenceSetting(math.pi / 2.0))
        assert plus == pytest.approx(0.0, abs=1e-15)
        assert minus == pytest.approx(SQRT2, abs=1e-15)

    def test_nonfinite_inputs_rejected(self):
        with pytest.raises(NonFiniteInputError):
            combine(math.nan, 1.0, InterferenceSetting(0.0))
        with pytest.raises(NonFiniteInputError):
            combine(1.0, complex(0.0, math.inf), InterferenceSetting(0.0))

    def test_unitarity_over_random_inputs(self, rng):
        # 1e5 random input pairs and phases, vectorized through the same algebra
        alpha_t = rng.normal(size=100_000) + 1j * rng.normal(size=100_000)
        alpha_r = rng.normal(size=100_000) + 1j * rng.normal(size=100_000)
        theta = rng.uniform(-math.pi, math.pi, size=100_000)
        rotated = np.exp(1j * theta) * alpha_r
        plus = (alpha_t + rotated) / SQRT2
        minus = (alpha_t - rotated) / SQRT2
        power_in = np.abs(alpha_t) ** 2 + np.abs(alpha_r) ** 2
        power_out = np.abs(plus) ** 2 + np.abs(minus) ** 2
        np.testing.assert_allclose(power_out, power_in, rtol=1e-12)
        # spot-check the scalar implementation agrees with the vector algebra
        for k in range(0, 100_000, 9973):
            p, m = combine(alpha_t[k], alpha_r[k], InterferenceSetting(float(theta[k])))
            assert p == pytest.approx(plus[k], rel=1e-12)
            assert m == pytest.approx(minus[k], rel=1e-12)


class TestInterferenceDistance:
    def test_constructive_gain_is_sqrt2(self, q2):
        pair_t, pair_r = pointer_pairs(q2.cavity, q2.cavity.omega_r)
        value = interference_distance(pair_t, pair_r, InterferenceSetting(0.0))
        assert value == pytest.approx(SQRT2 * pair_t.distance, rel=1e-12)

    def test_destructive_port_vanishes(self, q2):
        pair_t, pair_r = pointer_pairs(q2.cavity, q2.cavity.omega_r)
        value = interference_distance(pair_t, pair_r, InterferenceSetting(math.pi))
        assert value == pytest.approx(0.0, abs=1e-15 * pair_t.distance)

    def test_q2_phase_gain(self, q2):
        # at the calibrated phase 0.11 the gain is sqrt(2)*cos(0.055)
        pair_t, pair_r = pointer_pairs(q2.cavity, q2.cavity.omega_r)
        value = interference_distance(pair_t, pair_r, InterferenceSetting(0.11))
        oracle = float(mp.sqrt(2) * mp.cos(mp.mpf("0.11") / 2))
        assert value / pair_t.distance == pytest.approx(oracle, rel=1e-12)
        assert value / pair_t.distance == pytest.approx(1.4121, abs=1e-4)

    def test_matches_combined_pair_distance_over_phase_grid(self, q2):
        pair_t, pair_r = pointer_pairs(q2.cavity, q2.cavity.omega_r + 0.4 * q2.cavity.kappa)
        for theta in np.linspace(-math.pi, math.pi, 101):
            setting = InterferenceSetting(float(theta))
            scaled = interference_distance(pair_t, pair_r, setting)
            plus_g, _ = combine(pair_t.alpha_g, pair_r.alpha_g, setting)
            plus_e, _ = combine(pair_t.alpha_e, pair_r.alpha_e, setting)
            end_to_end = abs(plus_e - plus_g)
            assert scaled == pytest.approx(end_to_end, rel=1e-10, abs=1e-12 * pair_t.distance)

    def test_minus_port_distance(self, q2):
        pair_t, pair_r = pointer_pairs(q2.cavity, q2.cavity.omega_r)
        setting = InterferenceSetting(0.8, port=Port.MINUS)
        scaled = interference_distance(pair_t, pair_r, setting)
        _, minus_g = combine(pair_t.alpha_g, pair_r.alpha_g, setting)
        _, minus_e = combine(pair_t.alpha_e, pair_r.alpha_e, setting)
        assert scaled == pytest.approx(abs(minus_e - minus_g), rel=1e-10)

    def test_pairs_from_different_drives_rejected(self, q2):
        pair_t, _ = pointer_pairs(q2.cavity, q2.cavity.omega_r)
        _, pair_r_other = pointer_pairs(q2.cavity, q2.cavity.omega_r + 2.0 * q2.cavity.kappa)
        with pytest.raises(InconsistentPairError):
            interference_distance(pair_t, pair_r_other, InterferenceSetting(0.0))

    def test_argmax_frequency_is_phase_independent(self, q2):
        c = q2.cavity
        grid = c.omega_r + np.linspace(-3, 3, 501) * c.kappa
        pairs = [pointer_pairs(c, float(w)) for w in grid]
        t_distances = np.array([pt.distance for pt, _ in pairs])
        reference = int(np.argmax(t_distances))
        for theta in (-2.5, -0.9, 0.11, 1.3, 2.9):
            setting = InterferenceSetting(theta)
            plus = np.array(
                [interference_distance(pt, pr, setting) for pt, pr in pairs]
            )
            assert int(np.argmax(plus)) == reference


class TestEnhancementFactor:
    def test_constructive_maximum(self):
        assert enhancement_factor(0.0) == pytest.approx(SQRT2, rel=1e-15)

    def test_destructive_zero(self):
        assert enhancement_factor(math.pi) == pytest.approx(0.0, abs=1e-15)

    def test_q2_phase_value(self):
        expected = float(mp.sqrt(2) * mp.cos(mp.mpf("0.11") / 2))
        assert enhancement_factor(0.11) == pytest.approx(expected, rel=1e-14)
        assert enhancement_factor(0.11) == pytest.approx(1.41207, abs=1e-5)

    def test_port_complementarity(self):
        for theta in np.linspace(-math.pi, math.pi, 181):
            plus = enhancement_factor(float(theta), Port.PLUS)
            minus = enhancement_factor(float(theta), Port.MINUS)
            assert plus * plus + minus * minus == pytest.approx(2.0, rel=1e-12)

    def test_matches_end_to_end_ratio(self, q2):
        c = q2.cavity
        grid = c.omega_r + np.linspace(-3, 3, 301) * c.kappa
        pairs = [pointer_pairs(c, float(w)) for w in grid]
        d_t = max(pt.distance for pt, _ in pairs)
        d_r = max(pr.distance for _, pr in pairs)
        for theta in (-1.42, 0.11, 0.70, 1.82, 2.60):
            setting = InterferenceSetting(theta)
            d_plus = max(interference_distance(pt, pr, setting) for pt, pr in pairs)
            ratio = 2.0 * d_plus / (d_t + d_r)
            assert ratio == pytest.approx(enhancement_factor(theta), rel=1e-10)


class TestPathPhaseFromSpacing:
    def test_zero_offset(self):
        assert path_phase_from_spacing(0.0, 0.05) == 0.0

    def test_quarter_wave_offset_gives_half_turn(self):
        wavelength = 0.0374
        assert path_phase_from_spacing(wavelength / 4.0, wavelength) == pytest.approx(math.pi)

    def test_half_wave_offset_wraps_to_zero(self):
        wavelength = 0.0374
        assert path_phase_from_spacing(wavelength / 2.0, wavelength) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_nonpositive_wavelength_rejected(self):
        with pytest.raises(InvalidParameterError):
            path_phase_from_spacing(0.001, 0.0)
        with pytest.raises(InvalidParameterError):
            path_phase_from_spacing(0.001, -1.0)
