import cmath
import math

import numpy as np
import pytest

from hangersim import (
    CalibrationRecord,
    CavityParams,
    DriveTone,
    QubitState,
    estimate_theta_rt,
    fit_chain_gains,
    loss_factors,
    measured_ratios,
    reconstruct_amplitudes,
    reflection,
    transmission,
)
from hangersim.calibration import (
    calibration_report_json,
    read_spectrum_csv,
    write_spectrum_csv,
    _forward_amplitudes,
)
from hangersim.exceptions import (
    DegenerateRecordError,
    GridError,
    GridMismatchError,
    InconsistentDataError,
    InconsistentDataWarning,
    InvalidParameterError,
    RankDeficiencyError,
)
from hangersim.kernels import numpy_backend

from conftest import random_cavity
from oracles import mp_rates_from_qualities, mp_reflection, mp_transmission

TABLE_THETAS = (-1.42, 0.11, 0.70, 1.82, 2.60)


def protocol_drive(c):
    return DriveTone(omega_d=c.omega_r - c.chi, alpha_in=1.0)


class TestLossFactors:
    def test_lossless_cavity_conserves_everything(self):
        c = CavityParams(omega_r=2 * math.pi * 6e9, kappa_c=2e6, kappa_i=0.0, chi=-3e5)
        loss = loss_factors(c)
        assert loss.r_g == 1.0
        assert loss.r_e == 1.0

    def test_balanced_rates_large_shift_limits(self):
        # kappa_c = kappa_i with 16 chi^2 >> kappa^2: r_g = 1/2, r_e -> 1
        c = CavityParams(omega_r=2 * math.pi * 6e9, kappa_c=1e5, kappa_i=1e5, chi=1e9)
        loss = loss_factors(c)
        assert loss.r_g == pytest.approx(0.5, rel=1e-12)
        assert loss.r_e == pytest.approx(1.0, abs=1e-6)

    def test_q2_values(self, q2):
        loss = loss_factors(q2.cavity)
        assert loss.r_g == pytest.approx(0.5438, abs=1e-3)
        assert loss.r_e == pytest.approx(0.6245, abs=1e-3)
        # frozen 40-digit evaluations of the closed forms
        assert loss.r_g == pytest.approx(0.54382670519261229, rel=1e-14)
        assert loss.r_e == pytest.approx(0.62448544586127799, rel=1e-14)

    def test_equals_energy_sum_oracle(self, rng):
        for _ in range(100):
            c = random_cavity(rng)
            d = protocol_drive(c)
            loss = loss_factors(c)
            for state, r in ((QubitState.GROUND, loss.r_g), (QubitState.EXCITED, loss.r_e)):
                energy = abs(transmission(c, state, d)) ** 2 + abs(reflection(c, state, d)) ** 2
                assert energy == pytest.approx(r, rel=1e-12)


class TestMeasuredRatios:
    def test_lossless_cavity_is_degenerate(self):
        c = CavityParams(omega_r=2 * math.pi * 6e9, kappa_c=2e6, kappa_i=0.0, chi=-3e5)
        with pytest.raises(DegenerateRecordError):
            measured_ratios(c, 1.0, 0.11)

    def test_vanishing_shift_gives_unit_ratios(self, q2):
        c = q2.cavity
        tiny = CavityParams(
            omega_r=c.omega_r, kappa_c=c.kappa_c, kappa_i=c.kappa_i, chi=c.kappa * 1e-9
        )
        rec = measured_ratios(tiny, 1.0, 0.5)
        assert abs(rec.gamma_t - 1.0) < 1e-6
        assert abs(rec.gamma_r - 1.0) < 1e-6

    def test_q2_ratios_against_response_oracle(self, q2):
        rec = measured_ratios(q2.cavity, 1.0, 0.11)
        rates = mp_rates_from_qualities(
            f_r_hz=7.9756e9, q_c=5704, q_i=10502, chi_hz=-0.25e6
        )
        probe = rates[0] - rates[3]
        gamma_t = mp_transmission(*rates, sigma_z=1, omega_d=probe) / mp_transmission(
            *rates, sigma_z=-1, omega_d=probe
        )
        gamma_r = mp_reflection(*rates, sigma_z=-1, omega_d=probe) / mp_reflection(
            *rates, sigma_z=1, omega_d=probe
        )
        assert rec.gamma_t == pytest.approx(
            complex(float(gamma_t.real), float(gamma_t.imag)), rel=1e-12
        )
        assert rec.gamma_r == pytest.approx(
            complex(float(gamma_r.real), float(gamma_r.imag)), rel=1e-12
        )
        assert rec.photon_number == 1.0

    def test_noise_streams_are_deterministic(self, q2):
        kwargs = dict(noise_sigma=0.01, repetitions=40, seed=7, stream=3)
        a = measured_ratios(q2.cavity, 1.0, 0.11, **kwargs)
        b = measured_ratios(q2.cavity, 1.0, 0.11, **kwargs)
        assert a.gamma_plus == b.gamma_plus
        c = measured_ratios(q2.cavity, 1.0, 0.11, noise_sigma=0.01, repetitions=40, seed=7, stream=4)
        assert c.gamma_plus != a.gamma_plus


class TestReconstruction:
    def test_zero_photons_gives_zero_amplitudes(self, q2):
        rec = measured_ratios(q2.cavity, 0.0, 0.11)
        assert reconstruct_amplitudes(rec) == (0.0, 0.0, 0.0, 0.0)

    def test_round_trip_against_forward_model(self, q2):
        rec = measured_ratios(q2.cavity, 1.0, 0.11)
        recovered = reconstruct_amplitudes(rec)
        forward = _forward_amplitudes(q2.cavity, 1.0)
        for ours, truth in zip(recovered, forward):
            assert ours == pytest.approx(truth, rel=1e-12)
        loss = rec.loss
        assert abs(recovered[0]) ** 2 + abs(recovered[2]) ** 2 == pytest.approx(
            loss.r_g * rec.photon_number, rel=1e-10
        )
        assert abs(recovered[1]) ** 2 + abs(recovered[3]) ** 2 == pytest.approx(
            loss.r_e * rec.photon_number, rel=1e-10
        )

    def test_energy_constraints_over_random_devices(self, rng):
        for _ in range(50):
            c = random_cavity(rng)
            theta = rng.uniform(-math.pi, math.pi)
            rec = measured_ratios(c, 1.0, theta)
            a_g_t, a_e_t, a_g_r, a_e_r = reconstruct_amplitudes(rec)
            assert abs(a_g_t) ** 2 + abs(a_g_r) ** 2 == pytest.approx(
                rec.loss.r_g, rel=1e-10
            )
            assert abs(a_e_t) ** 2 + abs(a_e_r) ** 2 == pytest.approx(
                rec.loss.r_e, rel=1e-10
            )

    def test_boundary_argument_rejected(self, q2):
        base = measured_ratios(q2.cavity, 1.0, 0.11)
        loss = base.loss
        # |gamma_r|^2 = r_g / r_e zeroes the first square-root argument
        gamma_r = math.sqrt(loss.r_g / loss.r_e)
        rec = CalibrationRecord(
            gamma_t=base.gamma_t,
            gamma_r=gamma_r,
            gamma_plus=base.gamma_plus,
            photon_number=1.0,
            loss=loss,
        )
        with pytest.raises(DegenerateRecordError):
            reconstruct_amplitudes(rec)

    def test_unit_product_record_rejected_at_construction(self, q2):
        loss = loss_factors(q2.cavity)
        with pytest.raises(DegenerateRecordError):
            CalibrationRecord(
                gamma_t=2.0, gamma_r=0.5, gamma_plus=1.0, photon_number=1.0, loss=loss
            )


class TestThetaEstimate:
    def test_q2_round_trip(self, q2):
        rec = measured_ratios(q2.cavity, 1.0, 0.11)
        est = estimate_theta_rt(rec)
        assert est.theta_rt == pytest.approx(0.11, abs=1e-9)
        assert est.consistency == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("theta", TABLE_THETAS)
    def test_bundled_device_phases_recover_exactly(self, theta, q2):
        rec = measured_ratios(q2.cavity, 1.0, theta)
        est = estimate_theta_rt(rec)
        assert est.theta_rt == pytest.approx(theta, abs=1e-9)
        assert est.consistency == pytest.approx(1.0, abs=1e-9)

    def test_round_trip_over_random_devices(self, rng):
        for _ in range(200):
            c = random_cavity(rng)
            theta = rng.uniform(-math.pi, math.pi)
            est = estimate_theta_rt(measured_ratios(c, 1.0, theta))
            assert est.theta_rt == pytest.approx(theta, abs=1e-8)
            assert est.consistency == pytest.approx(1.0, abs=1e-8)

    def test_gauge_shift_moves_estimate_by_injected_phase(self, q2):
        # an extra phase on the reflection line is indistinguishable from
        # extra splitter phase: the estimate shifts by exactly +phi
        theta = 0.3
        for phi in np.linspace(-2.5, 2.5, 11):
            est = estimate_theta_rt(measured_ratios(q2.cavity, 1.0, theta + phi))
            reference = estimate_theta_rt(measured_ratios(q2.cavity, 1.0, theta))
            expected = math.remainder(reference.theta_rt + phi, math.tau)
            assert est.theta_rt == pytest.approx(expected, abs=1e-9)

    def test_interference_ratio_equal_to_transmission_ratio_rejected(self, q2):
        base = measured_ratios(q2.cavity, 1.0, 0.11)
        rec = CalibrationRecord(
            gamma_t=base.gamma_t,
            gamma_r=base.gamma_r,
            gamma_plus=base.gamma_t,
            photon_number=1.0,
            loss=base.loss,
        )
        with pytest.raises(InconsistentDataError):
            estimate_theta_rt(rec)

    def test_mildly_inconsistent_data_warns(self, q2):
        base = measured_ratios(q2.cavity, 1.0, 0.11)
        rec = CalibrationRecord(
            gamma_t=base.gamma_t,
            gamma_r=base.gamma_r,
            gamma_plus=base.gamma_plus * 1.1,
            photon_number=1.0,
            loss=base.loss,
        )
        with pytest.warns(InconsistentDataWarning):
            estimate_theta_rt(rec)

    def test_noise_averaging_is_unbiased(self, q2):
        # 1%-noise measurements averaged over 40 repetitions: over 200 trials
        # the mean estimate stays within 3 standard errors of the truth
        theta = 0.11
        estimates = []
        for trial in range(200):
            rec = measured_ratios(
                q2.cavity,
                1.0,
                theta,
                noise_sigma=0.01,
                repetitions=40,
                seed=99,
                stream=trial,
            )
            estimates.append(estimate_theta_rt(rec).theta_rt)
        estimates = np.array(estimates)
        standard_error = estimates.std(ddof=1) / math.sqrt(estimates.size)
        assert abs(estimates.mean() - theta) < 3.0 * standard_error


class TestChainGainFit:
    def synth_spectra(self, q2, gain_t, gain_r, n_points=401, noise=0.0, seed=0):
        c = q2.cavity
        grid = c.omega_r + np.linspace(-4, 4, n_points) * c.kappa
        a_t = np.empty(n_points, dtype=complex)
        a_r = np.empty(n_points, dtype=complex)
        for k, omega in enumerate(grid):
            d = DriveTone(omega_d=float(omega))
            a_t[k] = transmission(c, QubitState.GROUND, d)
            a_r[k] = reflection(c, QubitState.GROUND, d)
        a_plus = gain_t * a_t + gain_r * a_r
        if noise > 0.0:
            z = numpy_backend.standard_normals(seed, 1, 6 * n_points)
            z = (z[0::2] + 1j * z[1::2]) / math.sqrt(2.0)
            a_t = a_t + noise * z[:n_points]
            a_r = a_r + noise * z[n_points : 2 * n_points]
            a_plus = a_plus + noise * z[2 * n_points :]
        freqs = grid / (2.0 * math.pi)
        return (
            list(zip(freqs, a_t)),
            list(zip(freqs, a_r)),
            list(zip(freqs, a_plus)),
        )

    def test_exact_recovery_without_noise(self, q2):
        spectra = self.synth_spectra(q2, 2.0, 3.0 + 1.0j)
        gains = fit_chain_gains(*spectra)
        assert gains.ratio_plus_t == pytest.approx(2.0, abs=1e-10)
        assert gains.ratio_plus_r == pytest.approx(3.0 + 1.0j, abs=1e-10)
        assert gains.residual < 1e-10

    def test_noisy_recovery_over_seeds(self, q2):
        errors_t, errors_r, residuals = [], [], []
        for seed in range(100):
            spectra = self.synth_spectra(q2, 2.0, 3.0 + 1.0j, noise=1e-3, seed=seed)
            gains = fit_chain_gains(*spectra)
            errors_t.append(abs(gains.ratio_plus_t - 2.0))
            errors_r.append(abs(gains.ratio_plus_r - (3.0 + 1.0j)))
            residuals.append(gains.residual)
        assert max(errors_t) < 1e-2
        assert max(errors_r) < 1e-2
        assert np.mean(residuals) == pytest.approx(1e-3, rel=0.25)

    def test_collinear_spectra_rejected(self):
        freqs = [1.0, 2.0]
        spectrum_t = [(f, 1.0 + 0.5j) for f in freqs]
        spectrum_r = [(f, 2.0 + 1.0j) for f in freqs]
        spectrum_p = [(f, 3.0 + 1.5j) for f in freqs]
        with pytest.raises(RankDeficiencyError):
            fit_chain_gains(spectrum_t, spectrum_r, spectrum_p)

    def test_short_grid_rejected(self):
        spectrum_t = [(1.0, 1.0 + 0.0j), (2.0, 0.5 + 0.5j)]
        spectrum_r = [(1.0, 0.3 - 0.2j), (2.0, 0.9 + 0.1j)]
        spectrum_p = [(1.0, 1.0ated := 0)] if False else [(1.0, 1.0), (2.0, 1.0)]
        with pytest.raises(GridError):
            fit_chain_gains(spectrum_t, spectrum_r, spectrum_p)

    def test_grid_mismatch_rejected(self, q2):
        spectra = self.synth_spectra(q2, 2.0, 3.0 + 1.0j, n_points=11)
        shifted = [(f + 1.0, a) for f, a in spectra[1]]
        with pytest.raises(GridMismatchError):
            fit_chain_gains(spectra[0], shifted, spectra[2])


class TestSpectrumIo:
    def test_csv_round_trip(self, q2, tmp_path):
        c = q2.cavity
        grid = c.omega_r + np.linspace(-2, 2, 11) * c.kappa
        spectrum = [
            (float(w / (2 * math.pi)), transmission(c, QubitState.GROUND, DriveTone(omega_d=float(w))))
            for w in grid
        ]
        path = tmp_path / "spectrum.csv"
        write_spectrum_csv(path, spectrum)
        loaded = read_spectrum_csv(path)
        assert len(loaded) == len(spectrum)
        for (f0, a0), (f1, a1) in zip(spectrum, loaded):
            assert f0 == f1
            assert a0 == a1

    def test_report_document_fields(self, q2):
        import json

        rec = measured_ratios(q2.cavity, 1.0, 0.11)
        est = estimate_theta_rt(rec)
        doc = json.loads(calibration_report_json(est))
        assert set(doc) == {"theta_rt_rad", "consistency", "gains", "residual"}
        assert doc["theta_rt_rad"] == pytest.approx(0.11, abs=1e-9)
