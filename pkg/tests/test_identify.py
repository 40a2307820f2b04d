import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pmimb import (
    IdentifiabilityError,
    IdentificationResult,
    InputError,
    OperatingPoint,
    SecondHarmonicPhasor,
    fit_flux,
    fit_resistance,
    flux_coeffs,
    flux_delta,
    invert_phasor,
    resistance_coeffs,
    resistance_delta,
)

GRID = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)

dev = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestInvertPhasor:
    def test_reference_triple_shifts_to_min_form(self):
        triple = (0.03, 0.01, 0.02)
        deviations, shift = invert_phasor(sum(triple),
                                          resistance_coeffs(triple))
        assert np.allclose(deviations, (0.02, 0.0, 0.01), atol=1e-15)
        assert shift == pytest.approx(0.01, abs=1e-15)

    def test_min_form_input_needs_no_shift(self):
        triple = (0.02, 0.0, 0.01)
        deviations, shift = invert_phasor(sum(triple),
                                          resistance_coeffs(triple))
        assert np.allclose(deviations, triple, atol=1e-15)
        assert shift == pytest.approx(0.0, abs=1e-15)

    def test_zero_phasor_spreads_sum_evenly(self):
        deviations, shift = invert_phasor(0.06, SecondHarmonicPhasor(0.0, 0.0))
        assert np.allclose(deviations, 0.0, atol=1e-18)
        assert shift == pytest.approx(0.02, abs=1e-15)

    @given(da=dev, db=dev, dc=dev)
    def test_roundtrip_recovers_any_triple(self, da, db, dc):
        triple = (da, db, dc)
        deviations, shift = invert_phasor(sum(triple), flux_coeffs(triple))
        tol = 1e-12 * (1.0 + da + db + dc)
        assert min(deviations) == pytest.approx(0.0, abs=tol)
        assert np.allclose(deviations + shift, triple, atol=tol)


class TestResultValidation:
    def test_rejects_unknown_family(self):
        with pytest.raises(ValueError, match="family"):
            IdentificationResult("inductance", 0.0,
                                 SecondHarmonicPhasor(0.0, 0.0),
                                 (0.0, 0.0, 0.0), 0.0)

    def test_rejects_negative_residual(self):
        with pytest.raises(ValueError):
            IdentificationResult("flux", 0.0,
                                 SecondHarmonicPhasor(0.0, 0.0),
                                 (0.0, 0.0, 0.0), -1.0)


def resistance_residuals(d_r, i_d, i_q, theta=GRID):
    op = OperatingPoint(theta=theta, omega_e=0.0, i_d=i_d, i_q=i_q)
    delta = resistance_delta(d_r, op)
    ones = np.ones_like(theta)
    return delta.dv_d * ones, delta.dv_q * ones


def flux_residuals(d_lam, omega_e, theta=GRID):
    delta = flux_delta(d_lam, omega_e, theta)
    ones = np.ones_like(theta)
    return delta.dv_d * ones, delta.dv_q * ones


class TestFitResistance:
    def test_single_phase_deviation_roundtrip(self):
        d_r = (0.02, 0.0, 0.0)
        dv_d, dv_q = resistance_residuals(d_r, i_d=2.0, i_q=5.0)
        out = fit_resistance(dv_d, dv_q, 2.0, 5.0, GRID)
        assert out.family == "resistance"
        assert np.allclose(out.per_phase, d_r, atol=1e-10)
        assert out.s == pytest.approx(0.02, abs=1e-10)
        assert out.fit_residual_rms < 1e-12

    def test_general_triple_roundtrip(self):
        d_r = (0.03, 0.01, 0.02)
        dv_d, dv_q = resistance_residuals(d_r, i_d=-3.0, i_q=7.0)
        out = fit_resistance(dv_d, dv_q, -3.0, 7.0, GRID)
        assert np.allclose(out.per_phase, d_r, atol=1e-6)
        ref = resistance_coeffs(d_r)
        assert out.phasor.k == pytest.approx(ref.k, rel=1e-9)
        assert out.phasor.phi == pytest.approx(ref.phi, abs=1e-9)

    def test_sum_matches_per_phase_exactly(self):
        d_r = (0.011, 0.004, 0.0)
        dv_d, dv_q = resistance_residuals(d_r, i_d=1.0, i_q=4.0)
        out = fit_resistance(dv_d, dv_q, 1.0, 4.0, GRID)
        assert out.s == sum(out.per_phase)

    def test_single_axis_current_suffices(self):
        d_r = (0.0, 0.015, 0.005)
        dv_d, dv_q = resistance_residuals(d_r, i_d=0.0, i_q=6.0)
        out = fit_resistance(dv_d, dv_q, 0.0, 6.0, GRID)
        assert np.allclose(out.per_phase, d_r, atol=1e-9)

    def test_zero_current_is_unidentifiable(self):
        with pytest.raises(IdentifiabilityError, match="zero current"):
            fit_resistance(np.zeros_like(GRID), np.zeros_like(GRID),
                           0.0, 0.0, GRID)

    def test_insufficient_coverage_rejected(self):
        short = np.linspace(0.0, 2.0, 256)
        with pytest.raises(InputError, match="period"):
            fit_resistance(np.zeros(256), np.zeros(256), 1.0, 0.0, short)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InputError, match="shape"):
            fit_resistance(np.zeros(10), np.zeros(11), 1.0, 0.0, GRID)

    def test_out_of_family_content_lands_in_residual(self):
        d_r = (0.02, 0.0, 0.01)
        dv_d, dv_q = resistance_residuals(d_r, i_d=2.0, i_q=3.0)
        contamination = 0.05 * np.cos(3.0 * GRID)
        out = fit_resistance(dv_d + contamination, dv_q, 2.0, 3.0, GRID)
        # 3theta is orthogonal to the basis on a full period: the fit
        # stays clean and the residual carries the contamination.
        assert np.allclose(out.per_phase, d_r, atol=1e-6)
        want_rms = 0.05 / math.sqrt(2.0) / math.sqrt(2.0)
        assert out.fit_residual_rms == pytest.approx(want_rms, rel=1e-3)


class TestFitFlux:
    def test_single_phase_deviation_roundtrip(self):
        d_lam = (0.003, 0.0, 0.0)
        dv_d, dv_q = flux_residuals(d_lam, omega_e=250.0)
        out = fit_flux(dv_d, dv_q, 250.0, GRID)
        assert out.family == "flux"
        assert np.allclose(out.per_phase, d_lam, atol=1e-10)
        assert out.fit_residual_rms < 1e-10

    def test_general_triple_roundtrip(self):
        d_lam = (0.004, 0.001, 0.002)
        dv_d, dv_q = flux_residuals(d_lam, omega_e=-180.0)
        out = fit_flux(dv_d, dv_q, -180.0, GRID)
        assert np.allclose(out.per_phase, d_lam, atol=1e-6)

    def test_zero_speed_is_unidentifiable(self):
        with pytest.raises(IdentifiabilityError, match="zero speed"):
            fit_flux(np.zeros_like(GRID), np.zeros_like(GRID), 0.0, GRID)

    def test_recovery_independent_of_speed_magnitude(self):
        d_lam = (0.002, 0.0005, 0.0)
        for omega in (50.0, 500.0, 5000.0):
            dv_d, dv_q = flux_residuals(d_lam, omega_e=omega)
            out = fit_flux(dv_d, dv_q, omega, GRID)
            assert np.allclose(out.per_phase, d_lam, atol=1e-9)


def design_matrix_resistance(i_d, i_q, theta):
    cos2, sin2 = np.cos(2 * theta), np.sin(2 * theta)
    top = np.column_stack([np.full_like(theta, i_d / 3.0),
                           i_d * cos2 + i_q * sin2,
                           -i_d * sin2 + i_q * cos2])
    bottom = np.column_stack([np.full_like(theta, i_q / 3.0),
                              i_d * sin2 - i_q * cos2,
                              i_d * cos2 + i_q * sin2])
    return np.vstack([top, bottom])


class TestNoiseRobustness:
    # per_phase is linear in the fitted coefficients:
    # (s/3 + 2a, s/3 - a + sqrt(3) b, s/3 - a - sqrt(3) b)
    COEFF_TO_PHASE = np.array([
        [1.0 / 3.0, 2.0, 0.0],
        [1.0 / 3.0, -1.0, math.sqrt(3.0)],
        [1.0 / 3.0, -1.0, -math.sqrt(3.0)],
    ])

    def test_monte_carlo_recovery_within_predicted_spread(self, rng):
        d_r = (0.02, 0.005, 0.0)
        i_d, i_q = 2.0, 6.0
        dv_d, dv_q = resistance_residuals(d_r, i_d, i_q)
        signal_rms = math.sqrt(np.mean(np.concatenate([dv_d, dv_q]) ** 2))
        sigma = 0.01 * signal_rms
        design = design_matrix_resistance(i_d, i_q, GRID)
        cov_coeff = sigma ** 2 * np.linalg.inv(design.T @ design)
        cov_phase = self.COEFF_TO_PHASE @ cov_coeff @ self.COEFF_TO_PHASE.T
        bound = 5.0 * np.sqrt(np.diag(cov_phase))
        errors = []
        for _ in range(100):
            noisy_d = dv_d + rng.normal(0.0, sigma, GRID.size)
            noisy_q = dv_q + rng.normal(0.0, sigma, GRID.size)
            out = fit_resistance(noisy_d, noisy_q, i_d, i_q, GRID)
            err = np.array(out.per_phase) - np.array(d_r)
            errors.append(err)
            assert np.all(np.abs(err) < bound)
        spread = np.std(np.array(errors), axis=0)
        predicted = np.sqrt(np.diag(cov_phase))
        assert np.all(spread < 1.6 * predicted)
        assert np.all(spread > 0.4 * predicted)

    def test_noisy_fit_reports_noise_floor(self, rng):
        d_lam = (0.002, 0.0, 0.001)
        dv_d, dv_q = flux_residuals(d_lam, omega_e=300.0)
        sigma = 0.01 * math.sqrt(np.mean(dv_q ** 2))
        out = fit_flux(dv_d + rng.normal(0, sigma, GRID.size),
                       dv_q + rng.normal(0, sigma, GRID.size),
                       300.0, GRID)
        assert out.fit_residual_rms == pytest.approx(sigma, rel=0.2)
