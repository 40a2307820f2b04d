"""Inverse problem: per-phase deviations from rotor-frame voltage residuals.

Given the difference between measured dq voltages and the balanced model
prediction, a linear least-squares fit recovers the deviation sum and the
second-harmonic phasor of one imbalance family, and the phasor algebra is
inverted back to per-phase deviations in min-as-nominal form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IdentifiabilityError, InputError
from .harmonics import check_angle_coverage
from .imbalance import SecondHarmonicPhasor

_FAMILIES = ("resistance", "flux")


@dataclass(frozen=True)
class IdentificationResult:
    """Fitted imbalance description for one parameter family.

    ``per_phase`` holds the deviations against the nominal model the
    residuals were computed from; ``s`` is their sum and ``phasor`` their
    second-harmonic coefficient, so the forward coefficient map
    reproduces (s, phasor) exactly. When the true deviations are in
    min-as-nominal form (smallest is zero), a noise-free fit returns
    them unchanged; ``invert_phasor`` canonicalizes otherwise.
    """

    family: str
    s: float
    phasor: SecondHarmonicPhasor
    per_phase: tuple[float, float, float]
    fit_residual_rms: float

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"family must be one of {_FAMILIES}")
        if not all(np.isfinite(v) for v in self.per_phase):
            raise ValueError("per_phase must be finite")
        if not (np.isfinite(self.fit_residual_rms)
                and self.fit_residual_rms >= 0.0):
            raise ValueError("fit_residual_rms must be finite and nonnegative")


def _raw_inverse(s, phasor: SecondHarmonicPhasor):
    # Unique triple with the given sum and second-harmonic phasor.
    re = phasor.k * np.cos(phasor.phi)
    im = phasor.k * np.sin(phasor.phi)
    third = s / 3.0
    return np.array([
        third + 2.0 * re,
        third - re + np.sqrt(3.0) * im,
        third - re - np.sqrt(3.0) * im,
    ])


def invert_phasor(s, phasor: SecondHarmonicPhasor):
    """Per-phase deviations matching a sum and second-harmonic phasor.

    Fixing the sum makes the inverse of the coefficient map unique. The
    solution is then shifted so its smallest entry is zero (min-as-nominal
    form) and the applied shift is returned alongside: the unshifted
    triple is ``deviations + shift``, and a caller tracking an assumed
    nominal value should add ``shift`` to it.

    Returns
    -------
    (deviations, shift)
        ``deviations`` is a 3-array with min 0; ``shift`` is what was
        subtracted from each entry.

    """
    raw = _raw_inverse(s, phasor)
    shift = float(raw.min())
    return raw - shift, shift


def _stack_inputs(dv_d, dv_q, theta):
    dv_d = np.asarray(dv_d, dtype=float)
    dv_q = np.asarray(dv_q, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if not (dv_d.shape == dv_q.shape == theta.shape):
        raise InputError("dv_d, dv_q and theta must have identical shapes")
    check_angle_coverage(theta)
    return dv_d, dv_q, theta


def _finish(family, design, target):
    coeffs, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < 3:
        raise IdentifiabilityError(
            f"{family} fit is rank deficient (rank {rank} of 3); "
            "the operating point does not excite all coefficients"
        )
    s_fit, a, b = (float(v) for v in coeffs)
    k = float(np.hypot(a, b))
    phi = float(np.arctan2(b, a)) if k > 0.0 else 0.0
    phasor = SecondHarmonicPhasor(k, phi)
    per_phase = _raw_inverse(s_fit, phasor)
    residual = target - design @ coeffs
    return IdentificationResult(
        family=family,
        s=float(per_phase.sum()),
        phasor=phasor,
        per_phase=tuple(float(v) for v in per_phase),
        fit_residual_rms=float(np.sqrt(np.mean(residual ** 2))),
    )


def fit_resistance(dv_d, dv_q, i_d, i_q, theta) -> IdentificationResult:
    """Fit resistance deviations to dq voltage residuals.

    Parameters
    ----------
    dv_d, dv_q : array
        Measured voltage minus balanced-model voltage, per axis (V).
    i_d, i_q : float
        The constant rotor-frame currents during the measurement (A);
        zero-sequence current is assumed absent.
    theta : array
        Electrical angle per sample (rad), covering at least one period.

    The model is linear in (sum, k cos phi, k sin phi); both axes are
    fitted jointly.

    """
    dv_d, dv_q, theta = _stack_inputs(dv_d, dv_q, theta)
    i_d = float(i_d)
    i_q = float(i_q)
    if i_d == 0.0 and i_q == 0.0:
        raise IdentifiabilityError(
            "resistance imbalance is invisible at zero current"
        )
    cos2 = np.cos(2.0 * theta)
    sin2 = np.sin(2.0 * theta)
    # dv_d = s/3 i_d + [cos2 i_d + sin2 i_q] kcos + [-sin2 i_d + cos2 i_q] ksin
    # dv_q = s/3 i_q + [sin2 i_d - cos2 i_q] kcos + [ cos2 i_d + sin2 i_q] ksin
    design = np.block([
        [np.full_like(theta, i_d / 3.0)[:, None],
         (i_d * cos2 + i_q * sin2)[:, None],
         (-i_d * sin2 + i_q * cos2)[:, None]],
        [np.full_like(theta, i_q / 3.0)[:, None],
         (i_d * sin2 - i_q * cos2)[:, None],
         (i_d * cos2 + i_q * sin2)[:, None]],
    ])
    target = np.concatenate([dv_d, dv_q])
    return _finish("resistance", design, target)


def fit_flux(dv_d, dv_q, omega_e, theta) -> IdentificationResult:
    """Fit PM flux deviations to dq voltage residuals.

    Requires nonzero electrical speed: the flux signature rides on the
    back emf and vanishes at standstill.
    """
    dv_d, dv_q, theta = _stack_inputs(dv_d, dv_q, theta)
    omega_e = float(omega_e)
    if omega_e == 0.0:
        raise IdentifiabilityError(
            "flux imbalance is invisible at zero speed"
        )
    cos2 = np.cos(2.0 * theta)
    sin2 = np.sin(2.0 * theta)
    zeros = np.zeros_like(theta)
    # dv_d = omega [sin2 kcos + cos2 ksin]
    # dv_q = omega [s/3 - cos2 kcos + sin2 ksin]
    design = np.block([
        [zeros[:, None],
         (omega_e * sin2)[:, None],
         (omega_e * cos2)[:, None]],
        [np.full_like(theta, omega_e / 3.0)[:, None],
         (-omega_e * cos2)[:, None],
         (omega_e * sin2)[:, None]],
    ])
    target = np.concatenate([dv_d, dv_q])
    return _finish("flux", design, target)
