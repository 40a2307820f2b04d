"""Three-phase permanent-magnet synchronous machine in phase coordinates.

The machine is star-connected with one resistance, one self-inductance,
one permanent-magnet flux linkage per phase and one mutual inductance per
phase pair, so unbalanced windings are representable directly. Balanced
rotor-frame models are provided for reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .transforms import BETA, phase_angles


@dataclass(frozen=True)
class MachineParameters:
    """Per-phase machine parameters.

    Parameters
    ----------
    r_a, r_b, r_c : float
        Phase resistances (Ohm), positive.
    l_a, l_b, l_c : float
        Phase self-inductances (H), positive.
    m_ab, m_bc, m_ca : float
        Pairwise mutual inductances (H). They enter the inductance matrix
        with a negative sign, the usual convention for windings displaced
        by 2*pi/3.
    lam_a, lam_b, lam_c : float
        Permanent-magnet flux linkage amplitudes (Wb), nonnegative.
    pole_pairs : int
        Number of pole pairs, at least 1.
    beta : float
        Spatial angle between consecutive phases (rad). Must equal 2*pi/3;
        the field exists to make the three-phase assumption explicit.

    """

    r_a: float
    r_b: float
    r_c: float
    l_a: float
    l_b: float
    l_c: float
    m_ab: float
    m_bc: float
    m_ca: float
    lam_a: float
    lam_b: float
    lam_c: float
    pole_pairs: int
    beta: float = BETA

    def __post_init__(self):
        for name in ("r_a", "r_b", "r_c"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("l_a", "l_b", "l_c"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("lam_a", "lam_b", "lam_c"):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"{name} must be nonnegative")
        if not (isinstance(self.pole_pairs, int) and self.pole_pairs >= 1):
            raise ValueError("pole_pairs must be an integer >= 1")
        if self.beta != BETA:
            raise ValueError("beta must equal 2*pi/3 for a three-phase machine")
        try:
            np.linalg.cholesky(self.inductance_matrix())
        except np.linalg.LinAlgError:
            raise ValueError(
                "inductance matrix is not positive definite "
                "(check l_a, l_b, l_c, m_ab, m_bc, m_ca)"
            ) from None

    @classmethod
    def balanced(cls, r, l, m, lam, pole_pairs):
        """Build identical-phase parameters."""
        return cls(r, r, r, l, l, l, m, m, m, lam, lam, lam, pole_pairs)

    @classmethod
    def from_nominal(cls, r, l, m, lam, pole_pairs,
                     d_r=(0.0, 0.0, 0.0), d_l=(0.0, 0.0, 0.0),
                     d_m=(0.0, 0.0, 0.0), d_lam=(0.0, 0.0, 0.0)):
        """Build parameters as nominal values plus per-phase deviations.

        Deviation triples follow phase order (a, b, c); the mutual triple
        follows pair order (ab, bc, ca).
        """
        return cls(
            r + d_r[0], r + d_r[1], r + d_r[2],
            l + d_l[0], l + d_l[1], l + d_l[2],
            m + d_m[0], m + d_m[1], m + d_m[2],
            lam + d_lam[0], lam + d_lam[1], lam + d_lam[2],
            pole_pairs,
        )

    def resistances(self):
        return np.array([self.r_a, self.r_b, self.r_c])

    def pm_flux(self):
        return np.array([self.lam_a, self.lam_b, self.lam_c])

    def inductance_matrix(self):
        """Phase-frame inductance matrix with negative mutual coupling."""
        return np.array([
            [self.l_a, -self.m_ab, -self.m_ca],
            [-self.m_ab, self.l_b, -self.m_bc],
            [-self.m_ca, -self.m_bc, self.l_c],
        ])


@dataclass(frozen=True)
class ImbalanceDecomposition:
    """Split of per-phase parameters into nominal values plus deviations.

    The nominal value of each family is the smallest phase value, so every
    deviation is nonnegative and at least one deviation per family is zero.
    """

    nominal_r: float
    nominal_l: float
    nominal_m: float
    nominal_lam: float
    d_r: tuple[float, float, float]
    d_l: tuple[float, float, float]
    d_m: tuple[float, float, float]
    d_lam: tuple[float, float, float]

    def __post_init__(self):
        for name in ("d_r", "d_l", "d_m", "d_lam"):
            dev = getattr(self, name)
            if min(dev) != 0.0 or any(v < 0.0 for v in dev):
                raise ValueError(f"{name} must be nonnegative with a zero minimum")

    def to_parameters(self, pole_pairs) -> MachineParameters:
        """Reassemble the per-phase parameters."""
        return MachineParameters.from_nominal(
            self.nominal_r, self.nominal_l, self.nominal_m, self.nominal_lam,
            pole_pairs, self.d_r, self.d_l, self.d_m, self.d_lam,
        )


@dataclass(frozen=True)
class OperatingPoint:
    """Rotor-frame operating point.

    Holds the electrical angle and speed together with the dq0 currents and
    their time derivatives. Fields may be scalars or equally shaped arrays.
    """

    theta: float
    omega_e: float
    i_d: float
    i_q: float
    i_0: float = 0.0
    di_d: float = 0.0
    di_q: float = 0.0
    di_0: float = 0.0

    def __post_init__(self):
        for name in ("theta", "omega_e", "i_d", "i_q", "i_0",
                     "di_d", "di_q", "di_0"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"OperatingPoint.{name} must be finite")


def decompose(params: MachineParameters) -> ImbalanceDecomposition:
    """Split parameters into nominal values plus nonnegative deviations."""
    def split(values):
        nominal = min(values)
        return nominal, tuple(v - nominal for v in values)

    nom_r, d_r = split((params.r_a, params.r_b, params.r_c))
    nom_l, d_l = split((params.l_a, params.l_b, params.l_c))
    nom_m, d_m = split((params.m_ab, params.m_bc, params.m_ca))
    nom_lam, d_lam = split((params.lam_a, params.lam_b, params.lam_c))
    return ImbalanceDecomposition(nom_r, nom_l, nom_m, nom_lam,
                                  d_r, d_l, d_m, d_lam)


def _phase_frame(theta, *vectors):
    """Align phase angles and per-phase arrays on a shared layout.

    Phase is always axis 0. Sample axes come from theta and/or trailing
    axes of the vectors; 1-D vectors gain singleton sample axes so a
    constant (3,) current broadcasts against a theta sweep and a (3, n)
    current array broadcasts against scalar theta.
    """
    theta = np.asarray(theta, dtype=float)
    arrays = [np.asarray(v, dtype=float) for v in vectors]
    sample_ndim = max([theta.ndim] + [a.ndim - 1 for a in arrays])
    tail = (1,) * sample_ndim
    ang = theta - np.array([0.0, BETA, 2.0 * BETA]).reshape((3,) + tail)
    aligned = [a.reshape((3,) + tail) if a.ndim == 1 else a for a in arrays]
    return ang, aligned


def _per_phase(values, ang):
    # Reshape a (3,) parameter vector to broadcast against phase angles.
    return values.reshape((3,) + (1,) * (ang.ndim - 1))


def flux_linkages(params: MachineParameters, i_abc, theta):
    """Phase flux linkages at currents ``i_abc`` and electrical angle theta.

    ``i_abc`` has shape (3,) or (3, n); theta is a scalar or an (n,)
    array; either may carry the sample axis. The magnet contributes
    ``-lam_x cos(theta_x)`` per phase.
    """
    ang, (i_abc,) = _phase_frame(theta, i_abc)
    magnet = _per_phase(params.pm_flux(), ang) * np.cos(ang)
    return params.inductance_matrix() @ i_abc - magnet


def phase_voltages(params: MachineParameters, i_abc, di_abc, theta, omega_e):
    """Phase terminal voltages for given currents and current derivatives.

    Implements ``v = R i + L di/dt + e`` with the rotational back emf
    ``e_x = omega_e lam_x sin(theta_x)``.
    """
    ang, (i_abc, di_abc) = _phase_frame(theta, i_abc, di_abc)
    emf = omega_e * _per_phase(params.pm_flux(), ang) * np.sin(ang)
    resistive = _per_phase(params.resistances(), ang) * i_abc
    return resistive + params.inductance_matrix() @ di_abc + emf


def torque_abc(params: MachineParameters, i_abc, theta):
    """Electromagnetic torque from phase currents.

    Each phase contributes ``lam_x i_x sin(theta_x)``; the pole-pair count
    converts the electrical-angle derivative to a mechanical torque.
    """
    ang, (i_abc,) = _phase_frame(theta, i_abc)
    lam = _per_phase(params.pm_flux(), ang)
    return params.pole_pairs * np.sum(lam * i_abc * np.sin(ang), axis=0)


def ideal_dq_nonsalient(r, l_sum, lam_m, pole_pairs, op: OperatingPoint):
    """Balanced nonsalient rotor-frame model.

    Parameters
    ----------
    r : float
        Phase resistance (Ohm).
    l_sum : float
        Synchronous inductance, self plus mutual (H).
    lam_m : float
        Magnet flux linkage (Wb).
    pole_pairs : int
        Number of pole pairs.
    op : OperatingPoint
        Currents, derivatives and speed.

    Returns
    -------
    (v_d, v_q, t_e)
        Rotor-frame voltages and torque.

    """
    v_d = r * op.i_d + l_sum * (op.di_d + op.omega_e * op.i_q)
    v_q = r * op.i_q + l_sum * (op.di_q - op.omega_e * op.i_d) \
        + op.omega_e * lam_m
    t_e = 1.5 * pole_pairs * lam_m * op.i_q
    return v_d, v_q, t_e


def ideal_dq_salient(r, l_d, l_q, lam_m, pole_pairs, op: OperatingPoint):
    """Balanced salient rotor-frame model with distinct axis inductances.

    Returns ``(v_d, v_q, t_e)`` where the torque includes the reluctance
    term ``(l_q - l_d) i_d i_q``.
    """
    v_d = r * op.i_d + op.omega_e * l_q * op.i_q + l_d * op.di_d
    v_q = r * op.i_q - op.omega_e * l_d * op.i_d + l_q * op.di_q \
        + op.omega_e * lam_m
    t_e = 1.5 * pole_pairs * (lam_m + (l_q - l_d) * op.i_d) * op.i_q
    return v_d, v_q, t_e


def zero_sequence_voltage(r, l_zero, i_0, di_0):
    """Zero-sequence voltage ``v_0 = r i_0 + (l - 2m) di_0/dt``."""
    return r * i_0 + l_zero * di_0


def synchronous_inductance(params: MachineParameters) -> float:
    """Nominal synchronous inductance l + m of the balanced part."""
    dec = decompose(params)
    return dec.nominal_l + dec.nominal_m


def electrical_time_constant(params: MachineParameters) -> float:
    """Nominal stator time constant (l + m) / r."""
    dec = decompose(params)
    return (dec.nominal_l + dec.nominal_m) / dec.nominal_r


def transient_window(params: MachineParameters, omega_e) -> float:
    """Settling window for voltage-fed runs.

    Covers five electrical time constants and, when rotating, at least two
    electrical periods so that periodic averages are meaningful.
    """
    window = 5.0 * electrical_time_constant(params)
    if omega_e != 0.0:
        window = max(window, 2.0 * (2.0 * math.pi / abs(omega_e)))
    return window
