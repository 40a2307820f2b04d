"""Closed-form rotor-frame voltage signatures of per-phase imbalance.

A deviation triple (one value per phase, or per phase pair for mutual
inductances) maps to a DC shift plus a second-harmonic (2theta) component
in the dq frame. Each family contributes additively on top of the balanced
model:

    v_d = v_d_ideal + dv_d(resistance) + dv_d(flux) + dv_d(inductance)

and likewise for the q axis. The coefficient of the 2theta component is a
phasor (k, phi) obtained from the deviation triple alone; the delta
operations evaluate the full voltage contribution at an operating point.

Conventions. For a triple (d_a, d_b, d_c),

    k   = |C| / 3,   C = d_a - (d_b + d_c)/2 + j*(sqrt(3)/2)*(d_b - d_c)
    phi = arg(C)

so the d-axis resistance contribution reads k*cos(2*theta + phi)*i_d + ...
A common offset on the triple leaves (k, phi) unchanged; a cyclic phase
relabeling a->b->c->a advances phi by 2*pi/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .machine import OperatingPoint

# Deviations smaller than this fraction of the triple's scale count as
# balanced and get the deterministic phase phi = 0.
_DEGENERATE_REL = 1e-15


@dataclass(frozen=True)
class SecondHarmonicPhasor:
    """Magnitude and phase of a 2theta component."""

    k: float
    phi: float

    def __post_init__(self):
        if not (np.isfinite(self.k) and self.k >= 0.0):
            raise ValueError("k must be finite and nonnegative")
        if self.phi == -math.pi:
            # atan2 may return either branch-cut endpoint; pin one.
            object.__setattr__(self, "phi", math.pi)
        if not (-math.pi < self.phi <= math.pi):
            raise ValueError("phi must lie in (-pi, pi]")

    def as_complex(self) -> complex:
        return self.k * complex(math.cos(self.phi), math.sin(self.phi))


@dataclass(frozen=True)
class DqVoltageDelta:
    """Rotor-frame voltage contribution of one imbalance family."""

    dv_d: float
    dv_q: float

    def __post_init__(self):
        if not (np.all(np.isfinite(self.dv_d)) and np.all(np.isfinite(self.dv_q))):
            raise ValueError("voltage deltas must be finite")


def _spread_phasor(triple):
    """(k, phi) of a deviation triple; phi = 0 when the spread vanishes."""
    d_a, d_b, d_c = (float(v) for v in triple)
    re = d_a - 0.5 * (d_b + d_c)
    im = 0.5 * math.sqrt(3.0) * (d_b - d_c)
    k = math.hypot(re, im) / 3.0
    scale = max(abs(d_a), abs(d_b), abs(d_c))
    if k <= _DEGENERATE_REL * scale:
        return k, 0.0
    return k, math.atan2(im, re)


def resistance_coeffs(d_r) -> SecondHarmonicPhasor:
    """Second-harmonic phasor of a resistance deviation triple (Ohm)."""
    return SecondHarmonicPhasor(*_spread_phasor(d_r))


def flux_coeffs(d_lam) -> SecondHarmonicPhasor:
    """Second-harmonic phasor of a PM flux deviation triple (Wb)."""
    return SecondHarmonicPhasor(*_spread_phasor(d_lam))


def inductance_coeffs(d_l, d_m):
    """Second-harmonic phasors of self and mutual inductance deviations.

    ``d_l`` is per phase (a, b, c); ``d_m`` is per pair (ab, bc, ca). The
    mutual phasor uses the pair opposite each phase, so the triple is
    rotated to (bc, ca, ab) before the common algebra, and its magnitude
    carries a factor 2 because each mutual couples two phases.
    """
    k_l, phi_l = _spread_phasor(d_l)
    k_m, phi_m = _spread_phasor((d_m[1], d_m[2], d_m[0]))
    return (SecondHarmonicPhasor(k_l, phi_l),
            SecondHarmonicPhasor(2.0 * k_m, phi_m))


def resistance_delta(d_r, op: OperatingPoint) -> DqVoltageDelta:
    """Rotor-frame voltage contribution of resistance imbalance.

    Bilinear in the deviations and the currents: a DC term (sum/3) on each
    axis, 2theta terms through the phasor, and a 1theta coupling to the
    zero-sequence current.
    """
    s = float(sum(d_r))
    ph = resistance_coeffs(d_r)
    k, g = ph.k, ph.phi
    th = op.theta
    cos2 = np.cos(2.0 * th + g)
    sin2 = np.sin(2.0 * th + g)
    dv_d = ((s / 3.0 + k * cos2) * op.i_d + k * sin2 * op.i_q
            + 2.0 * k * np.cos(th - g) * op.i_0)
    dv_q = (k * sin2 * op.i_d + (s / 3.0 - k * cos2) * op.i_q
            + 2.0 * k * np.sin(th - g) * op.i_0)
    return DqVoltageDelta(dv_d, dv_q)


def flux_delta(d_lam, omega_e, theta) -> DqVoltageDelta:
    """Rotor-frame voltage contribution of PM flux imbalance.

    Every term scales with the electrical speed: the imbalance rides on
    the back emf.
    """
    s = float(sum(d_lam))
    ph = flux_coeffs(d_lam)
    k, g = ph.k, ph.phi
    dv_d = omega_e * k * np.sin(2.0 * theta + g)
    dv_q = omega_e * (s / 3.0 - k * np.cos(2.0 * theta + g))
    return DqVoltageDelta(dv_d, dv_q)


def inductance_delta(d_l, d_m, op: OperatingPoint) -> DqVoltageDelta:
    """Rotor-frame voltage contribution of inductance imbalance.

    Non-salient machine: the deviation inductances are position
    independent, so the contribution is bilinear in the deviations and
    the flux-derivative pair (di_d + omega_e i_q, di_q - omega_e i_d),
    plus zero-sequence derivative coupling.
    """
    s = float(sum(d_l)) + float(sum(d_m))
    ph_l, ph_m = inductance_coeffs(d_l, d_m)
    k_l, g_l = ph_l.k, ph_l.phi
    k_m, g_m = ph_m.k, ph_m.phi
    th = op.theta
    cos_l = k_l * np.cos(2.0 * th + g_l)
    sin_l = k_l * np.sin(2.0 * th + g_l)
    cos_m = k_m * np.cos(2.0 * th + g_m)
    sin_m = k_m * np.sin(2.0 * th + g_m)
    g_d = op.di_d + op.omega_e * op.i_q
    g_q = op.di_q - op.omega_e * op.i_d
    n_dd = s / 3.0 + cos_l - cos_m
    n_dq = sin_l - sin_m
    n_qq = s / 3.0 - cos_l + cos_m
    n_d0 = 2.0 * k_l * np.cos(th - g_l) + k_m * np.cos(th - g_m)
    n_q0 = 2.0 * k_l * np.sin(th - g_l) + k_m * np.sin(th - g_m)
    dv_d = n_dd * g_d + n_dq * g_q + n_d0 * op.di_0
    dv_q = n_dq * g_d + n_qq * g_q + n_q0 * op.di_0
    return DqVoltageDelta(dv_d, dv_q)


def compose_total(ideal, d_res: DqVoltageDelta, d_flux: DqVoltageDelta,
                  d_ind: DqVoltageDelta):
    """Total (v_d, v_q): balanced model plus the three family deltas."""
    v_d = ideal[0] + d_res.dv_d + d_flux.dv_d + d_ind.dv_d
    v_q = ideal[1] + d_res.dv_q + d_flux.dv_q + d_ind.dv_q
    return v_d, v_q
