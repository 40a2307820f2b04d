"""Amplitude-invariant transforms between phase (abc) and rotor (dq0) frames.

The rotor frame is locked to the electrical angle theta. Projections use
cos for the d axis and sin for the q axis, so a balanced three-phase set
``x_a = X cos(theta)`` maps to ``(X, 0, 0)``. Components may be scalars or
equally shaped arrays; everything broadcasts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Electrical angle between consecutive phases.
BETA = 2.0 * np.pi / 3.0


@dataclass(frozen=True)
class AbcVector:
    """Per-phase quantities (voltage, current, flux linkage)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"AbcVector.{name} must be finite")

    def as_array(self):
        """Stack the components into an array of shape (3, ...)."""
        return np.stack(np.broadcast_arrays(
            np.asarray(self.a, dtype=float),
            np.asarray(self.b, dtype=float),
            np.asarray(self.c, dtype=float),
        ))


@dataclass(frozen=True)
class Dq0Vector:
    """Rotor-frame quantities: direct, quadrature, zero sequence."""

    d: float
    q: float
    zero: float

    def __post_init__(self):
        for name in ("d", "q", "zero"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"Dq0Vector.{name} must be finite")


def phase_angles(theta):
    """Electrical angles of the three phases: theta - (0, beta, 2*beta).

    Returns an array of shape (3,) for scalar theta and (3, ...) otherwise.
    """
    th = np.asarray(theta, dtype=float)
    shift = np.array([0.0, BETA, 2.0 * BETA]).reshape((3,) + (1,) * th.ndim)
    return th - shift


def park_forward(h_abc: AbcVector, theta) -> Dq0Vector:
    """Project per-phase quantities onto the rotor frame at angle theta."""
    ang = phase_angles(theta)
    cos_x = np.cos(ang)
    sin_x = np.sin(ang)
    d = (2.0 / 3.0) * (h_abc.a * cos_x[0] + h_abc.b * cos_x[1] + h_abc.c * cos_x[2])
    q = (2.0 / 3.0) * (h_abc.a * sin_x[0] + h_abc.b * sin_x[1] + h_abc.c * sin_x[2])
    zero = (h_abc.a + h_abc.b + h_abc.c) / 3.0
    return Dq0Vector(d, q, zero)


def park_inverse(h_dq0: Dq0Vector, theta) -> AbcVector:
    """Map rotor-frame quantities back to the three phases at angle theta."""
    ang = phase_angles(theta)
    cos_x = np.cos(ang)
    sin_x = np.sin(ang)
    a = h_dq0.d * cos_x[0] + h_dq0.q * sin_x[0] + h_dq0.zero
    b = h_dq0.d * cos_x[1] + h_dq0.q * sin_x[1] + h_dq0.zero
    c = h_dq0.d * cos_x[2] + h_dq0.q * sin_x[2] + h_dq0.zero
    return AbcVector(a, b, c)
