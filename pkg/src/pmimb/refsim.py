"""Brute-force phase-frame reference simulation.

Two drive modes. Current-fed evaluates the machine equations exactly at
prescribed rotor-frame currents (no integration error, the comparison
basis for the closed-form models). Voltage-fed integrates the winding
dynamics with fixed-step RK4 under constant rotor-frame voltage commands
and an isolated star point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SimulationError
from .harmonics import demodulate
from .imbalance import flux_delta, inductance_delta, resistance_delta
from .machine import (MachineParameters, OperatingPoint, decompose,
                      ideal_dq_nonsalient, phase_voltages, torque_abc,
                      transient_window)
from .transforms import (AbcVector, Dq0Vector, park_forward, park_inverse,
                         phase_angles)

# Resolution guard: at least this many steps per electrical period.
MIN_STEPS_PER_PERIOD = 200

_MODES = ("current-fed", "voltage-fed")
_NEUTRALS = ("isolated", "driven")


@dataclass(frozen=True)
class SimConfig:
    """Time-stepping settings.

    The driven-neutral option is reserved; only the isolated star point
    is implemented.
    """

    dt: float = 1e-6
    duration: float = 0.05
    mode: str = "current-fed"
    neutral: str = "isolated"

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ConfigError("dt must be positive")
        if not (np.isfinite(self.duration) and self.duration >= self.dt):
            raise ConfigError("duration must be at least one step")
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}")
        if self.neutral not in _NEUTRALS:
            raise ConfigError(f"neutral must be one of {_NEUTRALS}")
        if self.neutral == "driven":
            raise ConfigError("driven neutral is not implemented")


@dataclass
class TimeSeries:
    """Uniformly sampled named channels with a shared time base."""

    t: np.ndarray
    theta: np.ndarray
    channels: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        if self.t.ndim != 1 or self.t.size < 2:
            raise ValueError("t must be 1-D with at least 2 samples")
        if self.theta.shape != self.t.shape:
            raise ValueError("theta must match t in shape")
        steps = np.diff(self.t)
        if not np.all(steps > 0.0):
            raise ValueError("t must be strictly increasing")
        if steps.max() - steps.min() > 1e-9 * steps.max():
            raise ValueError("t must be uniformly sampled")
        for name, data in self.channels.items():
            data = np.asarray(data, dtype=float)
            if data.shape != self.t.shape:
                raise ValueError(f"channel {name!r} must match t in shape")
            self.channels[name] = data

    @property
    def names(self):
        return list(self.channels)

    def channel(self, name):
        return self.channels[name]


def _check_resolution(cfg: SimConfig, omega_e):
    if omega_e != 0.0:
        period = 2.0 * math.pi / abs(omega_e)
        if cfg.dt > period / MIN_STEPS_PER_PERIOD:
            raise ConfigError(
                f"dt = {cfg.dt:g} s exceeds 1/{MIN_STEPS_PER_PERIOD} of the "
                f"electrical period {period:g} s"
            )


def _sample_grid(cfg: SimConfig, omega_e):
    n_steps = int(round(cfg.duration / cfg.dt))
    t = np.arange(n_steps + 1) * cfg.dt
    return t, omega_e * t


def _assemble(params, t, theta, i_abc, v_abc, extra=None):
    i_dq0 = park_forward(AbcVector(*i_abc), theta)
    v_dq0 = park_forward(AbcVector(*v_abc), theta)
    channels = {
        "v_a": v_abc[0], "v_b": v_abc[1], "v_c": v_abc[2],
        "i_a": i_abc[0], "i_b": i_abc[1], "i_c": i_abc[2],
        "v_d": v_dq0.d, "v_q": v_dq0.q, "v_0": v_dq0.zero,
        "i_d": i_dq0.d, "i_q": i_dq0.q, "i_0": i_dq0.zero,
        "t_e": torque_abc(params, i_abc, theta),
    }
    if extra:
        channels.update(extra)
    return TimeSeries(t, theta, channels)


def run_current_fed(params: MachineParameters, i_dq_cmd, omega_e,
                    cfg: SimConfig, i_0=0.0) -> TimeSeries:
    """Evaluate the machine exactly under prescribed rotor-frame currents.

    Parameters
    ----------
    params : MachineParameters
        Machine under test.
    i_dq_cmd : (float, float)
        Constant commanded (i_d, i_q) in A.
    omega_e : float
        Electrical speed (rad/s), constant.
    cfg : SimConfig
        Must have mode "current-fed".
    i_0 : float, optional
        Constant zero-sequence current; physical star connections keep
        this at zero, the knob exists to exercise zero-sequence coupling.

    Returns
    -------
    TimeSeries
        Phase and rotor-frame voltages and currents plus torque. Exact:
        currents are imposed, so no integration is involved.

    """
    if cfg.mode != "current-fed":
        raise ConfigError(f"config mode is {cfg.mode!r}, not 'current-fed'")
    _check_resolution(cfg, omega_e)
    i_d, i_q = (float(v) for v in i_dq_cmd)
    t, theta = _sample_grid(cfg, omega_e)
    ones = np.ones_like(theta)
    i_vec = park_inverse(Dq0Vector(i_d * ones, i_q * ones, i_0 * ones), theta)
    # Constant rotor-frame currents rotate in the phase frame:
    # di_abc/dt is the inverse transform of (omega i_q, -omega i_d, 0).
    di_vec = park_inverse(Dq0Vector(omega_e * i_q * ones,
                                    -omega_e * i_d * ones,
                                    0.0 * ones), theta)
    i_abc = i_vec.as_array()
    di_abc = di_vec.as_array()
    v_abc = phase_voltages(params, i_abc, di_abc, theta, omega_e)
    return _assemble(params, t, theta, i_abc, v_abc)


def run_voltage_fed(params: MachineParameters, v_dq_cmd, omega_e,
                    cfg: SimConfig) -> TimeSeries:
    """Integrate the voltage-fed machine with an isolated star point.

    Parameters
    ----------
    params : MachineParameters
        Machine under test; its inductance matrix must be positive
        definite (enforced at construction).
    v_dq_cmd : (float, float)
        Constant commanded (v_d, v_q) in V, applied through the inverse
        transform with zero common-mode drive.
    omega_e : float
        Electrical speed (rad/s), constant.
    cfg : SimConfig
        Must have mode "voltage-fed".

    Returns
    -------
    TimeSeries
        All standard channels plus "v_n", the star-point displacement
        voltage. Voltage channels are winding voltages (terminal minus
        star point), so v_0 = -v_n. Initial currents are zero.

    Notes
    -----
    The isolated star point forces i_a + i_b + i_c = 0, so the state is
    reduced to (i_a, i_b) and the zero-sequence current is zero by
    construction. Integration is fixed-step classic RK4.

    """
    if cfg.mode != "voltage-fed":
        raise ConfigError(f"config mode is {cfg.mode!r}, not 'voltage-fed'")
    _check_resolution(cfg, omega_e)
    v_d, v_q = (float(v) for v in v_dq_cmd)

    l_mat = params.inductance_matrix()
    # Constrained inductance: with i_c = -i_a - i_b and the star-point
    # voltage eliminated by differencing rows against phase c.
    reduce_map = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    l_red = reduce_map.T @ l_mat @ reduce_map
    h = np.linalg.inv(l_red)
    h00, h01 = float(h[0, 0]), float(h[0, 1])
    h10, h11 = float(h[1, 0]), float(h[1, 1])

    r_a, r_b, r_c = (float(v) for v in params.resistances())
    wl_a, wl_b, wl_c = (omega_e * float(v) for v in params.pm_flux())
    rt3_2 = math.sqrt(3.0) / 2.0
    dt = cfg.dt
    w_dt = omega_e * dt
    n_steps = int(round(cfg.duration / dt))

    cos = math.cos
    sin = math.sin

    def deriv(th, ia, ib):
        c_a = cos(th)
        s_a = sin(th)
        # Phase b and c angles by exact 2*pi/3 rotations.
        c_b = -0.5 * c_a + rt3_2 * s_a
        s_b = -0.5 * s_a - rt3_2 * c_a
        c_c = -0.5 * c_a - rt3_2 * s_a
        s_c = -0.5 * s_a + rt3_2 * c_a
        ic = -ia - ib
        r0 = v_d * c_a + v_q * s_a - r_a * ia - wl_a * s_a
        r1 = v_d * c_b + v_q * s_b - r_b * ib - wl_b * s_b
        r2 = v_d * c_c + v_q * s_c - r_c * ic - wl_c * s_c
        u0 = r0 - r2
        u1 = r1 - r2
        return h00 * u0 + h01 * u1, h10 * u0 + h11 * u1

    hist_a = np.empty(n_steps + 1)
    hist_b = np.empty(n_steps + 1)
    hist_a[0] = 0.0
    hist_b[0] = 0.0
    ia = 0.0
    ib = 0.0
    sixth = dt / 6.0
    half = 0.5 * dt
    for k in range(n_steps):
        th0 = w_dt * k
        th_half = th0 + 0.5 * w_dt
        th1 = th0 + w_dt
        a1, b1 = deriv(th0, ia, ib)
        a2, b2 = deriv(th_half, ia + half * a1, ib + half * b1)
        a3, b3 = deriv(th_half, ia + half * a2, ib + half * b2)
        a4, b4 = deriv(th1, ia + dt * a3, ib + dt * b3)
        ia += sixth * (a1 + 2.0 * (a2 + a3) + a4)
        ib += sixth * (b1 + 2.0 * (b2 + b3) + b4)
        hist_a[k + 1] = ia
        hist_b[k + 1] = ib

    if not (np.all(np.isfinite(hist_a)) and np.all(np.isfinite(hist_b))):
        bad = np.flatnonzero(~(np.isfinite(hist_a) & np.isfinite(hist_b)))[0]
        raise SimulationError(
            f"integration diverged near t = {bad * dt:g} s; "
            "reduce dt or check parameters"
        )

    t = np.arange(n_steps + 1) * dt
    theta = omega_e * t
    i_abc = np.stack([hist_a, hist_b, -hist_a - hist_b])

    # Reconstruct applied voltages, derivatives and the star-point shift.
    applied = park_inverse(Dq0Vector(v_d, v_q, 0.0), theta).as_array()
    emf = omega_e * params.pm_flux()[:, None] * np.sin(phase_angles(theta))
    rhs = applied - params.resistances()[:, None] * i_abc - emf
    u0 = rhs[0] - rhs[2]
    u1 = rhs[1] - rhs[2]
    di_a = h00 * u0 + h01 * u1
    di_b = h10 * u0 + h11 * u1
    di_abc = np.stack([di_a, di_b, -di_a - di_b])
    v_n = np.mean(rhs - l_mat @ di_abc, axis=0)
    winding = applied - v_n
    return _assemble(params, t, theta, i_abc, winding, extra={"v_n": v_n})


def steady_state_window(ts: TimeSeries, params: MachineParameters,
                        omega_e):
    """Boolean mask of samples past the settling window.

    The window covers five electrical time constants and, when rotating,
    two electrical periods.
    """
    return ts.t >= transient_window(params, omega_e)


def predict_current_ripple(params: MachineParameters, omega_e, i_d, i_q):
    """First-order 2theta current ripple under constant voltage drive.

    The imbalance voltage deltas, evaluated at the balanced operating
    currents, act as a disturbance at twice the electrical frequency;
    dividing by the rotor-frame impedance at that frequency gives the
    ripple phasors:

        delta_i = -Z(2 omega_e)^-1 delta_v

    Returns the complex (d, q) ripple pair; the waveform contribution is
    Re(delta_i * exp(j 2 theta)).
    """
    if omega_e == 0.0:
        raise ConfigError("ripple prediction requires nonzero speed")
    dec = decompose(params)
    r = dec.nominal_r
    l_sync = dec.nominal_l + dec.nominal_m

    theta = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
    op = OperatingPoint(theta=theta, omega_e=omega_e, i_d=i_d, i_q=i_q)
    d_res = resistance_delta(dec.d_r, op)
    d_flux = flux_delta(dec.d_lam, omega_e, theta)
    d_ind = inductance_delta(dec.d_l, dec.d_m, op)
    dv_d = d_res.dv_d + d_flux.dv_d + d_ind.dv_d
    dv_q = d_res.dv_q + d_flux.dv_q + d_ind.dv_q

    def phasor_of(signal):
        dec_h = demodulate(signal, theta)
        return dec_h.second.k * np.exp(1j * dec_h.second.phi)

    v_tilde = np.array([phasor_of(dv_d), phasor_of(dv_q)])
    # Rotor-frame impedance seen by a 2theta perturbation.
    z = np.array([
        [r + 2j * omega_e * l_sync, omega_e * l_sync],
        [-omega_e * l_sync, r + 2j * omega_e * l_sync],
    ])
    ripple = -np.linalg.solve(z, v_tilde)
    return complex(ripple[0]), complex(ripple[1])


def balanced_voltage_command(params: MachineParameters, omega_e, i_d, i_q):
    """Steady-state (v_d, v_q) that drives the balanced part to (i_d, i_q)."""
    dec = decompose(params)
    op = OperatingPoint(theta=0.0, omega_e=omega_e, i_d=i_d, i_q=i_q)
    v_d, v_q, _ = ideal_dq_nonsalient(dec.nominal_r,
                                      dec.nominal_l + dec.nominal_m,
                                      dec.nominal_lam, params.pole_pairs, op)
    return float(v_d), float(v_q)
