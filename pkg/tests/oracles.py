"""Independent brute-force references for the test suite.

Everything here is rebuilt from first principles: explicit transform
matrices, explicit phase-frame voltage evaluation, quadrature co-energy.
Deliberately redundant with the package so each side checks the other;
nothing in this module calls package code.
"""

import numpy as np

BETA = 2.0 * np.pi / 3.0


def phase_angle_vec(theta):
    return np.array([theta, theta - BETA, theta - 2.0 * BETA])


def t_forward(theta):
    """Forward transform matrix: rows (2/3)cos, (2/3)sin, 1/3."""
    ang = phase_angle_vec(theta)
    return np.array([
        (2.0 / 3.0) * np.cos(ang),
        (2.0 / 3.0) * np.sin(ang),
        np.full(3, 1.0 / 3.0),
    ])


def t_inverse(theta):
    """Inverse transform matrix: columns cos, sin, 1."""
    ang = phase_angle_vec(theta)
    return np.column_stack([np.cos(ang), np.sin(ang), np.ones(3)])


def inductance_matrix(l_abc, m_pairs):
    l_a, l_b, l_c = l_abc
    m_ab, m_bc, m_ca = m_pairs
    return np.array([
        [l_a, -m_ab, -m_ca],
        [-m_ab, l_b, -m_bc],
        [-m_ca, -m_bc, l_c],
    ])


def dq_voltages_brute(r_abc, l_abc, m_pairs, lam_abc, theta, omega,
                      i_dq0, di_dq0):
    """Rotor-frame voltages by the full phase-frame path at one angle.

    Phase currents come from the inverse transform; their derivatives
    from the product rule on T_i(theta(t)) with constant rotor-frame
    derivatives di_dq0.
    """
    r_abc = np.asarray(r_abc, dtype=float)
    lam_abc = np.asarray(lam_abc, dtype=float)
    i_dq0 = np.asarray(i_dq0, dtype=float)
    di_dq0 = np.asarray(di_dq0, dtype=float)
    ti = t_inverse(theta)
    i_abc = ti @ i_dq0
    rotated = np.array([
        di_dq0[0] + omega * i_dq0[1],
        di_dq0[1] - omega * i_dq0[0],
        di_dq0[2],
    ])
    di_abc = ti @ rotated
    emf = omega * lam_abc * np.sin(phase_angle_vec(theta))
    v_abc = r_abc * i_abc + inductance_matrix(l_abc, m_pairs) @ di_abc + emf
    return t_forward(theta) @ v_abc


def dq_voltage_sweep(r_abc, l_abc, m_pairs, lam_abc, thetas, omega,
                     i_dq0, di_dq0):
    """dq_voltages_brute over a theta grid, stacked (3, n), loop free."""
    thetas = np.asarray(thetas, dtype=float)
    r_abc = np.asarray(r_abc, dtype=float)[:, None]
    lam_abc = np.asarray(lam_abc, dtype=float)[:, None]
    i_d, i_q, i_0 = (float(v) for v in i_dq0)
    di_d, di_q, di_0 = (float(v) for v in di_dq0)
    ang = thetas[None, :] - np.array([0.0, BETA, 2.0 * BETA])[:, None]
    cos, sin = np.cos(ang), np.sin(ang)
    i_abc = i_d * cos + i_q * sin + i_0
    di_abc = ((di_d + omega * i_q) * cos + (di_q - omega * i_d) * sin + di_0)
    emf = omega * lam_abc * sin
    v_abc = r_abc * i_abc + inductance_matrix(l_abc, m_pairs) @ di_abc + emf
    return np.vstack([
        (2.0 / 3.0) * np.sum(v_abc * cos, axis=0),
        (2.0 / 3.0) * np.sum(v_abc * sin, axis=0),
        np.mean(v_abc, axis=0),
    ])


def coenergy_torque(l_abc, m_pairs, lam_abc, i_abc, theta, pole_pairs,
                    step=1e-6, quad_points=2001):
    """Torque by central difference of the quadrature co-energy.

    W'(theta) = integral_0^1 lambda(s i, theta) . i ds along the straight
    current path; torque = N_p dW'/dtheta.
    """
    i_abc = np.asarray(i_abc, dtype=float)
    lam_abc = np.asarray(lam_abc, dtype=float)
    l_mat = inductance_matrix(l_abc, m_pairs)
    s = np.linspace(0.0, 1.0, quad_points)

    def coenergy(th):
        pm_term = -lam_abc * np.cos(phase_angle_vec(th))
        lam = l_mat @ (i_abc[:, None] * s) + pm_term[:, None]
        return np.trapezoid(np.sum(lam * i_abc[:, None], axis=0), s)

    return pole_pairs * (coenergy(theta + step)
                         - coenergy(theta - step)) / (2.0 * step)
