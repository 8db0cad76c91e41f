"""Hot inner loops: noise scans and per-trajectory RK4 integration.

Every kernel exists twice: a numba ``@njit`` scalar-loop version and a
numpy version vectorized over the trajectory axis of a chunk.  Both consume
identical inputs (raw normal draws, per-step sign arrays, coefficient
tables on the half-step grid) and implement the same arithmetic, so the
backends agree to rounding.  Dispatch follows ``backend.HAS_NUMBA`` unless
an explicit ``use_numba`` override is passed (the benchmark does that).

Grid convention: a coarse grid of n+1 nodes defines n RK4 steps; noise and
coefficient tables are sampled on the half grid of 2n+1 nodes so stage
evaluations at t, t+h/2 and t+h are exact table lookups.
"""

import numpy as np

from .backend import HAS_NUMBA, njit

SQRT2 = np.sqrt(2.0)


# ---------------------------------------------------------------------------
# Ornstein-Uhlenbeck scan
# ---------------------------------------------------------------------------

@njit(cache=True)
def _ou_scan_numba_parts(normals, decay, stddev, init_std, parts):
    # split real/imag stores: writing complex scalars into a complex array
    # element by element is an order of magnitude slower under numba
    n_paths, n_nodes = normals.shape[0], normals.shape[1]
    for i in range(n_paths):
        x = init_std * normals[i, 0, 0]
        y = init_std * normals[i, 0, 1]
        parts[i, 0, 0] = x
        parts[i, 0, 1] = y
        for m in range(1, n_nodes):
            x = x * decay[m - 1] + stddev[m - 1] * normals[i, m, 0]
            y = y * decay[m - 1] + stddev[m - 1] * normals[i, m, 1]
            parts[i, m, 0] = x
            parts[i, m, 1] = y


def _ou_scan_numba(normals, decay, stddev, init_std):
    parts = np.empty((normals.shape[0], normals.shape[1], 2))
    _ou_scan_numba_parts(normals, decay, stddev, init_std, parts)
    return parts.view(np.complex128)[:, :, 0]


def _ou_scan_numpy(normals, decay, stddev, init_std):
    n_paths, n_nodes = normals.shape[0], normals.shape[1]
    out = np.empty((n_paths, n_nodes), dtype=np.complex128)
    x = init_std * normals[:, 0, 0]
    y = init_std * normals[:, 0, 1]
    out[:, 0] = x + 1j * y
    for m in range(1, n_nodes):
        x = x * decay[m - 1] + stddev[m - 1] * normals[:, m, 0]
        y = y * decay[m - 1] + stddev[m - 1] * normals[:, m, 1]
        out[:, m] = x + 1j * y
    return out


def ou_scan(normals, decay, stddev, init_std, use_numba=None):
    """Exact stationary OU update driven by pre-drawn standard normals.

    ``normals`` has shape (paths, nodes, 2): row 0 seeds the stationary
    initial value, rows m >= 1 drive the transition to node m.  Real and
    imaginary parts evolve as independent OU processes so the returned
    complex values have vanishing (z, z) pseudo-correlation.
    """
    impl = HAS_NUMBA if use_numba is None else use_numba
    if impl:
        return _ou_scan_numba(normals, decay, stddev, init_std)
    return _ou_scan_numpy(normals, decay, stddev, init_std)


# ---------------------------------------------------------------------------
# Dephasing trajectories (diagonal generator)
# ---------------------------------------------------------------------------
#
# d psi_m / dt = p(t) * [ lam_m * (z*(t) - i omega) - lam_m^2 * F(t) ] psi_m
# with lam = (-1, 0, +1); the lam = 0 component is exactly constant.

@njit(cache=True)
def _dephasing_rk4_numba(psi0, zvals, p_step, f_half, h_steps, omega, out_idx):
    n_traj = psi0.shape[0]
    n_steps = h_steps.shape[0]
    n_out = out_idx.shape[0]
    out = np.empty((n_traj, n_out, 3), dtype=np.complex128)
    iom = 1j * omega
    for i in range(n_traj):
        u0 = psi0[i, 0]
        u1 = psi0[i, 1]
        u2 = psi0[i, 2]
        optr = 0
        while optr < n_out and out_idx[optr] == 0:
            out[i, optr, 0] = u0
            out[i, optr, 1] = u1
            out[i, optr, 2] = u2
            optr += 1
        for k in range(n_steps):
            p = p_step[k]
            h = h_steps[k]
            m0 = 2 * k
            a0 = p * (-(zvals[i, m0] - iom) - f_half[m0])
            b0 = p * ((zvals[i, m0] - iom) - f_half[m0])
            a1 = p * (-(zvals[i, m0 + 1] - iom) - f_half[m0 + 1])
            b1 = p * ((zvals[i, m0 + 1] - iom) - f_half[m0 + 1])
            a2 = p * (-(zvals[i, m0 + 2] - iom) - f_half[m0 + 2])
            b2 = p * ((zvals[i, m0 + 2] - iom) - f_half[m0 + 2])
            # component 0 (lam = -1)
            k1 = a0 * u0
            k2 = a1 * (u0 + 0.5 * h * k1)
            k3 = a1 * (u0 + 0.5 * h * k2)
            k4 = a2 * (u0 + h * k3)
            u0 = u0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            # component 2 (lam = +1)
            k1 = b0 * u2
            k2 = b1 * (u2 + 0.5 * h * k1)
            k3 = b1 * (u2 + 0.5 * h * k2)
            k4 = b2 * (u2 + h * k3)
            u2 = u2 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            while optr < n_out and out_idx[optr] == k + 1:
                out[i, optr, 0] = u0
                out[i, optr, 1] = u1
                out[i, optr, 2] = u2
                optr += 1
    return out


def _dephasing_rk4_numpy(psi0, zvals, p_step, f_half, h_steps, omega, out_idx):
    n_traj = psi0.shape[0]
    n_steps = h_steps.shape[0]
    n_out = out_idx.shape[0]
    out = np.empty((n_traj, n_out, 3), dtype=np.complex128)
    iom = 1j * omega
    u0 = psi0[:, 0].copy()
    u1 = psi0[:, 1].copy()
    u2 = psi0[:, 2].copy()
    optr = 0
    while optr < n_out and out_idx[optr] == 0:
        out[:, optr, 0] = u0
        out[:, optr, 1] = u1
        out[:, optr, 2] = u2
        optr += 1
    for k in range(n_steps):
        p = p_step[k]
        h = h_steps[k]
        m0 = 2 * k
        g0 = zvals[:, m0] - iom
        g1 = zvals[:, m0 + 1] - iom
        g2 = zvals[:, m0 + 2] - iom
        a0 = p * (-g0 - f_half[m0])
        a1 = p * (-g1 - f_half[m0 + 1])
        a2 = p * (-g2 - f_half[m0 + 2])
        b0 = p * (g0 - f_half[m0])
        b1 = p * (g1 - f_half[m0 + 1])
        b2 = p * (g2 - f_half[m0 + 2])
        k1 = a0 * u0
        k2 = a1 * (u0 + 0.5 * h * k1)
        k3 = a1 * (u0 + 0.5 * h * k2)
        k4 = a2 * (u0 + h * k3)
        u0 = u0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        k1 = b0 * u2
        k2 = b1 * (u2 + 0.5 * h * k1)
        k3 = b1 * (u2 + 0.5 * h * k2)
        k4 = b2 * (u2 + h * k3)
        u2 = u2 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        while optr < n_out and out_idx[optr] == k + 1:
            out[:, optr, 0] = u0
            out[:, optr, 1] = u1
            out[:, optr, 2] = u2
            optr += 1
    return out


def dephasing_rk4(psi0, zvals, p_step, f_half, h_steps, omega, out_idx, use_numba=None):
    """RK4 march of a chunk of dephasing trajectories, recorded at out_idx nodes."""
    impl = HAS_NUMBA if use_numba is None else use_numba
    if impl:
        return _dephasing_rk4_numba(psi0, zvals, p_step, f_half, h_steps, omega, out_idx)
    return _dephasing_rk4_numpy(psi0, zvals, p_step, f_half, h_steps, omega, out_idx)


# ---------------------------------------------------------------------------
# Dissipative trajectories (weak-noise generator)
# ---------------------------------------------------------------------------
#
# Generator matrix at one instant (u = psi components):
#   du0 = ( i p w - 2 l2 F2) u0 + sqrt2 l1 z* u1 - 2 l2 F1 u2
#   du1 = sqrt2 l2 z* u0 + 2 (l1 F3 - l1 F1 - l2 F2 - l2 F4) u1 + sqrt2 l1 z* u2
#   du2 = -2 l1 F2 u0 + sqrt2 l2 z* u1 + (-i p w - 2 l1 F1) u2
# The products J+J- = diag(0,2,2), J-J+ = diag(2,2,0), J+^2 = 2|2><0|,
# J-^2 = 2|0><2|, J+JzJ- = diag(0,-2,0), J-JzJ+ = diag(0,2,0) are folded in.

@njit(cache=True)
def _dissipative_rk4_numba(
    psi0, zvals, p_step, l1_step, l2_step, f1h, f2h, f3h, f4h, h_steps, omega, out_idx
):
    n_traj = psi0.shape[0]
    n_steps = h_steps.shape[0]
    n_out = out_idx.shape[0]
    out = np.empty((n_traj, n_out, 3), dtype=np.complex128)
    for i in range(n_traj):
        u0 = psi0[i, 0]
        u1 = psi0[i, 1]
        u2 = psi0[i, 2]
        optr = 0
        while optr < n_out and out_idx[optr] == 0:
            out[i, optr, 0] = u0
            out[i, optr, 1] = u1
            out[i, optr, 2] = u2
            optr += 1
        for k in range(n_steps):
            p = p_step[k]
            l1 = l1_step[k]
            l2 = l2_step[k]
            h = h_steps[k]
            ipw = 1j * (p * omega)
            m0 = 2 * k
            v0 = u0
            v1 = u1
            v2 = u2
            acc0 = 0.0 + 0.0j
            acc1 = 0.0 + 0.0j
            acc2 = 0.0 + 0.0j
            for st in range(4):
                if st == 0:
                    m = m0
                    w = 1.0
                    frac = 0.5
                elif st == 1:
                    m = m0 + 1
                    w = 2.0
                    frac = 0.5
                elif st == 2:
                    m = m0 + 1
                    w = 2.0
                    frac = 1.0
                else:
                    m = m0 + 2
                    w = 1.0
                    frac = 1.0
                z = zvals[i, m]
                d0 = (ipw - 2.0 * l2 * f2h[m]) * v0 + (SQRT2 * l1 * z) * v1 - (
                    2.0 * l2 * f1h[m]
                ) * v2
                d1 = (SQRT2 * l2 * z) * v0 + 2.0 * (
                    l1 * f3h[m] - l1 * f1h[m] - l2 * f2h[m] - l2 * f4h[m]
                ) * v1 + (SQRT2 * l1 * z) * v2
                d2 = (-2.0 * l1 * f2h[m]) * v0 + (SQRT2 * l2 * z) * v1 + (
                    -ipw - 2.0 * l1 * f1h[m]
                ) * v2
                acc0 += w * d0
                acc1 += w * d1
                acc2 += w * d2
                if st < 3:
                    v0 = u0 + frac * h * d0
                    v1 = u1 + frac * h * d1
                    v2 = u2 + frac * h * d2
            u0 = u0 + (h / 6.0) * acc0
            u1 = u1 + (h / 6.0) * acc1
            u2 = u2 + (h / 6.0) * acc2
            while optr < n_out and out_idx[optr] == k + 1:
                out[i, optr, 0] = u0
                out[i, optr, 1] = u1
                out[i, optr, 2] = u2
                optr += 1
    return out


def _dissipative_rk4_numpy(
    psi0, zvals, p_step, l1_step, l2_step, f1h, f2h, f3h, f4h, h_steps, omega, out_idx
):
    n_steps = h_steps.shape[0]
    n_out = out_idx.shape[0]
    n_traj = psi0.shape[0]
    out = np.empty((n_traj, n_out, 3), dtype=np.complex128)
    u = psi0.copy()
    optr = 0
    while optr < n_out and out_idx[optr] == 0:
        out[:, optr, :] = u
        optr += 1

    def rhs(v, z, m, ipw, l1, l2):
        d = np.empty_like(v)
        d[:, 0] = (ipw - 2.0 * l2 * f2h[m]) * v[:, 0] + (SQRT2 * l1) * z * v[:, 1] - (
            2.0 * l2 * f1h[m]
        ) * v[:, 2]
        d[:, 1] = (SQRT2 * l2) * z * v[:, 0] + 2.0 * (
            l1 * f3h[m] - l1 * f1h[m] - l2 * f2h[m] - l2 * f4h[m]
        ) * v[:, 1] + (SQRT2 * l1) * z * v[:, 2]
        d[:, 2] = (-2.0 * l1 * f2h[m]) * v[:, 0] + (SQRT2 * l2) * z * v[:, 1] + (
            -ipw - 2.0 * l1 * f1h[m]
        ) * v[:, 2]
        return d

    for k in range(n_steps):
        p = p_step[k]
        l1 = l1_step[k]
        l2 = l2_step[k]
        h = h_steps[k]
        ipw = 1j * (p * omega)
        m0 = 2 * k
        z0 = zvals[:, m0]
        z1 = zvals[:, m0 + 1]
        z2 = zvals[:, m0 + 2]
        k1 = rhs(u, z0, m0, ipw, l1, l2)
        k2 = rhs(u + 0.5 * h * k1, z1, m0 + 1, ipw, l1, l2)
        k3 = rhs(u + 0.5 * h * k2, z1, m0 + 1, ipw, l1, l2)
        k4 = rhs(u + h * k3, z2, m0 + 2, ipw, l1, l2)
        u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        while optr < n_out and out_idx[optr] == k + 1:
            out[:, optr, :] = u
            optr += 1
    return out


def dissipative_rk4(
    psi0,
    zvals,
    p_step,
    l1_step,
    l2_step,
    f1h,
    f2h,
    f3h,
    f4h,
    h_steps,
    omega,
    out_idx,
    use_numba=None,
):
    """RK4 march of a chunk of dissipative trajectories, recorded at out_idx nodes."""
    impl = HAS_NUMBA if use_numba is None else use_numba
    if impl:
        return _dissipative_rk4_numba(
            psi0, zvals, p_step, l1_step, l2_step, f1h, f2h, f3h, f4h, h_steps, omega, out_idx
        )
    return _dissipative_rk4_numpy(
        psi0, zvals, p_step, l1_step, l2_step, f1h, f2h, f3h, f4h, h_steps, omega, out_idx
    )
