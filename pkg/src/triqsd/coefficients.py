"""Deterministic memory functions that close the time-local trajectory equations.

For the dephasing model a single real function f(t) obeys
    df/dt = (gamma / 2) p(t) - gamma f,        f(0) = 0,
and for the dissipative model four coupled complex functions obey
    df1/dt = (gamma/2) l1 + ( i p w - l1 f3 + l2 f4 - gamma) f1
    df2/dt = (gamma/2) l2 + (-i p w - l1 f3 + l2 f4 - gamma) f2
    df3/dt = ( i p w - 3 l1 f1 + l1 f3 - l2 f4 - gamma) f3 + (l1 f1 - l2 f2 + l2 f4) f1
    df4/dt = (-i p w - 3 l2 f2 + l1 f3 - l2 f4 - gamma) f4 + (l1 f1 - l2 f2 + l1 f3) f2
with f_i(0) = 0.  Everything is noise-free, so tables are computed once per
(schedule, omega, gamma) and shared read-only by all trajectories.

Tables are integrated by classical RK4 directly on the half-step grid, so
trajectory stage evaluations are exact node lookups; the sign functions are
constant within every half step by construction of the grid.

The two-time system ``two_time_system`` / ``quadrature_consistency_check``
is a test-only oracle: it propagates the response functions g_i(t, s) in t
from g1(s,s) = l1(s), g2(s,s) = l2(s), g3 = g4 = 0 and verifies that
integrating them against the kernel reproduces the closed f_i tables.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridAlignmentError, NumericalFault, ValidationError
from .pulses import PulseSchedule, half_grid, signs_at, step_signs


@dataclass(frozen=True)
class CoefficientTables:
    """Memory functions sampled on the half-step grid (2n+1 nodes)."""

    model: str
    times: np.ndarray  # half-step grid
    omega: float
    gamma: float
    f: np.ndarray | None = None  # dephasing: real
    f1: np.ndarray | None = None  # dissipative: complex
    f2: np.ndarray | None = None
    f3: np.ndarray | None = None
    f4: np.ndarray | None = None

    @property
    def coarse_grid(self) -> np.ndarray:
        return self.times[0::2]

    def interp(self, t):
        """Linear interpolation between table nodes (diagnostics only)."""
        if self.model == "dephasing":
            return np.interp(t, self.times, self.f)
        return tuple(
            np.interp(t, self.times, arr.real) + 1j * np.interp(t, self.times, arr.imag)
            for arr in (self.f1, self.f2, self.f3, self.f4)
        )


def _validate_grid(schedule: PulseSchedule, grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or not np.all(np.diff(grid) > 0):
        raise ValidationError("grid must be a strictly ascending 1-D array")
    if grid[0] != 0.0 or grid[-1] != schedule.total_time:
        raise GridAlignmentError("grid must span [0, total_time] exactly")
    pulses = schedule.all_pulse_times()
    pos = np.searchsorted(grid, pulses)
    if np.any(pos >= len(grid)) or np.any(grid[np.clip(pos, 0, len(grid) - 1)] != pulses):
        raise GridAlignmentError("every pulse time must be a grid point")
    return grid


def solve_dephasing(schedule: PulseSchedule, omega: float, gamma: float, grid) -> CoefficientTables:
    """RK4 solve of the dephasing memory function on the half grid.

    The result is continuous everywhere with slope breaks exactly at pulse
    times; with no pulses it equals (1 - exp(-gamma t)) / 2.
    """
    grid = _validate_grid(schedule, grid)
    if gamma <= 0:
        raise ValidationError("gamma must be positive")
    tau = half_grid(grid)
    p_step, _, _, _ = step_signs(schedule, grid)
    f = np.empty(len(tau))
    f[0] = 0.0
    val = 0.0
    for m in range(len(tau) - 1):
        h = tau[m + 1] - tau[m]
        p = p_step[m // 2]
        c = 0.5 * gamma * p

        k1 = c - gamma * val
        k2 = c - gamma * (val + 0.5 * h * k1)
        k3 = c - gamma * (val + 0.5 * h * k2)
        k4 = c - gamma * (val + h * k3)
        val = val + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        f[m + 1] = val
    if not np.all(np.isfinite(f)):
        raise NumericalFault("dephasing memory function is not finite")
    return CoefficientTables(model="dephasing", times=tau, omega=omega, gamma=gamma, f=f)


def dephasing_from_kernel(schedule: PulseSchedule, kernel, grid, omega: float = 0.0):
    """Dephasing memory function for an arbitrary kernel by direct quadrature.

    Evaluates integral_0^t alpha(t, s) p(s) ds with trapezoid weights on the
    half grid; quadratic cost in grid size, so this is the generality /
    cross-check route rather than the production solver.
    """
    grid = _validate_grid(schedule, grid)
    tau = half_grid(grid)
    p = signs_at(schedule, tau)[0]
    f = np.empty(len(tau))
    f[0] = 0.0
    for m in range(1, len(tau)):
        s = tau[: m + 1]
        f[m] = np.trapezoid(np.asarray(kernel.alpha(tau[m], s)).real * p[: m + 1], s)
    gamma = kernel.gamma if kernel.kind == "exponential" else 0.0
    return CoefficientTables(model="dephasing", times=tau, omega=omega, gamma=gamma, f=f)


def _dissipative_rhs(f, p, l1, l2, omega, gamma):
    f1, f2, f3, f4 = f
    ipw = 1j * p * omega
    shared = -l1 * f3 + l2 * f4 - gamma
    d1 = 0.5 * gamma * l1 + (ipw + shared) * f1
    d2 = 0.5 * gamma * l2 + (-ipw + shared) * f2
    d3 = (ipw - 3.0 * l1 * f1 + l1 * f3 - l2 * f4 - gamma) * f3 + (
        l1 * f1 - l2 * f2 + l2 * f4
    ) * f1
    d4 = (-ipw - 3.0 * l2 * f2 + l1 * f3 - l2 * f4 - gamma) * f4 + (
        l1 * f1 - l2 * f2 + l1 * f3
    ) * f2
    return np.array([d1, d2, d3, d4])


def solve_dissipative(
    schedule: PulseSchedule, omega: float, gamma: float, grid
) -> CoefficientTables:
    """RK4 solve of the four coupled dissipative memory functions."""
    grid = _validate_grid(schedule, grid)
    if gamma <= 0:
        raise ValidationError("gamma must be positive")
    tau = half_grid(grid)
    _, _, l1_step, l2_step = step_signs(schedule, grid)
    p_step = step_signs(schedule, grid)[0]
    out = np.empty((4, len(tau)), dtype=complex)
    out[:, 0] = 0.0
    f = np.zeros(4, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):  # blow-up raises below
        for m in range(len(tau) - 1):
            h = tau[m + 1] - tau[m]
            seg = m // 2
            args = (p_step[seg], l1_step[seg], l2_step[seg], omega, gamma)
            k1 = _dissipative_rhs(f, *args)
            k2 = _dissipative_rhs(f + 0.5 * h * k1, *args)
            k3 = _dissipative_rhs(f + 0.5 * h * k2, *args)
            k4 = _dissipative_rhs(f + h * k3, *args)
            f = f + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            out[:, m + 1] = f
    if not np.all(np.isfinite(out)):
        raise NumericalFault("dissipative memory functions blew up on the grid")
    return CoefficientTables(
        model="dissipative",
        times=tau,
        omega=omega,
        gamma=gamma,
        f1=out[0],
        f2=out[1],
        f3=out[2],
        f4=out[3],
    )


def _two_time_rhs(g, f_node, p, l1, l2, omega):
    """Response-function derivative at one half-grid node; g has shape (4, rows)."""
    f1, f2, f3, f4 = f_node
    ipw = 1j * p * omega
    mix = l1 * f1 - 2.0 * l1 * f3 + l2 * f2 + 2.0 * l2 * f4
    d = np.empty_like(g)
    d[0] = (ipw + l2 * f2 - l1 * f3 + l2 * f4) * g[0] - l2 * f1 * g[1]
    d[1] = (-ipw + l1 * f1 - l1 * f3 + l2 * f4) * g[1] - l1 * f2 * g[0]
    d[2] = (ipw - l1 * f1 + l1 * f3 - l2 * f4) * g[2] + mix * g[0] - 2.0 * l2 * f1 * g[1] - (
        l2 * f1
    ) * g[3]
    d[3] = (-ipw - l2 * f2 + l1 * f3 - l2 * f4) * g[3] - mix * g[1] + 2.0 * l1 * f2 * g[0] - (
        l1 * f2
    ) * g[2]
    return d


def _march_two_time(schedule, tables, grid, record_nodes):
    """March all response rows g_i(t, s=grid[k]) jointly in t.

    Row k activates at node k with (l1(s), l2(s), 0, 0).  Returns a dict
    node -> (s_nodes, g values of shape (4, rows)) for each requested node.
    """
    omega, gamma = tables.omega, tables.gamma
    p_step, _, l1_step, l2_step = step_signs(schedule, grid)
    f_tab = np.array([tables.f1, tables.f2, tables.f3, tables.f4])
    n_steps = len(grid) - 1
    g = np.zeros((4, len(grid)), dtype=complex)
    snapshots = {}
    record = set(int(k) for k in record_nodes)
    for k in range(n_steps + 1):
        _, _, l1_here, l2_here = signs_at(schedule, grid[k])
        g[0, k] = l1_here
        g[1, k] = l2_here
        g[2, k] = 0.0
        g[3, k] = 0.0
        if k in record:
            snapshots[k] = g[:, : k + 1].copy()
        if k == n_steps:
            break
        h = grid[k + 1] - grid[k]
        act = g[:, : k + 1]
        m0 = 2 * k
        args = (p_step[k], l1_step[k], l2_step[k], omega)
        k1 = _two_time_rhs(act, f_tab[:, m0], *args)
        k2 = _two_time_rhs(act + 0.5 * h * k1, f_tab[:, m0 + 1], *args)
        k3 = _two_time_rhs(act + 0.5 * h * k2, f_tab[:, m0 + 1], *args)
        k4 = _two_time_rhs(act + h * k3, f_tab[:, m0 + 2], *args)
        g[:, : k + 1] = act + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return snapshots


def two_time_system(schedule: PulseSchedule, omega: float, gamma: float, s: float, tables, grid):
    """Response functions g_i(t, s) for t >= s, one fixed start time s.

    s must be a grid node; the returned arrays cover the nodes from s to the
    end of the grid, starting from (l1(s), l2(s), 0, 0).
    """
    grid = _validate_grid(schedule, grid)
    k0 = int(np.searchsorted(grid, s))
    if k0 >= len(grid) or grid[k0] != s:
        raise GridAlignmentError("s must be a grid node")
    p_step, _, l1_step, l2_step = step_signs(schedule, grid)
    f_tab = np.array([tables.f1, tables.f2, tables.f3, tables.f4])
    _, _, l1_here, l2_here = signs_at(schedule, s)
    g = np.array([[l1_here], [l2_here], [0.0], [0.0]], dtype=complex)
    out = np.empty((4, len(grid) - k0), dtype=complex)
    out[:, 0] = g[:, 0]
    for k in range(k0, len(grid) - 1):
        h = grid[k + 1] - grid[k]
        m0 = 2 * k
        args = (p_step[k], l1_step[k], l2_step[k], omega)
        k1 = _two_time_rhs(g, f_tab[:, m0], *args)
        k2 = _two_time_rhs(g + 0.5 * h * k1, f_tab[:, m0 + 1], *args)
        k3 = _two_time_rhs(g + 0.5 * h * k2, f_tab[:, m0 + 1], *args)
        k4 = _two_time_rhs(g + h * k3, f_tab[:, m0 + 2], *args)
        g = g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[:, k - k0 + 1] = g[:, 0]
    if not np.all(np.isfinite(out)):
        raise NumericalFault("two-time response functions are not finite")
    return grid[k0:], out


def quadrature_consistency_check(
    schedule: PulseSchedule,
    omega: float,
    gamma: float,
    grid,
    probe_fractions=(0.2, 0.4, 0.6, 0.8, 1.0),
) -> float:
    """Worst relative deviation between the closed tables and the kernel
    quadrature of the two-time response functions.

    For each probe time t the check evaluates
    integral_0^t alpha(t, s) g_i(t, s) ds by trapezoid over the grid and
    compares entrywise against the directly solved tables, normalizing by
    the largest table magnitude over the probes.  This is the independent
    oracle for the closed-system solver.
    """
    grid = _validate_grid(schedule, grid)
    tables = solve_dissipative(schedule, omega, gamma, grid)
    n = len(grid) - 1
    probe_nodes = sorted({int(round(frac * n)) for frac in probe_fractions})
    snapshots = _march_two_time(schedule, tables, grid, probe_nodes)
    worst = 0.0
    scale = 0.0
    devs = []
    f_tab = np.array([tables.f1, tables.f2, tables.f3, tables.f4])
    for node in probe_nodes:
        t = grid[node]
        s_nodes = grid[: node + 1]
        g = snapshots[node]
        weights = 0.5 * gamma * np.exp(-gamma * (t - s_nodes))
        direct = f_tab[:, 2 * node]
        scale = max(scale, float(np.max(np.abs(direct))))
        for i in range(4):
            if node == 0:
                devs.append(0.0)
                continue
            integral = np.trapezoid(weights * g[i], s_nodes)
            devs.append(abs(integral - direct[i]))
    if scale == 0.0:
        return 0.0
    worst = max(devs) / scale
    return float(worst)
