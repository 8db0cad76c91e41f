"""Single-trajectory integration of the time-local stochastic equations.

The dephasing generator is diagonal,
    d psi / dt = [-i w p(t) J_z + p(t) z*(t) J_z - p(t) f(t) J_z^2] psi,
with the damping term carrying a minus sign so coherences decay.  The
dissipative generator is
    d psi / dt = [-i p w J_z + (l1 J_- + l2 J_+) z*
                  - l1 f1 J_+ J_-  - l1 f2 J_+^2  - l1 f3 J_+ J_z J_-
                  - l2 f2 J_- J_+  - l2 f1 J_-^2  - l2 f4 J_- J_z J_+] psi.
The state is deliberately NOT normalized during evolution: the ensemble
average of the raw outer products reconstructs the density matrix.

``rhs_dephasing`` / ``rhs_dissipative`` build the generator from explicit
operator matrices and serve as the reference forms; the chunked kernels in
``kernels.py`` hard-code the same arithmetic componentwise and are checked
against these in the tests.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .coefficients import CoefficientTables
from .errors import GridAlignmentError, NumericalFault, ValidationError
from .noise import NoisePath
from .operators import OperatorSet, build_operator_set
from .pulses import PulseSchedule, signs_at, step_signs

_OPS = build_operator_set()


@dataclass(frozen=True)
class TrajectoryStates:
    """Unnormalized state vectors recorded at the requested output times."""

    times: np.ndarray
    psis: np.ndarray  # (n_out, 3) complex
    stream_id: int


def rhs_dephasing(psi, t, zconj, schedule: PulseSchedule, tables: CoefficientTables):
    """Instantaneous time derivative of one dephasing trajectory."""
    p, _, _, _ = signs_at(schedule, t)
    f = tables.interp(t)
    jz = _OPS.jz
    gen = p * (-1j * tables.omega * jz + zconj * jz - f * (jz @ jz))
    return gen @ psi


def rhs_dissipative(
    psi, t, zconj, schedule: PulseSchedule, tables: CoefficientTables, ops: OperatorSet = _OPS
):
    """Instantaneous time derivative of one dissipative trajectory."""
    p, _, l1, l2 = signs_at(schedule, t)
    f1, f2, f3, f4 = tables.interp(t)
    jm, jp, jz = ops.jminus, ops.jplus, ops.jz
    gen = (
        -1j * p * tables.omega * jz
        + (l1 * jm + l2 * jp) * zconj
        - l1 * f1 * (jp @ jm)
        - l1 * f2 * (jp @ jp)
        - l1 * f3 * (jp @ jz @ jm)
        - l2 * f2 * (jm @ jp)
        - l2 * f1 * (jm @ jm)
        - l2 * f4 * (jm @ jz @ jp)
    )
    return gen @ psi


def output_indices(grid: np.ndarray, output_times) -> np.ndarray:
    """Map requested output times onto exact coarse-grid node indices."""
    times = np.asarray(output_times, dtype=float)
    idx = np.searchsorted(grid, times)
    idx = np.clip(idx, 0, len(grid) - 1)
    left_ok = idx > 0
    better_left = left_ok & (
        np.abs(times - grid[np.maximum(idx - 1, 0)]) < np.abs(grid[idx] - times)
    )
    idx[better_left] -= 1
    if np.any(np.abs(grid[idx] - times) > 1e-9 * max(1.0, grid[-1])):
        raise GridAlignmentError("output times must coincide with grid nodes")
    return idx.astype(np.int64)


def snapped_output_times(grid: np.ndarray, requested) -> np.ndarray:
    """Nearest grid nodes to the requested times, deduplicated, ascending."""
    times = np.asarray(requested, dtype=float)
    idx = np.searchsorted(grid, times)
    idx = np.clip(idx, 0, len(grid) - 1)
    better_left = (idx > 0) & (
        np.abs(times - grid[np.maximum(idx - 1, 0)]) < np.abs(grid[idx] - times)
    )
    idx[better_left] -= 1
    return grid[np.unique(idx)]


def integrate_trajectory(
    model: str,
    schedule: PulseSchedule,
    noise: NoisePath,
    tables: CoefficientTables,
    psi0,
    output_times,
    use_numba=None,
) -> TrajectoryStates:
    """RK4 march of one trajectory, recording states at output times.

    The noise must be sampled exactly on the tables' half-step grid so every
    stage evaluation is a lookup; output times must be coarse-grid nodes.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (3,):
        raise ValidationError("psi0 must be a length-3 complex vector")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-9:
        raise ValidationError("psi0 must have unit norm")
    if tables.model != model:
        raise ValidationError("tables were computed for model %r" % tables.model)
    tau = tables.times
    if len(noise.grid) != len(tau) or not np.array_equal(noise.grid, tau):
        raise GridAlignmentError("noise grid must equal the tables' half-step grid")
    grid = tables.coarse_grid
    out_idx = output_indices(grid, output_times)
    order = np.argsort(out_idx, kind="stable")
    out_idx_sorted = out_idx[order]
    h_steps = np.diff(grid)
    p_step, _, l1_step, l2_step = step_signs(schedule, grid)
    zvals = noise.values[None, :]
    psi = psi0[None, :]
    if model == "dephasing":
        raw = kernels.dephasing_rk4(
            psi, zvals, p_step, tables.f, h_steps, tables.omega, out_idx_sorted, use_numba
        )
    elif model == "dissipative":
        raw = kernels.dissipative_rk4(
            psi,
            zvals,
            p_step,
            l1_step,
            l2_step,
            tables.f1,
            tables.f2,
            tables.f3,
            tables.f4,
            h_steps,
            tables.omega,
            out_idx_sorted,
            use_numba,
        )
    else:
        raise ValidationError("unknown model %r" % (model,))
    states = np.empty_like(raw[0])
    states[order] = raw[0]
    if not np.all(np.isfinite(states)):
        raise NumericalFault("trajectory %d produced non-finite state" % noise.stream_id)
    return TrajectoryStates(times=grid[out_idx], psis=states, stream_id=noise.stream_id)
