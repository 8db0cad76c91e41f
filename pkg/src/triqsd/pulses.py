"""Pulse timing for single-layer and two-layer nested decoupling sequences.

Delta pulses are never integrated numerically: the control enters the
dynamics only through the piecewise sign functions p(t) (outer layer) and
q(t) (inner layer), which flip at the pulse times and are evaluated
right-continuously so a pulse takes effect at its own time point.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


def udd_times(n_pulses: int, total_time: float) -> np.ndarray:
    """Pulse times t_j = T sin^2(j pi / (2N + 2)), j = 1..N.

    The sequence is mirror-symmetric: t_j + t_{N+1-j} = T.
    """
    if n_pulses < 1:
        raise ValidationError("n_pulses must be >= 1, got %r" % (n_pulses,))
    if total_time <= 0:
        raise ValidationError("total_time must be positive, got %r" % (total_time,))
    j = np.arange(1, n_pulses + 1, dtype=float)
    return total_time * np.sin(j * np.pi / (2.0 * n_pulses + 2.0)) ** 2


@dataclass(frozen=True)
class PulseSchedule:
    """Outer/inner pulse times over [0, total_time].

    ``inner_times`` hold the nested sequence; with
    ``include_boundary_intervals`` False (the default) inner pulses appear
    only in the N1 - 1 interior outer intervals, so the total pulse count
    is N1 + (N1 - 1) * N2.
    """

    total_time: float
    outer_count: int
    inner_count: int
    outer_times: np.ndarray
    inner_times: np.ndarray
    include_boundary_intervals: bool = False

    def __post_init__(self):
        self.outer_times.setflags(write=False)
        self.inner_times.setflags(write=False)

    @property
    def n_pulses(self) -> int:
        return len(self.outer_times) + len(self.inner_times)

    def all_pulse_times(self) -> np.ndarray:
        return np.sort(np.concatenate([self.outer_times, self.inner_times]))

    def to_dict(self) -> dict:
        return {
            "total_time": self.total_time,
            "outer_count": self.outer_count,
            "inner_count": self.inner_count,
            "outer_times": self.outer_times.tolist(),
            "inner_times": self.inner_times.tolist(),
            "include_boundary_intervals": self.include_boundary_intervals,
        }


def free_evolution(total_time: float) -> PulseSchedule:
    """Schedule with no pulses at all (p = q = +1 throughout)."""
    if total_time <= 0:
        raise ValidationError("total_time must be positive, got %r" % (total_time,))
    empty = np.empty(0, dtype=float)
    return PulseSchedule(float(total_time), 0, 0, empty, empty.copy())


def single_layer_udd(n_pulses: int, total_time: float) -> PulseSchedule:
    """Outer-layer-only schedule; n_pulses = 0 degenerates to free evolution."""
    if n_pulses == 0:
        return free_evolution(total_time)
    outer = udd_times(n_pulses, total_time)
    return PulseSchedule(float(total_time), n_pulses, 0, outer, np.empty(0, dtype=float))


def nested_udd_times(
    n_outer: int,
    n_inner: int,
    total_time: float,
    include_boundary_intervals: bool = False,
) -> PulseSchedule:
    """Two-layer schedule: inner UDD sequences between consecutive outer pulses.

    Inner times in the outer interval [t_j, t_{j+1}) follow
    t_{j,k} = t_j + (t_{j+1} - t_j) sin^2(k pi / (2 N2 + 2)).  By default only
    the interior intervals carry inner pulses, matching the pulse-count law
    N1 + (N1 - 1) N2; the boundary flag also fills [0, t_1) and [t_{N1}, T].
    """
    if n_outer < 1:
        raise ValidationError("n_outer must be >= 1, got %r" % (n_outer,))
    if n_inner < 0:
        raise ValidationError("n_inner must be >= 0, got %r" % (n_inner,))
    outer = udd_times(n_outer, total_time)
    if n_inner == 0:
        inner = np.empty(0, dtype=float)
    else:
        if include_boundary_intervals:
            edges = np.concatenate([[0.0], outer, [total_time]])
        else:
            edges = outer
        frac = np.sin(np.arange(1, n_inner + 1) * np.pi / (2.0 * n_inner + 2.0)) ** 2
        blocks = [a + (b - a) * frac for a, b in zip(edges[:-1], edges[1:])]
        inner = np.concatenate(blocks) if blocks else np.empty(0, dtype=float)
    return PulseSchedule(
        float(total_time), n_outer, n_inner, outer, inner, include_boundary_intervals
    )


def signs_at(schedule: PulseSchedule, t):
    """(p, q, l1, l2) at time t; pulse times use the post-pulse sign.

    p counts outer-pulse parity, q inner-pulse parity;
    l1 = q (1 + p) / 2 and l2 = q (1 - p) / 2 select the effective coupling.
    Accepts a scalar or an array of times.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > schedule.total_time):
        raise ValidationError("time outside [0, total_time]")
    n_out = np.searchsorted(schedule.outer_times, t_arr, side="right")
    n_in = np.searchsorted(schedule.inner_times, t_arr, side="right")
    p = 1.0 - 2.0 * (n_out % 2)
    q = 1.0 - 2.0 * (n_in % 2)
    l1 = q * (1.0 + p) / 2.0
    l2 = q * (1.0 - p) / 2.0
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(p), float(q), float(l1), float(l2)
    return p, q, l1, l2


def segment_grid(
    schedule: PulseSchedule,
    min_steps_per_segment: int,
    max_step: float | None = None,
) -> np.ndarray:
    """Strictly increasing integration grid aligned to every pulse time.

    Each inter-pulse segment is subdivided uniformly into at least
    ``min_steps_per_segment`` steps, refined further so no step exceeds
    ``max_step`` when given.  Pulse times, 0 and T are exact grid members,
    so p and q are constant on every open grid interval.
    """
    if min_steps_per_segment < 1:
        raise ValidationError("min_steps_per_segment must be >= 1")
    edges = np.concatenate([[0.0], schedule.all_pulse_times(), [schedule.total_time]])
    pieces = [np.array([0.0])]
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        m = min_steps_per_segment
        if max_step is not None and max_step > 0:
            m = max(m, int(np.ceil((b - a) / max_step)))
        pieces.append(np.linspace(a, b, m + 1)[1:])
    return np.concatenate(pieces)


def step_signs(schedule: PulseSchedule, grid: np.ndarray):
    """Per-step (p, q, l1, l2) arrays for a pulse-aligned grid.

    Entry k is the sign on the open interval (grid[k], grid[k+1]); because
    the grid contains every pulse time, the right-continuous value at
    grid[k] is exactly the segment value.
    """
    return signs_at(schedule, grid[:-1])


def half_grid(grid: np.ndarray) -> np.ndarray:
    """Grid refined with the midpoint of every step (2n - 1 nodes).

    Integrator stages and noise samples live on this refinement.
    """
    out = np.empty(2 * len(grid) - 1, dtype=float)
    out[0::2] = grid
    out[1::2] = 0.5 * (grid[:-1] + grid[1:])
    return out
