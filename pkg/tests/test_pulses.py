import numpy as np
import pytest

from triqsd import (
    free_evolution,
    half_grid,
    nested_udd_times,
    segment_grid,
    signs_at,
    single_layer_udd,
    step_signs,
    udd_times,
)
from triqsd.errors import ValidationError


def test_udd_single_pulse_is_midpoint_echo():
    assert np.allclose(udd_times(1, 1.0), [0.5])


def test_udd_two_pulses():
    assert np.allclose(udd_times(2, 1.0), [0.25, 0.75])


def test_udd_three_pulses():
    assert np.allclose(udd_times(3, 1.0), [0.146447, 0.5, 0.853553], atol=1e-6)


@pytest.mark.parametrize("n", range(1, 21))
def test_udd_mirror_symmetry(n):
    t = udd_times(n, 3.7)
    assert np.allclose(t + t[::-1], 3.7, rtol=1e-12, atol=1e-12)


def test_udd_invalid_arguments():
    with pytest.raises(ValueError):
        udd_times(0, 1.0)
    with pytest.raises(ValueError):
        udd_times(3, 0.0)
    with pytest.raises(ValueError):
        udd_times(3, -1.0)


@pytest.mark.parametrize("n1", [1, 2, 3, 5, 10, 13, 20])
@pytest.mark.parametrize("n2", [0, 1, 2, 10, 20])
def test_nested_pulse_count_law(n1, n2):
    sched = nested_udd_times(n1, n2, 2.0)
    assert sched.n_pulses == n1 + (n1 - 1) * n2


def test_nested_hundred_pulses():
    assert nested_udd_times(10, 10, 1.0).n_pulses == 100


def test_nested_small_example():
    sched = nested_udd_times(2, 1, 1.0)
    assert np.allclose(sched.outer_times, [0.25, 0.75])
    assert np.allclose(sched.inner_times, [0.5])
    assert sched.n_pulses == 3


def test_nested_degenerates_to_single_layer():
    a = nested_udd_times(6, 0, 2.0)
    b = single_layer_udd(6, 2.0)
    assert np.array_equal(a.outer_times, b.outer_times)
    assert len(a.inner_times) == 0


def test_inner_times_strictly_inside_outer_intervals():
    sched = nested_udd_times(5, 4, 3.0)
    outer = np.concatenate([[0.0], sched.outer_times, [3.0]])
    for t in sched.inner_times:
        k = np.searchsorted(sched.outer_times, t)
        # interior intervals only: every inner pulse is between two outer pulses
        assert 1 <= k <= len(sched.outer_times) - 1
        assert outer[k] < t < outer[k + 1]
    assert not np.intersect1d(sched.inner_times, sched.outer_times).size


def test_boundary_interval_flag_adds_edge_sequences():
    sched = nested_udd_times(4, 3, 1.0, include_boundary_intervals=True)
    assert sched.n_pulses == 4 + (4 + 1) * 3
    assert np.any(sched.inner_times < sched.outer_times[0])
    assert np.any(sched.inner_times > sched.outer_times[-1])


def test_signs_before_first_pulse():
    sched = nested_udd_times(3, 2, 1.0)
    p, q, l1, l2 = signs_at(sched, 0.0)
    assert (p, q, l1, l2) == (1.0, 1.0, 1.0, 0.0)


def test_signs_single_layer_after_midpoint():
    sched = single_layer_udd(1, 1.0)
    p, q, l1, l2 = signs_at(sched, 0.75)
    assert (p, q) == (-1.0, 1.0)
    assert (l1, l2) == (0.0, 1.0)


def test_signs_after_one_inner_pulse_only():
    # N1=2: first inner pulse of the interior interval comes before any time
    # at which p has flipped twice; pick t just past that inner pulse
    sched = nested_udd_times(2, 2, 1.0)
    t = sched.inner_times[0] + 1e-9
    assert sched.outer_times[0] < t < sched.outer_times[1]
    p, q, l1, l2 = signs_at(sched, t)
    assert (p, q) == (-1.0, -1.0)
    assert (l1, l2) == (0.0, -1.0)
    # and with p still +1 (inner pulse in a hypothetical leading interval)
    sched_b = nested_udd_times(2, 2, 1.0, include_boundary_intervals=True)
    t = sched_b.inner_times[0] + 1e-9
    assert t < sched_b.outer_times[0]
    p, q, l1, l2 = signs_at(sched_b, t)
    assert (p, q) == (1.0, -1.0)
    assert (l1, l2) == (-1.0, 0.0)


def test_signs_right_continuous_at_pulse_time():
    sched = single_layer_udd(1, 1.0)
    p, _, _, _ = signs_at(sched, 0.5)
    assert p == -1.0


def test_signs_out_of_range():
    sched = single_layer_udd(1, 1.0)
    with pytest.raises(ValidationError):
        signs_at(sched, -0.1)
    with pytest.raises(ValidationError):
        signs_at(sched, 1.1)


def test_l_coefficient_identities_on_dense_scan():
    sched = nested_udd_times(7, 3, 2.0)
    t = np.linspace(0.0, 2.0, 4001)
    _, _, l1, l2 = signs_at(sched, t)
    assert np.all(l1 * l2 == 0.0)
    assert np.all((l1 + l2) ** 2 == 1.0)


def test_parity_flips_exactly_at_pulse_times():
    sched = nested_udd_times(6, 2, 1.0)
    eps = 1e-12
    for t in sched.outer_times:
        p_before = signs_at(sched, t - eps)[0]
        p_after = signs_at(sched, t)[0]
        assert p_after == -p_before
    for t in sched.inner_times:
        q_before = signs_at(sched, t - eps)[1]
        q_after = signs_at(sched, t)[1]
        assert q_after == -q_before
    # constant between events
    events = np.sort(np.concatenate([[0.0], sched.all_pulse_times(), [1.0]]))
    for a, b in zip(events[:-1], events[1:]):
        probes = np.linspace(a, b, 7)[1:-1]
        p, q, _, _ = signs_at(sched, probes)
        assert np.all(p == p[0]) and np.all(q == q[0])


def test_segment_grid_uniform_without_pulses():
    grid = segment_grid(free_evolution(1.0), 4)
    assert np.allclose(grid, [0.0, 0.25, 0.5, 0.75, 1.0])


def test_segment_grid_contains_pulse_times_exactly():
    sched = single_layer_udd(1, 1.0)
    assert abs(sched.outer_times[0] - 0.5) < 1e-15
    assert sched.outer_times[0] in segment_grid(sched, 2)
    sched = nested_udd_times(10, 10, 1.0)
    grid = segment_grid(sched, 3)
    assert np.all(np.isin(sched.all_pulse_times(), grid))
    assert np.all(np.diff(grid) > 0)


def test_segment_grid_max_step_refinement():
    grid = segment_grid(free_evolution(1.0), 1, max_step=0.3)
    assert np.max(np.diff(grid)) <= 0.3 + 1e-15


def test_step_signs_match_pointwise_evaluation():
    sched = nested_udd_times(4, 3, 1.0)
    grid = segment_grid(sched, 5)
    p, q, l1, l2 = step_signs(sched, grid)
    mid = 0.5 * (grid[:-1] + grid[1:])
    pm, qm, l1m, l2m = signs_at(sched, mid)
    assert np.array_equal(p, pm)
    assert np.array_equal(q, qm)
    assert np.array_equal(l1, l1m)
    assert np.array_equal(l2, l2m)


def test_half_grid_interleaves_midpoints():
    grid = np.array([0.0, 0.5, 1.0])
    assert np.allclose(half_grid(grid), [0.0, 0.25, 0.5, 0.75, 1.0])
