import numpy as np
import pytest

from triqsd import (
    NoiseKernel,
    NoisePath,
    sample_kernel_path,
    sample_ou_block,
    sample_ou_path,
    validate_statistics,
)
from triqsd.errors import KernelFactorizationError, ValidationError
from triqsd.noise import factor_kernel, lag_ratio_zscores, stream_generator, write_path_csv

GRID = np.linspace(0.0, 2.0, 81)


def test_bitwise_reproducible_replay():
    a = sample_ou_path(GRID, 1.0, 42, 7)
    b = sample_ou_path(GRID, 1.0, 42, 7)
    assert np.array_equal(a.values, b.values)


def test_distinct_streams_differ():
    a = sample_ou_path(GRID, 1.0, 42, 0)
    b = sample_ou_path(GRID, 1.0, 42, 1)
    c = sample_ou_path(GRID, 1.0, 43, 0)
    assert not np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_block_matches_single_path_sampler():
    block = sample_ou_block(GRID, 1.0, 42, [3, 7, 11])
    for row, sid in enumerate([3, 7, 11]):
        single = sample_ou_path(GRID, 1.0, 42, sid)
        assert np.array_equal(block[row], single.values)


def test_block_is_chunk_size_invariant():
    full = sample_ou_block(GRID, 1.0, 9, list(range(6)))
    parts = np.vstack(
        [sample_ou_block(GRID, 1.0, 9, [0, 1]), sample_ou_block(GRID, 1.0, 9, [2, 3, 4, 5])]
    )
    assert np.array_equal(full, parts)


def test_ou_second_moments_match_kernel():
    gamma = 1.3
    vals = sample_ou_block(GRID, gamma, 5, list(range(20000)))
    report = validate_statistics((GRID, vals), NoiseKernel.exponential(gamma))
    assert report.worst("covariance") < 5.0
    assert report.worst("pseudo") < 5.0
    assert report.worst("mean") < 5.0


def test_exactness_is_step_size_independent():
    # same second moment at t regardless of how finely the path was sampled
    gamma = 2.0
    coarse = np.linspace(0.0, 1.0, 6)
    fine = np.linspace(0.0, 1.0, 201)
    n = 20000
    vc = sample_ou_block(coarse, gamma, 11, list(range(n)))
    vf = sample_ou_block(fine, gamma, 12, list(range(n)))
    for vals, grid in ((vc, coarse), (vf, fine)):
        m = np.mean(np.abs(vals[:, -1]) ** 2)
        se = np.std(np.abs(vals[:, -1]) ** 2, ddof=1) / np.sqrt(n)
        assert abs(m - gamma / 2) < 5 * se


def test_lag_ratio_matches_exponential_decay():
    gamma = 1.0
    grid = np.arange(0.0, 5.0 + 1e-12, 0.01)
    vals = sample_ou_block(grid, gamma, 2, list(range(20000)))
    for tau, ratio, target, z in lag_ratio_zscores(vals, grid, gamma, (0.1, 0.5, 1.0)):
        assert z < 5.0, (tau, ratio, target, z)


def test_validate_statistics_flags_broken_sampler():
    vals = np.zeros((500, len(GRID)), dtype=complex)
    report = validate_statistics((GRID, vals), NoiseKernel.exponential(1.0))
    assert report.worst("covariance") > 100.0


def test_validate_statistics_requires_common_grid():
    a = sample_ou_path(GRID, 1.0, 1, 0)
    b = sample_ou_path(GRID[:-1], 1.0, 1, 1)
    with pytest.raises(ValidationError):
        validate_statistics([a, b] * 60, NoiseKernel.exponential(1.0))


def test_validate_statistics_requires_enough_paths():
    paths = [sample_ou_path(GRID, 1.0, 1, i) for i in range(5)]
    with pytest.raises(ValidationError):
        validate_statistics(paths, NoiseKernel.exponential(1.0))


def test_kernel_path_zero_kernel_is_identically_zero():
    kern = NoiseKernel.tabulated(lambda t, s: np.zeros_like(np.asarray(t) * np.asarray(s)))
    path = sample_kernel_path(GRID[:10], kern, 3, 0)
    assert np.allclose(path.values, 0.0)


def test_kernel_path_single_point_variance():
    kern = NoiseKernel.exponential(2.0)
    vals = np.array(
        [sample_kernel_path(np.array([1.0]), kern, 8, sid).values[0] for sid in range(4000)]
    )
    m = np.mean(np.abs(vals) ** 2)
    se = np.std(np.abs(vals) ** 2, ddof=1) / np.sqrt(len(vals))
    assert abs(m - 1.0) < 5 * se  # alpha(t, t) = gamma / 2 = 1


def test_coloring_agrees_with_exact_sampler():
    gamma = 1.0
    grid = np.linspace(0.0, 2.0, 41)
    kern = NoiseKernel.exponential(gamma)
    coloring = factor_kernel(kern.gram(grid))
    rng = stream_generator(77, 0, namespace=3)
    w = (rng.standard_normal((20000, len(grid))) + 1j * rng.standard_normal((20000, len(grid)))) / np.sqrt(2.0)
    vals = w @ coloring.T
    report = validate_statistics((grid, vals), kern)
    assert report.max_zscore < 5.0


def test_non_psd_kernel_rejected():
    kern = NoiseKernel.tabulated(
        lambda t, s: -np.ones_like(np.asarray(t) * np.asarray(s))
    )
    with pytest.raises(KernelFactorizationError):
        sample_kernel_path(GRID[:5], kern, 0, 0)


def test_stream_cross_correlation_consistent_with_zero():
    vals = sample_ou_block(GRID, 1.0, 6, list(range(4000)))
    a = vals[0::2, 40]
    b = vals[1::2, 40]
    prod = a * b.conj()
    se = np.std(prod.real, ddof=1) / np.sqrt(len(prod))
    assert abs(np.mean(prod.real)) < 5 * se


def test_invalid_arguments():
    with pytest.raises(ValidationError):
        sample_ou_path(GRID[::-1], 1.0, 0, 0)
    with pytest.raises(ValidationError):
        sample_ou_path(GRID, -1.0, 0, 0)
    with pytest.raises(ValidationError):
        sample_ou_path(GRID, 1.0, -4, 0)


def test_path_csv_dump(tmp_path):
    path = sample_ou_path(GRID[:4], 1.0, 0, 0)
    dest = tmp_path / "noise.csv"
    write_path_csv(path, dest)
    lines = dest.read_text().strip().splitlines()
    assert lines[0] == "t,re_z,im_z"
    assert len(lines) == 5
    t, re, im = (float(x) for x in lines[1].split(","))
    assert t == 0.0
    assert complex(re, im) == path.values[0]
