"""Sampling of the complex Gaussian driving noise and its statistical checks.

The driving process has zero mean, zero (z, z) pseudo-correlation and
two-time correlation alpha(t, s).  For the exponential (memory rate gamma)
kind, alpha(t, s) = (gamma / 2) exp(-gamma |t - s|) and paths are drawn by
the exact stationary update, so the discrete-time law is correct for any
grid spacing.  Arbitrary kernels are supported by coloring white noise
through a factorization of the Gram matrix.

Reproducibility contract: a path is a pure function of
(master_seed, stream_id, grid, kernel).  Streams are derived with
``numpy.random.SeedSequence(master_seed, spawn_key=(namespace, stream_id))``
so any subset of paths can be regenerated independently and in any order.
"""

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import KernelFactorizationError, ValidationError
from .kernels import ou_scan


def stream_generator(master_seed: int, stream_id: int, namespace: int = 0) -> np.random.Generator:
    """Independent, order-insensitive RNG stream for one trajectory."""
    if master_seed < 0 or stream_id < 0 or namespace < 0:
        raise ValidationError("seed coordinates must be non-negative")
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(namespace, stream_id))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class NoiseKernel:
    """Two-time correlation alpha(t, s); Hermitian, alpha(t,s) = alpha(s,t)*."""

    kind: str
    gamma: float = 0.0
    evaluator: Callable | None = None

    @staticmethod
    def exponential(gamma: float) -> "NoiseKernel":
        if gamma <= 0:
            raise ValidationError("gamma must be positive, got %r" % (gamma,))
        return NoiseKernel(kind="exponential", gamma=float(gamma))

    @staticmethod
    def tabulated(evaluator: Callable) -> "NoiseKernel":
        """Kernel given as a vectorized callable alpha(t, s)."""
        return NoiseKernel(kind="tabulated", evaluator=evaluator)

    def alpha(self, t, s):
        if self.kind == "exponential":
            return 0.5 * self.gamma * np.exp(-self.gamma * np.abs(np.asarray(t) - np.asarray(s)))
        return self.evaluator(t, s)

    def gram(self, grid: np.ndarray) -> np.ndarray:
        t = np.asarray(grid, dtype=float)
        return np.asarray(self.alpha(t[:, None], t[None, :]), dtype=complex)


@dataclass(frozen=True)
class NoisePath:
    """One realization of the driving noise z*_t on a fixed grid."""

    grid: np.ndarray
    values: np.ndarray
    stream_id: int

    def __post_init__(self):
        if len(self.values) != len(self.grid):
            raise ValidationError("values and grid length mismatch")


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1:
        raise ValidationError("grid must be a non-empty 1-D array")
    if len(grid) > 1 and not np.all(np.diff(grid) > 0):
        raise ValidationError("grid must be strictly ascending")
    return grid


def _ou_update_tables(grid: np.ndarray, gamma: float):
    dt = np.diff(grid)
    decay = np.exp(-gamma * dt)
    stddev = np.sqrt(0.25 * gamma * (1.0 - decay**2))
    init_std = np.sqrt(0.25 * gamma)
    return decay, stddev, init_std


def sample_ou_path(grid, gamma: float, master_seed: int, stream_id: int) -> NoisePath:
    """One exponential-kernel path via the exact stationary OU update.

    Real and imaginary parts are independent OU processes of variance
    gamma / 4 and decay rate gamma, giving M[z z*] = (gamma/2) e^(-gamma |dt|)
    and M[z z] = 0 in distribution for any grid.
    """
    grid = _check_grid(grid)
    if gamma <= 0:
        raise ValidationError("gamma must be positive, got %r" % (gamma,))
    rng = stream_generator(master_seed, stream_id)
    normals = rng.standard_normal((1, len(grid), 2))
    decay, stddev, init_std = _ou_update_tables(grid, gamma)
    values = ou_scan(normals, decay, stddev, init_std)[0]
    return NoisePath(grid=grid, values=values, stream_id=stream_id)


def sample_ou_block(
    grid,
    gamma: float,
    master_seed: int,
    stream_ids: Sequence[int],
    namespace: int = 0,
    use_numba=None,
) -> np.ndarray:
    """Paths for many streams at once; row i is stream ``stream_ids[i]``.

    Each row is bit-identical to the single-path sampler with the same
    coordinates, so chunk boundaries never change results.
    """
    grid = _check_grid(grid)
    if gamma <= 0:
        raise ValidationError("gamma must be positive, got %r" % (gamma,))
    n_nodes = len(grid)
    normals = np.empty((len(stream_ids), n_nodes, 2))
    for row, sid in enumerate(stream_ids):
        rng = stream_generator(master_seed, int(sid), namespace)
        normals[row] = rng.standard_normal((n_nodes, 2))
    decay, stddev, init_std = _ou_update_tables(grid, gamma)
    return ou_scan(normals, decay, stddev, init_std, use_numba=use_numba)


def factor_kernel(gram: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Coloring matrix B with B B^dagger = gram, via Hermitian eigensplit.

    Raises KernelFactorizationError when the Gram matrix has an eigenvalue
    below -tol * max(eigenvalue); tiny negative eigenvalues inside the
    tolerance are clamped to zero.
    """
    w, v = np.linalg.eigh(gram)
    scale = max(float(w[-1]), 0.0)
    if np.any(w < -tol * max(scale, 1.0)):
        raise KernelFactorizationError(
            "kernel Gram matrix is not positive semidefinite (min eigenvalue %.3e)" % w[0]
        )
    return v * np.sqrt(np.clip(w, 0.0, None))


def sample_kernel_path(grid, kernel: NoiseKernel, master_seed: int, stream_id: int) -> NoisePath:
    """Path for an arbitrary Hermitian-PSD kernel by coloring white noise.

    Statistically equivalent to ``sample_ou_path`` for the exponential kind;
    cost is cubic in grid size, so this is the validation route rather than
    the production sampler.
    """
    grid = _check_grid(grid)
    coloring = factor_kernel(kernel.gram(grid))
    rng = stream_generator(master_seed, stream_id, namespace=1)
    w = rng.standard_normal((len(grid), 2))
    white = (w[:, 0] + 1j * w[:, 1]) / np.sqrt(2.0)
    return NoisePath(grid=grid, values=coloring @ white, stream_id=stream_id)


@dataclass(frozen=True)
class MomentCheck:
    label: str
    estimate: complex
    target: complex
    zscore: float


@dataclass(frozen=True)
class StatisticsReport:
    n_paths: int
    checks: list

    def worst(self, prefix: str) -> float:
        vals = [c.zscore for c in self.checks if c.label.startswith(prefix)]
        if not vals:
            raise KeyError(prefix)
        return max(vals)

    @property
    def max_zscore(self) -> float:
        return max(c.zscore for c in self.checks)


def _as_value_matrix(paths) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(paths, np.ndarray):
        raise ValidationError("pass NoisePath objects or (grid, matrix); got a bare array")
    if isinstance(paths, tuple) and len(paths) == 2:
        grid, mat = paths
        return _check_grid(grid), np.asarray(mat)
    paths = list(paths)
    grid = paths[0].grid
    for p in paths[1:]:
        if len(p.grid) != len(grid) or not np.array_equal(p.grid, grid):
            raise ValidationError("paths do not share a common grid")
    return grid, np.array([p.values for p in paths])


def validate_statistics(paths, kernel: NoiseKernel, probe_count: int = 6) -> StatisticsReport:
    """Worst-case z-scores of the empirical first and second moments.

    Probes a spread of grid nodes and, for every ordered node pair, compares
    the empirical mean, covariance M[z z*] and pseudo-correlation M[z z]
    against the kernel.  Deterministic given the paths.
    """
    grid, values = _as_value_matrix(paths)
    n = values.shape[0]
    if n < 100:
        raise ValidationError("need at least 100 paths, got %d" % n)
    idx = np.unique(np.linspace(0, len(grid) - 1, probe_count).astype(int))
    sqrt_n = np.sqrt(n)
    checks = []

    def zsplit(samples, target):
        est = samples.mean()
        dev_re = est.real - np.real(target)
        dev_im = est.imag - np.imag(target)
        se_re = max(samples.real.std(ddof=1) / sqrt_n, 1e-300)
        se_im = max(samples.imag.std(ddof=1) / sqrt_n, 1e-300)
        return complex(est), max(abs(dev_re) / se_re, abs(dev_im) / se_im)

    for i in idx:
        est, z = zsplit(values[:, i], 0.0)
        checks.append(MomentCheck("mean[t=%.4g]" % grid[i], est, 0.0, z))
    for ai, a in enumerate(idx):
        for b in idx[ai:]:
            samples = values[:, a] * values[:, b].conj()
            target = complex(kernel.alpha(grid[a], grid[b]))
            est, z = zsplit(samples, target)
            checks.append(
                MomentCheck("covariance[t=%.4g,s=%.4g]" % (grid[a], grid[b]), est, target, z)
            )
            samples = values[:, a] * values[:, b]
            est, z = zsplit(samples, 0.0)
            checks.append(
                MomentCheck("pseudo[t=%.4g,s=%.4g]" % (grid[a], grid[b]), est, 0.0, z)
            )
    return StatisticsReport(n_paths=n, checks=checks)


def lag_ratio_zscores(values: np.ndarray, grid: np.ndarray, gamma: float, lags: Iterable[float]):
    """z-scores of M[z_t z*_{t+tau}] / M[|z_t|^2] against exp(-gamma tau).

    The base time is a third of the way into the grid; the ratio variance
    comes from the delta method on the joint sample moments.
    """
    grid = np.asarray(grid)
    dt = grid[1] - grid[0]
    base = len(grid) // 3
    n = values.shape[0]
    out = []
    for tau in lags:
        k = int(round(tau / dt))
        if base + k >= len(grid):
            raise ValidationError("lag %.3g runs past the grid" % tau)
        a = (values[:, base] * values[:, base + k].conj()).real
        b = np.abs(values[:, base]) ** 2
        a_bar, b_bar = a.mean(), b.mean()
        r = a_bar / b_bar
        cov = np.cov(a, b, ddof=1)
        var_r = (cov[0, 0] + r * r * cov[1, 1] - 2.0 * r * cov[0, 1]) / (b_bar**2 * n)
        se = np.sqrt(max(var_r, 1e-300))
        target = np.exp(-gamma * (grid[base + k] - grid[base]))
        out.append((tau, r, target, abs(r - target) / se))
    return out


def iter_ou_paths(
    grid, gamma: float, master_seed: int, n_paths: int, chunk: int = 4096
) -> Iterator[NoisePath]:
    """Stream n_paths exponential-kernel paths without holding them all."""
    grid = _check_grid(grid)
    for start in range(0, n_paths, chunk):
        ids = range(start, min(start + chunk, n_paths))
        block = sample_ou_block(grid, gamma, master_seed, list(ids))
        for row, sid in enumerate(ids):
            yield NoisePath(grid=grid, values=block[row], stream_id=sid)


def write_path_csv(path: NoisePath, dest) -> None:
    """Debug dump: one row (t, re_z, im_z) per grid node."""
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,re_z,im_z\n")
        for t, v in zip(path.grid, path.values):
            fh.write("%.17g,%.17g,%.17g\n" % (t, v.real, v.imag))
