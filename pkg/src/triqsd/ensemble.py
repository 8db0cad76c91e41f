"""Monte Carlo ensembles: density-matrix reconstruction and observables.

The density matrix is the plain average of trajectory outer products,
rho(t) = (1/n) sum_i |psi_i(t)><psi_i(t)|, with NO per-trajectory
normalization: the linear unraveling puts the weight into the state norms
and averaging restores unit trace only in expectation.  Mixed initial
states are decomposed into eigencomponents, each run as its own
sub-ensemble on disjoint noise streams, and recombined linearly.

Standard errors: matrix entries and the trace use the per-trajectory
sample variance; fidelity, being nonlinear in rho, uses leave-one-block-out
jackknife over a fixed deterministic block assignment (trajectory i goes to
block i mod k).

Reported observables live in the toggling frame in which the trajectory
equations evolve; ``frame="lab"`` conjugates each output by the accumulated
pulse operators instead.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .coefficients import CoefficientTables, solve_dephasing, solve_dissipative
from .errors import NumericalFault, ValidationError
from .noise import sample_ou_block
from .operators import OperatorSet, build_operator_set
from .pulses import PulseSchedule, half_grid, segment_grid, step_signs
from .trajectory import output_indices, snapped_output_times

_OPS = build_operator_set()

DEFAULT_CHUNK = 256
UNIFORM_REFERENCE = np.full(3, 1.0 / np.sqrt(3.0), dtype=complex)


@dataclass(frozen=True)
class InitialStateSpec:
    """Pure amplitudes, or a mixed state interpolating toward a reference.

    The mixed ("werner") kind is
        rho0 = ((1 - m) / 2) I + ((3 m - 1) / 2) |ref><ref|
    with mixing degree m in [1/3, 1]: maximally mixed at 1/3, pure at 1.
    """

    kind: str
    amplitudes: np.ndarray | None = None
    mixing: float | None = None
    reference: np.ndarray | None = None

    @staticmethod
    def pure(amplitudes) -> "InitialStateSpec":
        amp = np.asarray(amplitudes, dtype=complex)
        if amp.shape != (3,):
            raise ValidationError("pure amplitudes must be a length-3 vector")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > 1e-6:
            raise ValidationError("pure amplitudes must have unit norm")
        return InitialStateSpec(kind="pure", amplitudes=amp / norm)

    @staticmethod
    def werner(mixing: float, reference=None) -> "InitialStateSpec":
        if not (1.0 / 3.0 - 1e-12 <= mixing <= 1.0 + 1e-12):
            raise ValidationError("mixing degree must lie in [1/3, 1]")
        ref = UNIFORM_REFERENCE if reference is None else np.asarray(reference, dtype=complex)
        if ref.shape != (3,):
            raise ValidationError("reference state must be a length-3 vector")
        norm = np.linalg.norm(ref)
        if abs(norm - 1.0) > 1e-6:
            raise ValidationError("reference state must have unit norm")
        return InitialStateSpec(kind="werner", mixing=float(mixing), reference=ref / norm)

    def density(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.amplitudes, self.amplitudes.conj())
        m = self.mixing
        proj = np.outer(self.reference, self.reference.conj())
        return 0.5 * (1.0 - m) * np.eye(3, dtype=complex) + 0.5 * (3.0 * m - 1.0) * proj


def decompose_initial(spec: InitialStateSpec):
    """Weighted orthonormal pure components of the initial state.

    Weights come in descending order with a stable basis-index tie-break;
    zero-weight components are dropped.  A pure spec passes through intact.
    """
    if spec.kind == "pure":
        return [(1.0, spec.amplitudes.copy())]
    w, v = np.linalg.eigh(spec.density())
    order = np.argsort(-w, kind="stable")
    comps = []
    for j in order:
        weight = float(w[j])
        if weight > 1e-14:
            comps.append((weight, np.ascontiguousarray(v[:, j])))
    total = sum(c[0] for c in comps)
    return [(w_ / total, psi) for w_, psi in comps]


def _hermitian_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def _fidelity_batch(sqrt_ref: np.ndarray, rhos: np.ndarray, squared: bool) -> np.ndarray:
    inner = sqrt_ref @ rhos @ sqrt_ref
    lam = np.linalg.eigvalsh(inner)
    # rounding-level eigenvalues of rank-deficient products would inject
    # sqrt(eps)-sized noise through the square root; zero them out
    cutoff = 1e-12 * np.max(np.abs(lam), axis=-1, keepdims=True)
    lam = np.where(lam > cutoff, lam, 0.0)
    root_sum = np.sqrt(lam).sum(axis=-1)
    return root_sum**2 if squared else root_sum


def fidelity(rho_ref, rho, convention: str = "squared", herm_tol: float = 1e-8,
             trace_tol: float = 0.25) -> float:
    """Uhlmann fidelity between two density matrices.

    The squared convention (Tr sqrt(sqrt(r) s sqrt(r)))^2 is the default and
    reduces to <psi|s|psi> for a pure reference; "linear" drops the square.
    Negative eigenvalues from sampling noise are clamped to zero before the
    matrix square roots.  The trace tolerance is loose on purpose: Monte
    Carlo matrices drift from unit trace at the 1/sqrt(n) scale.
    """
    rho_ref = np.asarray(rho_ref, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    for name, mat in (("rho_ref", rho_ref), ("rho", rho)):
        if np.max(np.abs(mat - mat.conj().T)) > herm_tol:
            raise ValidationError("%s is not Hermitian within tolerance" % name)
        if abs(np.trace(mat).real - 1.0) > trace_tol:
            raise ValidationError("%s trace is too far from 1" % name)
    if convention not in ("squared", "linear"):
        raise ValidationError("unknown fidelity convention %r" % (convention,))
    val = _fidelity_batch(_hermitian_sqrt(rho_ref), rho[None], convention == "squared")[0]
    return float(val)


def expectations(rho, ops: OperatorSet = _OPS, imag_tol: float = 1e-8):
    """(<J_x>, <J_y>, <J_z>) with the rounding-level imaginary parts checked."""
    rho = np.asarray(rho, dtype=complex)
    out = []
    for j in (ops.jx, ops.jy, ops.jz):
        val = np.trace(rho @ j)
        if abs(val.imag) > imag_tol * max(1.0, abs(val.real)):
            raise ValidationError("expectation has a non-negligible imaginary part")
        out.append(float(val.real))
    return tuple(out)


def trace_distance(a, b) -> float:
    """(1/2) sum |eigenvalues| of the Hermitian difference."""
    diff = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


def default_max_step(gamma: float, total_time: float) -> float:
    """Step cap: resolve both the noise memory time and the run horizon."""
    return min(0.1 / gamma, total_time / 2000.0)


@dataclass(frozen=True)
class DensitySeries:
    """Ensemble-averaged density matrices over time plus derived series."""

    times: np.ndarray
    rho: np.ndarray  # (n_out, 3, 3) complex
    entry_stderr: np.ndarray  # (n_out, 3, 3) real
    n_traj: int
    component_weights: tuple
    fidelity: np.ndarray
    fidelity_stderr: np.ndarray
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jx_stderr: np.ndarray
    jy_stderr: np.ndarray
    jz_stderr: np.ndarray
    trace: np.ndarray
    trace_stderr: np.ndarray
    min_eigenvalue: np.ndarray
    positivity_tol: float
    positivity_violations: list = field(default_factory=list)
    frame: str = "toggling"
    fidelity_convention: str = "squared"


def _pulse_conjugations(schedule: PulseSchedule, times: np.ndarray) -> np.ndarray:
    """Accumulated pulse operator (up to global phase) at each output time."""
    n_out = np.searchsorted(schedule.outer_times, times, side="right")
    n_in = np.searchsorted(schedule.inner_times, times, side="right")
    mats = np.empty((len(times), 3, 3))
    p = np.fliplr(np.eye(3))
    q = np.diag([1.0, -1.0, 1.0])
    eye = np.eye(3)
    for i, (a, b) in enumerate(zip(n_out, n_in)):
        u = eye
        if a % 2:
            u = u @ p
        if b % 2:
            u = u @ q
        mats[i] = u
    return mats


def run_ensemble(
    model: str,
    schedule: PulseSchedule,
    omega: float,
    gamma: float,
    init: InitialStateSpec,
    n_traj: int,
    master_seed: int,
    output_times=None,
    n_output: int = 200,
    steps_per_segment: int = 20,
    max_step: float | None = None,
    chunk_size: int = DEFAULT_CHUNK,
    stderr_blocks: int = 50,
    fidelity_convention: str = "squared",
    frame: str = "toggling",
    positivity_tol: float | None = None,
    use_numba=None,
) -> DensitySeries:
    """Run the Monte Carlo ensemble and reconstruct the density series.

    Trajectory i of component c draws its noise from the stream
    (master_seed, namespace=c, stream_id=i), so results are independent of
    chunking and execution order.  Faults propagate with the offending
    stream id.
    """
    if n_traj < 2:
        raise ValidationError("n_traj must be at least 2")
    if model not in ("dephasing", "dissipative"):
        raise ValidationError("unknown model %r" % (model,))
    if frame not in ("toggling", "lab"):
        raise ValidationError("unknown frame %r" % (frame,))
    if gamma <= 0 or schedule.total_time <= 0:
        raise ValidationError("gamma and total_time must be positive")

    grid = segment_grid(
        schedule,
        steps_per_segment,
        max_step if max_step is not None else default_max_step(gamma, schedule.total_time),
    )
    tau = half_grid(grid)
    if model == "dephasing":
        tables = solve_dephasing(schedule, omega, gamma, grid)
    else:
        tables = solve_dissipative(schedule, omega, gamma, grid)

    requested = (
        np.linspace(0.0, schedule.total_time, n_output) if output_times is None else output_times
    )
    out_times = snapped_output_times(grid, requested)
    out_idx = output_indices(grid, out_times)
    n_out = len(out_times)

    h_steps = np.diff(grid)
    p_step, _, l1_step, l2_step = step_signs(schedule, grid)
    comps = decompose_initial(init)
    k_blocks = int(min(stderr_blocks, n_traj))
    block_of = np.arange(n_traj) % k_blocks
    n_per_block = np.bincount(block_of, minlength=k_blocks).astype(float)

    comp_results = []
    for c_idx, (weight, psi0) in enumerate(comps):
        block_sums = np.zeros((k_blocks, n_out, 3, 3), dtype=complex)
        sq_re = np.zeros((n_out, 3, 3))
        sq_im = np.zeros((n_out, 3, 3))
        tr_sum = np.zeros(n_out)
        tr_sq = np.zeros(n_out)
        j_sum = np.zeros((3, n_out))
        j_sq = np.zeros((3, n_out))
        for start in range(0, n_traj, chunk_size):
            ids = np.arange(start, min(start + chunk_size, n_traj))
            zvals = sample_ou_block(
                tau, gamma, master_seed, ids, namespace=c_idx, use_numba=use_numba
            )
            psi_chunk = np.broadcast_to(psi0, (len(ids), 3)).copy()
            if model == "dephasing":
                states = kernels.dephasing_rk4(
                    psi_chunk, zvals, p_step, tables.f, h_steps, omega, out_idx, use_numba
                )
            else:
                states = kernels.dissipative_rk4(
                    psi_chunk,
                    zvals,
                    p_step,
                    l1_step,
                    l2_step,
                    tables.f1,
                    tables.f2,
                    tables.f3,
                    tables.f4,
                    h_steps,
                    omega,
                    out_idx,
                    use_numba,
                )
            finite = np.isfinite(states).all(axis=(1, 2))
            if not finite.all():
                bad = int(ids[np.argmin(finite)])
                raise NumericalFault(
                    "non-finite state in component %d, noise stream %d" % (c_idx, bad)
                )
            outers = np.einsum("koi,koj->koij", states, states.conj())
            onehot = (block_of[ids][None, :] == np.arange(k_blocks)[:, None]).astype(float)
            block_sums += (onehot @ outers.reshape(len(ids), -1)).reshape(
                k_blocks, n_out, 3, 3
            )
            sq_re += (outers.real**2).sum(axis=0)
            sq_im += (outers.imag**2).sum(axis=0)
            tr = (np.abs(states) ** 2).sum(axis=-1)
            tr_sum += tr.sum(axis=0)
            tr_sq += (tr**2).sum(axis=0)
            for jk, jmat in enumerate((_OPS.jx, _OPS.jy, _OPS.jz)):
                jv = np.einsum("koi,ij,koj->ko", states.conj(), jmat, states).real
                j_sum[jk] += jv.sum(axis=0)
                j_sq[jk] += (jv**2).sum(axis=0)
        total = block_sums.sum(axis=0)
        mean = total / n_traj
        var_re = np.maximum(sq_re - n_traj * mean.real**2, 0.0) / (n_traj - 1)
        var_im = np.maximum(sq_im - n_traj * mean.imag**2, 0.0) / (n_traj - 1)
        tr_mean = tr_sum / n_traj
        tr_var = np.maximum(tr_sq - n_traj * tr_mean**2, 0.0) / (n_traj - 1)
        j_mean = j_sum / n_traj
        j_var = np.maximum(j_sq - n_traj * j_mean**2, 0.0) / (n_traj - 1)
        comp_results.append(
            {
                "weight": weight,
                "mean": mean,
                "entry_var": var_re + var_im,
                "block_sums": block_sums,
                "tr_mean": tr_mean,
                "tr_var": tr_var,
                "j_var": j_var,
            }
        )

    weights = np.array([c["weight"] for c in comp_results])
    rho = sum(c["weight"] * c["mean"] for c in comp_results)
    entry_stderr = np.sqrt(
        sum(c["weight"] ** 2 * c["entry_var"] / n_traj for c in comp_results)
    )
    trace = sum(c["weight"] * c["tr_mean"] for c in comp_results)
    trace_stderr = np.sqrt(
        sum(c["weight"] ** 2 * c["tr_var"] / n_traj for c in comp_results)
    )
    # per-trajectory spread of <J_k>; conjugation by the pulse operators only
    # permutes signs, so these are valid in either reporting frame
    j_stderr = np.sqrt(
        sum(c["weight"] ** 2 * c["j_var"] / n_traj for c in comp_results)
    )

    rho_ref = init.density()
    sqrt_ref = _hermitian_sqrt(rho_ref)
    squared = fidelity_convention == "squared"
    if fidelity_convention not in ("squared", "linear"):
        raise ValidationError("unknown fidelity convention %r" % (fidelity_convention,))

    conj_mats = None
    if frame == "lab":
        conj_mats = _pulse_conjugations(schedule, out_times)
        rho = conj_mats @ rho @ conj_mats.transpose(0, 2, 1)
        entry_stderr = np.abs(conj_mats) @ entry_stderr @ np.abs(conj_mats).transpose(0, 2, 1)

    fid = _fidelity_batch(sqrt_ref, rho, squared)

    # leave-one-block-out jackknife for the nonlinear fidelity statistic
    fid_blocks = np.empty((k_blocks, n_out))
    for b in range(k_blocks):
        rho_b = sum(
            c["weight"] * (c["block_sums"].sum(axis=0) - c["block_sums"][b])
            for c in comp_results
        ) / (n_traj - n_per_block[b])
        if conj_mats is not None:
            rho_b = conj_mats @ rho_b @ conj_mats.transpose(0, 2, 1)
        fid_blocks[b] = _fidelity_batch(sqrt_ref, rho_b, squared)
    fid_mean = fid_blocks.mean(axis=0)
    fidelity_stderr = np.sqrt(
        (k_blocks - 1) / k_blocks * ((fid_blocks - fid_mean) ** 2).sum(axis=0)
    )

    eigs = np.linalg.eigvalsh(rho)
    min_eig = eigs[:, 0]
    tol = positivity_tol if positivity_tol is not None else 1e-2 / np.sqrt(n_traj)
    violations = [
        (float(t), float(e)) for t, e in zip(out_times, min_eig) if e < -tol
    ]

    jmats = (_OPS.jx, _OPS.jy, _OPS.jz)
    jx, jy, jz = (np.einsum("tij,ji->t", rho, j).real for j in jmats)

    return DensitySeries(
        times=out_times,
        rho=rho,
        entry_stderr=entry_stderr,
        n_traj=n_traj,
        component_weights=tuple(float(w) for w in weights),
        fidelity=fid,
        fidelity_stderr=fidelity_stderr,
        jx=jx,
        jy=jy,
        jz=jz,
        jx_stderr=j_stderr[0],
        jy_stderr=j_stderr[1],
        jz_stderr=j_stderr[2],
        trace=trace,
        trace_stderr=trace_stderr,
        min_eigenvalue=min_eig,
        positivity_tol=float(tol),
        positivity_violations=violations,
        frame=frame,
        fidelity_convention=fidelity_convention,
    )
