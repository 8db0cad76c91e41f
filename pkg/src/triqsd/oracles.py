"""Independent reference solutions used to verify the Monte Carlo engine.

Dephasing admits an exact ensemble-level solution: with lam = (-1, 0, +1),
    rho_mn(t) = rho_mn(0) exp(-i w (lam_m - lam_n) Theta(t))
                          exp(-(lam_m - lam_n)^2 G(t)),
where Theta(t) is the signed time integral of the outer sign function and
G(t) = (1/2) double-integral of p(s) p(s') alpha(s, s') over [0, t]^2.
For the exponential kernel both pieces are evaluated in closed form per
sign-constant segment pair, exact to machine precision, which makes the
pulse-ordering checks noise-free.  Tabulated kernels fall back to 2-D
trapezoid quadrature with a step-doubling resolution check.

The Markov-limit oracle integrates
    d rho / dt = -i w [J_z, rho] + rate (J_- rho J_+ - (1/2){J_+ J_-, rho})
deterministically; rate = 1 matches the exponential kernel normalized to a
unit-weight delta correlation in the large-bandwidth limit.
"""

from dataclasses import dataclass

import numpy as np

from .ensemble import _fidelity_batch, _hermitian_sqrt
from .errors import NumericalFault, ValidationError
from .noise import NoiseKernel
from .operators import build_operator_set
from .pulses import PulseSchedule, signs_at

_OPS = build_operator_set()
_LAM = np.array([-1.0, 0.0, 1.0])


@dataclass(frozen=True)
class DephasingOracleResult:
    times: np.ndarray
    theta: np.ndarray  # signed integral of the outer sign function
    decoherence: np.ndarray  # the kernel double integral G(t), >= 0
    rho: np.ndarray  # (n, 3, 3) complex

    def fidelity_to(self, rho_ref, convention: str = "squared") -> np.ndarray:
        squared = convention == "squared"
        return _fidelity_batch(_hermitian_sqrt(np.asarray(rho_ref, dtype=complex)),
                               self.rho, squared)

    def expectation_series(self):
        jx = np.einsum("tij,ji->t", self.rho, _OPS.jx).real
        jy = np.einsum("tij,ji->t", self.rho, _OPS.jy).real
        jz = np.einsum("tij,ji->t", self.rho, _OPS.jz).real
        return jx, jy, jz


def _segments_up_to(schedule: PulseSchedule, t: float):
    """Sign-constant segments covering [0, t]: (edges, signs)."""
    pulses = schedule.outer_times
    inside = pulses[pulses < t]
    edges = np.concatenate([[0.0], inside, [t]])
    signs = 1.0 - 2.0 * (np.arange(len(edges) - 1) % 2)
    return edges, signs


def signed_time_integral(schedule: PulseSchedule, t: float) -> float:
    """Theta(t): integral of the outer sign function from 0 to t."""
    edges, signs = _segments_up_to(schedule, t)
    return float(np.sum(signs * np.diff(edges)))


def ou_sign_double_integral(schedule: PulseSchedule, gamma: float, t: float) -> float:
    """Closed-form G(t) for the exponential kernel.

    Same-segment blocks give len - (1 - exp(-gamma len)) / gamma; ordered
    segment pairs [a1,b1] x [a2,b2] (b1 <= a2) give
    (exp(-g(a2-b1)) - exp(-g(b2-b1)) - exp(-g(a2-a1)) + exp(-g(b2-a1))) / 2g,
    written with non-positive exponents only so large gamma stays stable.
    """
    if t == 0.0:
        return 0.0
    edges, signs = _segments_up_to(schedule, t)
    a = edges[:-1]
    b = edges[1:]
    ell = b - a
    diag = np.sum(ell - (1.0 - np.exp(-gamma * ell)) / gamma)
    n = len(a)
    cross = 0.0
    if n > 1:
        jj, kk = np.triu_indices(n, k=1)
        term = (
            np.exp(-gamma * (a[kk] - b[jj]))
            - np.exp(-gamma * (b[kk] - b[jj]))
            - np.exp(-gamma * (a[kk] - a[jj]))
            + np.exp(-gamma * (b[kk] - a[jj]))
        ) / (2.0 * gamma)
        cross = np.sum(signs[jj] * signs[kk] * term)
    return float(0.5 * diag + cross)


def _quadrature_double_integral(schedule, kernel, t, n_points):
    s = np.linspace(0.0, t, n_points)
    p = signs_at(schedule, s)[0]
    a = np.asarray(kernel.alpha(s[:, None], s[None, :]), dtype=float)
    w = np.full(n_points, s[1] - s[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    weighted = p * w
    return float(0.5 * weighted @ a @ weighted)


def kernel_sign_double_integral(
    schedule: PulseSchedule,
    kernel: NoiseKernel,
    t: float,
    quad_tol: float = 1e-6,
    max_points: int = 20001,
) -> float:
    """G(t) for a tabulated kernel by step-doubling 2-D trapezoid quadrature."""
    if t == 0.0:
        return 0.0
    n = 501
    prev = _quadrature_double_integral(schedule, kernel, t, n)
    while True:
        n = 2 * n - 1
        if n > max_points:
            raise NumericalFault(
                "quadrature did not reach tolerance %g within %d points"
                % (quad_tol, max_points)
            )
        cur = _quadrature_double_integral(schedule, kernel, t, n)
        if abs(cur - prev) <= quad_tol * max(1.0, abs(cur)):
            return cur
        prev = cur


def dephasing_analytic(
    schedule: PulseSchedule,
    omega: float,
    gamma: float,
    rho0,
    times,
    kernel: NoiseKernel | None = None,
) -> DephasingOracleResult:
    """Exact dephasing density series for any pulse schedule.

    With kernel=None the exponential kernel with rate gamma is evaluated in
    closed form; a tabulated kernel switches to quadrature.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or np.any(times > schedule.total_time):
        raise ValidationError("oracle times outside [0, total_time]")
    theta = np.array([signed_time_integral(schedule, t) for t in times])
    if kernel is None or kernel.kind == "exponential":
        g_rate = gamma if kernel is None else kernel.gamma
        decoherence = np.array(
            [ou_sign_double_integral(schedule, g_rate, t) for t in times]
        )
    else:
        decoherence = np.array(
            [kernel_sign_double_integral(schedule, kernel, t) for t in times]
        )
    dl = _LAM[:, None] - _LAM[None, :]
    phase = np.exp(-1j * omega * theta[:, None, None] * dl)
    damp = np.exp(-(dl**2) * decoherence[:, None, None])
    rho = rho0[None, :, :] * phase * damp
    return DephasingOracleResult(times=times, theta=theta, decoherence=decoherence, rho=rho)


def _lindblad_rhs(rho, omega, rate, jz, jm, jp, jpjm):
    uni = -1j * omega * (jz @ rho - rho @ jz)
    dis = rate * (jm @ rho @ jp - 0.5 * (jpjm @ rho + rho @ jpjm))
    return uni + dis


def lindblad_markov(omega: float, rho0, times, rate: float = 1.0, max_step: float = 1e-3):
    """Deterministic RK4 solve of the Markov-limit master equation.

    Returns rho at the requested times; trace is preserved to integrator
    accuracy and the steady state is the ground-state projector.
    """
    if rate <= 0:
        raise ValidationError("rate must be positive")
    times = np.asarray(times, dtype=float)
    if len(times) == 0 or np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValidationError("times must be ascending and non-negative")
    jz, jm, jp = _OPS.jz, _OPS.jminus, _OPS.jplus
    jpjm = jp @ jm
    rho = np.asarray(rho0, dtype=complex).copy()
    out = np.empty((len(times), 3, 3), dtype=complex)
    t = 0.0
    ptr = 0
    while ptr < len(times) and times[ptr] <= t + 1e-15:
        out[ptr] = rho
        ptr += 1
    while ptr < len(times):
        target = times[ptr]
        n_sub = max(1, int(np.ceil((target - t) / max_step)))
        h = (target - t) / n_sub
        for _ in range(n_sub):
            k1 = _lindblad_rhs(rho, omega, rate, jz, jm, jp, jpjm)
            k2 = _lindblad_rhs(rho + 0.5 * h * k1, omega, rate, jz, jm, jp, jpjm)
            k3 = _lindblad_rhs(rho + 0.5 * h * k2, omega, rate, jz, jm, jp, jpjm)
            k4 = _lindblad_rhs(rho + h * k3, omega, rate, jz, jm, jp, jpjm)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(rho)):
            raise NumericalFault("master-equation integration became unstable")
        t = target
        out[ptr] = rho
        ptr += 1
    return times, out
