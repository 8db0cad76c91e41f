import numpy as np
import pytest

from triqsd import (
    InitialStateSpec,
    NoiseKernel,
    dephasing_analytic,
    free_evolution,
    lindblad_markov,
    ou_sign_double_integral,
    signed_time_integral,
    single_layer_udd,
)
from triqsd.errors import NumericalFault, ValidationError
from triqsd.oracles import kernel_sign_double_integral

PSI_UNIFORM = np.ones(3, dtype=complex) / np.sqrt(3.0)
RHO_UNIFORM = np.outer(PSI_UNIFORM, PSI_UNIFORM.conj())


def test_signed_integral_free_is_time():
    free = free_evolution(4.0)
    for t in (0.0, 1.3, 4.0):
        assert signed_time_integral(free, t) == pytest.approx(t, abs=1e-14)


def test_signed_integral_balanced_for_even_sequences():
    for n in (2, 10, 20):
        sched = single_layer_udd(n, 3.0)
        assert signed_time_integral(sched, 3.0) == pytest.approx(0.0, abs=1e-12)


def test_decoherence_integral_free_closed_form():
    free = free_evolution(5.0)
    g2 = ou_sign_double_integral(free, 1.0, 2.0)
    assert g2 == pytest.approx(1.0 - (1.0 - np.exp(-2.0)) / 2.0, abs=1e-13)
    assert np.exp(-4.0 * g2) == pytest.approx(0.1032429, abs=1e-7)


def test_decoherence_integral_quadratic_at_short_times():
    free = free_evolution(1.0)
    for gamma in (0.5, 1.0, 4.0):
        t = 1e-3
        g = ou_sign_double_integral(free, gamma, t)
        assert g / (gamma * t**2 / 4.0) == pytest.approx(1.0, abs=2e-3)


@pytest.mark.parametrize("n_pulses", [0, 1, 7, 20])
def test_decoherence_integral_nonnegative(n_pulses):
    sched = single_layer_udd(n_pulses, 3.0)
    for t in np.linspace(0.0, 3.0, 17):
        assert ou_sign_double_integral(sched, 1.0, float(t)) >= -1e-14


def test_large_gamma_remains_stable():
    sched = single_layer_udd(10, 2.0)
    g = ou_sign_double_integral(sched, 500.0, 2.0)
    assert np.isfinite(g) and g >= 0.0


def test_oracle_diagonals_exactly_preserved():
    sched = single_layer_udd(5, 2.0)
    res = dephasing_analytic(sched, 1.0, 1.0, RHO_UNIFORM, np.linspace(0, 2, 9))
    for m in range(3):
        assert np.allclose(res.rho[:, m, m], RHO_UNIFORM[m, m])


def test_oracle_damping_never_amplifies():
    # the corrected drift sign can only shrink coherences; the opposite sign
    # would multiply them by exp(+4 G) > 1
    sched = free_evolution(3.0)
    res = dephasing_analytic(sched, 1.0, 1.0, RHO_UNIFORM, np.linspace(0, 3, 13))
    mags = np.abs(res.rho[:, 0, 2])
    assert np.all(np.diff(mags) <= 1e-15)
    assert np.all(np.exp(4.0 * res.decoherence[1:]) > 1.0)


def test_more_pulses_better_protection():
    values = {}
    for n in (0, 20, 40):
        sched = single_layer_udd(n, 5.0)
        values[n] = ou_sign_double_integral(sched, 1.0, 5.0)
    assert values[40] <= values[20] <= values[0]


def test_fidelity_monotone_in_memory_rate():
    sched = single_layer_udd(20, 5.0)
    fids = []
    for gamma in (0.5, 1.0, 5.0, 10.0):
        res = dephasing_analytic(sched, 1.0, gamma, RHO_UNIFORM, [5.0])
        fids.append(res.fidelity_to(RHO_UNIFORM)[0])
    assert all(a > b for a, b in zip(fids, fids[1:]))


def test_tabulated_kernel_quadrature_matches_closed_form():
    sched = single_layer_udd(2, 1.0)
    gamma = 1.0
    kern = NoiseKernel.exponential(gamma)
    exact = ou_sign_double_integral(sched, gamma, 1.0)
    quad = kernel_sign_double_integral(sched, NoiseKernel.tabulated(kern.alpha), 1.0)
    assert quad == pytest.approx(exact, abs=2e-5)


def test_quadrature_resolution_fault():
    sched = single_layer_udd(2, 1.0)
    kern = NoiseKernel.exponential(1.0)
    with pytest.raises(NumericalFault):
        kernel_sign_double_integral(
            sched, NoiseKernel.tabulated(kern.alpha), 1.0, quad_tol=1e-15, max_points=600
        )


def test_oracle_rejects_out_of_range_times():
    with pytest.raises(ValidationError):
        dephasing_analytic(free_evolution(1.0), 1.0, 1.0, RHO_UNIFORM, [2.0])


def test_lindblad_cascade_closed_form():
    rho0 = np.zeros((3, 3), dtype=complex)
    rho0[2, 2] = 1.0
    times = np.linspace(0.0, 2.0, 41)
    _, rhos = lindblad_markov(0.7, rho0, times, rate=1.0)
    p2 = np.exp(-2.0 * times)
    p1 = 2.0 * times * np.exp(-2.0 * times)
    p0 = 1.0 - (1.0 + 2.0 * times) * np.exp(-2.0 * times)
    assert np.max(np.abs(rhos[:, 2, 2].real - p2)) < 1e-8
    assert np.max(np.abs(rhos[:, 1, 1].real - p1)) < 1e-8
    assert np.max(np.abs(rhos[:, 0, 0].real - p0)) < 1e-8


def test_lindblad_steady_state_is_ground_projector():
    rho0 = RHO_UNIFORM.copy()
    _, rhos = lindblad_markov(1.0, rho0, [0.0, 25.0], rate=1.0)
    ground = np.zeros((3, 3), dtype=complex)
    ground[0, 0] = 1.0
    assert np.max(np.abs(rhos[-1] - ground)) < 1e-8


def test_lindblad_preserves_trace():
    _, rhos = lindblad_markov(1.0, RHO_UNIFORM, np.linspace(0, 3, 31), rate=2.0)
    traces = np.trace(rhos, axis1=1, axis2=2)
    assert np.max(np.abs(traces - 1.0)) < 1e-10


def test_lindblad_validation():
    with pytest.raises(ValidationError):
        lindblad_markov(1.0, RHO_UNIFORM, [0.0, 1.0], rate=0.0)
    with pytest.raises(ValidationError):
        lindblad_markov(1.0, RHO_UNIFORM, [1.0, 0.5], rate=1.0)
