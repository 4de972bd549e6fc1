import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from galpha.banded import BandedSymMatrix
from galpha.basis1d import assemble_mass_1d, assemble_stiffness_1d, build_basis
from galpha.errors import ParameterError
from galpha.integrator import (
    SolverState,
    SplitStepper,
    StandardStepper,
    Variant,
    initial_acceleration,
    n_steps_for,
    params_from_rho,
    run,
    step_split,
    step_standard,
)
from galpha.problems import manufactured_case, project_initial
from galpha.spectral import amplification_split, amplification_standard
from galpha.tensor_ops import KroneckerMass, KroneckerStiffness, factorize_pencils

B = BandedSymMatrix.from_dense
RHOS = np.linspace(0.0, 1.0, 101)


def scalar_system(m=1 / 3, k=4.0, dim=2):
    Mf = (B([[m]]),) * dim
    Kf = (B([[k]]),) * dim
    return KroneckerMass(Mf), KroneckerStiffness(Mf, Kf)


def fem_system(p, n, cont, dim=2):
    b = build_basis(p, n, cont)
    Mf = (assemble_mass_1d(b),) * dim
    Kf = (assemble_stiffness_1d(b),) * dim
    return [b] * dim, KroneckerMass(Mf), KroneckerStiffness(Mf, Kf)


# --- parameters -----------------------------------------------------------

@pytest.mark.parametrize("rho,variant,expected", [
    (1.0, "standard", (0.5, 0.5, 0.5, 0.25)),
    (0.0, "standard", (1.0, 2.0, 1.5, 1.0)),
    (1.0, "split", (0.5, 1.0, 1.0, 9 / 16)),
    (0.0, "split", (1.0, 2.0, 1.5, 1.0)),
])
def test_params_examples(rho, variant, expected):
    p = params_from_rho(rho, variant)
    assert (p.alpha_f, p.alpha_m, p.gamma, p.beta) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("variant", list(Variant))
def test_params_invariants(variant):
    for rho in RHOS:
        p = params_from_rho(rho, variant)
        assert abs(p.gamma - (0.5 + p.alpha_m - p.alpha_f)) <= 1e-15
        assert abs(p.beta - (1 + p.alpha_m - p.alpha_f) ** 2 / 4) <= 1e-15
        assert p.alpha_m >= p.alpha_f >= 0.5
        assert abs(p.alpha_f - 1 / (1 + rho)) <= 1e-15
        if variant is Variant.SPLIT and rho >= 0.5:
            assert p.alpha_m == 1.0
        else:
            assert abs(p.alpha_m - (2 - rho) / (1 + rho)) <= 1e-15


@pytest.mark.parametrize("rho", [-0.1, 1.5, np.nan])
def test_params_out_of_range(rho):
    with pytest.raises(ParameterError):
        params_from_rho(rho)


def test_eta_positive():
    p = params_from_rho(0.3)
    assert p.eta(1e-3) == pytest.approx(1e-6 * p.alpha_f * p.beta / p.alpha_m, rel=1e-15)
    assert p.eta(1e-3) > 0


# --- initial acceleration -------------------------------------------------

def test_initial_acceleration_zero():
    M, K = scalar_system()
    assert initial_acceleration(M, K, np.zeros((1, 1)), np.zeros((1, 1)))[0, 0] == 0.0


def test_initial_acceleration_scalar():
    M, K = scalar_system()
    assert initial_acceleration(M, K, np.ones((1, 1)))[0, 0] == pytest.approx(-24.0, rel=1e-14)


def test_initial_acceleration_manufactured():
    # the exact field is a Laplace eigenfunction with eigenvalue 2π²
    errs = []
    for n in (8, 16):
        bases, M, K = fem_system(2, n, "C1")
        U0, _ = project_initial(manufactured_case(2), bases, M=M)
        A0 = initial_acceleration(M, K, U0)
        errs.append(np.linalg.norm(A0 + 2 * np.pi**2 * U0) / np.linalg.norm(2 * np.pi**2 * U0))
    assert errs[1] < errs[0] / 4
    assert errs[1] < 1e-3


# --- single steps ---------------------------------------------------------

def free_flight_state(shape=(2, 2), tau=0.1):
    rng = np.random.default_rng(3)
    U, V, A = (rng.standard_normal(shape) for _ in range(3))
    return SolverState(U, V, A, 0.0, tau)


@pytest.mark.parametrize("variant", list(Variant))
def test_free_flight(variant):
    # K = 0 and F = M a: the consistent acceleration a is preserved
    I = B(np.eye(2))
    Z = B(np.zeros((2, 2)), 0)
    M = KroneckerMass((I, I))
    K = KroneckerStiffness((I, I), (Z, Z))
    s = free_flight_state()
    p = params_from_rho(0.5, variant)
    F = lambda t: M.apply(s.A)
    if variant is Variant.SPLIT:
        out = step_split(s, p, factorize_pencils(M.factors, K.stiffness_factors, p.eta(s.tau)), M, F)
    else:
        out = step_standard(s, p, M, K, F)
    np.testing.assert_allclose(out.A, s.A, atol=1e-15)
    np.testing.assert_allclose(out.V, s.V + s.tau * s.A, atol=1e-14)
    np.testing.assert_allclose(out.U, s.U + s.tau * s.V + s.tau**2 / 2 * s.A, atol=1e-14)
    assert out.t == pytest.approx(s.tau)


def test_unforced_jump_relaxes_inconsistent_acceleration():
    # K = 0, F = 0: the balance M(A + α_m[[A]]) = 0 gives [[A]] = -A/α_m
    I = B(np.eye(2))
    Z = B(np.zeros((2, 2)), 0)
    M = KroneckerMass((I, I))
    s = free_flight_state()
    p = params_from_rho(0.0)
    out = SplitStepper(p, M, s.tau, K_factors=(Z, Z)).step(s)
    np.testing.assert_allclose(out.A, s.A * (1 - 1 / p.alpha_m), atol=1e-15)


def test_split_pure_mass_equals_standard():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((3, 3))
    Mx = B(a @ a.T + 3 * np.eye(3))
    Z = B(np.zeros((3, 3)), 0)
    M = KroneckerMass((Mx, Mx))
    K = KroneckerStiffness((Mx, Mx), (Z, Z))
    s = free_flight_state((3, 3), tau=0.05)
    p = params_from_rho(0.2)
    F = lambda t: np.full((3, 3), np.cos(t))
    a = SplitStepper(p, M, s.tau, K_factors=(Z, Z)).step(s, F)
    b = StandardStepper(p, M, K, s.tau).step(s, F)
    for x, y in ((a.U, b.U), (a.V, b.V), (a.A, b.A)):
        np.testing.assert_allclose(x, y, rtol=1e-13, atol=1e-13)


def test_split_rejects_mismatched_pencils():
    M, K = scalar_system()
    p = params_from_rho(0.5)
    f = factorize_pencils(M.factors, K.stiffness_factors, p.eta(0.01))
    with pytest.raises(ParameterError):
        SplitStepper(p, M, 0.02, pencils=f)


@pytest.mark.parametrize("tau", [0.0, -1e-3])
def test_nonpositive_tau_rejected(tau):
    M, K = scalar_system()
    with pytest.raises(ParameterError):
        SplitStepper(params_from_rho(0.5), M, tau, K_factors=K.stiffness_factors)
    with pytest.raises(ParameterError):
        n_steps_for(tau, 1.0)


def test_tau_must_divide_T():
    assert n_steps_for(1e-3, 0.1) == 100
    with pytest.raises(ParameterError):
        n_steps_for(0.03, 0.1)


def test_single_step_run():
    M, K = scalar_system()
    calls = []
    state = run(M, K, np.ones((1, 1)), np.zeros((1, 1)), params_from_rho(0.5), 0.01, 0.01,
                callback=lambda k, s: calls.append(k))
    assert calls == [1]
    assert state.t == 0.01


# --- per-mode oracle ------------------------------------------------------

@pytest.mark.parametrize("rho", [0.0, 0.3, 0.5, 1.0])
@pytest.mark.parametrize("variant", list(Variant))
def test_per_mode_oracle(rho, variant):
    # 2D 1-DOF system: λ = 12 per direction
    M, K = scalar_system()
    tau = 0.05
    p = params_from_rho(rho, variant)
    sx = tau**2 * 12.0
    if variant is Variant.SPLIT:
        amp = amplification_split(sx, sx, p, form="scheme").entries
        stepper = SplitStepper(p, M, tau, K_factors=K.stiffness_factors)
    else:
        amp = amplification_standard(2 * sx, p).entries
        stepper = StandardStepper(p, M, K, tau)
    U0 = np.ones((1, 1))
    state = SolverState(U0, np.full((1, 1), 0.7), initial_acceleration(M, K, U0), 0.0, tau)
    scale = np.array([1.0, tau, tau**2])
    for _ in range(100):
        z = np.array([state.U[0, 0], state.V[0, 0], state.A[0, 0]]) * scale
        state = stepper.step(state)
        z_new = np.array([state.U[0, 0], state.V[0, 0], state.A[0, 0]]) * scale
        pred = amp @ z
        assert np.max(np.abs(z_new - pred)) <= 1e-12 * max(1.0, np.max(np.abs(z)))


# --- accuracy -------------------------------------------------------------

def oscillator_error(tau, rho, variant):
    # M = 1, K = π² as a 2D 1-DOF Kronecker system; exact u = cos(πt)
    M, K = scalar_system(1.0, np.pi**2 / 2)
    state = run(M, K, np.ones((1, 1)), np.zeros((1, 1)), params_from_rho(rho, variant), tau, 1.0)
    # energy-norm error; at T=1 cos(πt) is at an extremum, so |U - u| alone
    # sees the phase error only quadratically and overestimates the order
    return np.hypot(state.U[0, 0] - np.cos(np.pi), (state.V[0, 0] + np.pi * np.sin(np.pi)) / np.pi)


@pytest.mark.parametrize("rho", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("variant", list(Variant))
def test_oscillator_second_order(rho, variant):
    taus = [1 / 40, 1 / 80, 1 / 160, 1 / 320, 1 / 640]
    errs = [oscillator_error(t, rho, variant) for t in taus]
    slope = np.polyfit(np.log(taus), np.log(errs), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.1)


def test_split_vs_standard_richardson():
    # one-step difference in U between the two schemes is O(τ⁴)
    _, M, K = fem_system(1, 7, "C0")
    assert M.shape == (6, 6)
    bases = [build_basis(1, 7, "C0")] * 2
    U0, V0 = project_initial(manufactured_case(2), bases, M=M)
    A0 = initial_acceleration(M, K, U0)
    diffs = []
    for tau in (4e-3, 2e-3, 1e-3, 5e-4):
        s = SolverState(U0, V0, A0, 0.0, tau)
        p = params_from_rho(0.5, Variant.SPLIT)
        a = SplitStepper(p, M, tau, K_factors=K.stiffness_factors).step(s)
        b = StandardStepper(p, M, K, tau).step(s)
        diffs.append(np.linalg.norm(a.U - b.U))
    ratios = np.array(diffs[:-1]) / np.array(diffs[1:])
    assert np.all((ratios >= 12) & (ratios <= 20)), ratios


def energy_history(tau, T, rho=0.5):
    bases, M, K = fem_system(2, 8, "C1")
    U0, V0 = project_initial(manufactured_case(2), bases, M=M)
    energies = []

    def energy(U, V):
        return float(np.sum(V * M.apply(V)) + np.sum(U * K.apply(U)))

    energies.append(energy(U0, V0))
    run(M, K, U0, V0, params_from_rho(rho), tau, T, callback=lambda k, s: energies.append(energy(s.U, s.V)))
    return np.array(energies)


@pytest.mark.xfail(strict=True, reason="the discrete energy oscillates at O(τ²) relative amplitude per step")
def test_energy_nonincreasing_per_step():
    e = energy_history(1e-3, 1.0)
    assert np.all(e[1:] <= e[:-1] * (1 + 1e-10))


@pytest.mark.parametrize("rho", [0.0, 0.5, 1.0])
def test_energy_bounded(rho):
    # individual steps may gain energy; over many periods it stays within its
    # O(τ²) oscillation and decays whenever high frequencies are damped
    e = energy_history(1e-2, 2.0, rho)
    assert np.all(e <= e[0] * (1 + 1e-3))
    if rho < 1:
        assert np.all(e <= e[0] * (1 + 1e-12))
        assert e[-1] < e[0]
    assert np.all(np.isfinite(e))


@settings(max_examples=25, deadline=None)
@given(rho=st.floats(0.0, 1.0), sigma=st.floats(1e-4, 1e4))
def test_split_step_is_linear(rho, sigma):
    M, K = scalar_system(1.0, sigma / 2)
    p = params_from_rho(rho)
    stepper = SplitStepper(p, M, 1.0, K_factors=K.stiffness_factors)
    s1 = SolverState(np.ones((1, 1)), np.zeros((1, 1)), np.zeros((1, 1)), 0.0, 1.0)
    s2 = SolverState(2 * np.ones((1, 1)), np.zeros((1, 1)), np.zeros((1, 1)), 0.0, 1.0)
    a, b = stepper.step(s1), stepper.step(s2)
    assert b.U[0, 0] == pytest.approx(2 * a.U[0, 0], rel=1e-12, abs=1e-300)
