"""Generalized-α time marching for M U'' + K U = F.

Two steppers share the state/parameter types:

* :class:`StandardStepper` solves ``(α_m M + τ² α_f β K) [[A]] = R`` with an
  assembled sparse LU; it is the unsplit baseline.
* :class:`SplitStepper` replaces ``G = M + ηK`` by the separable
  ``G~ = ⊗_ξ (M^ξ + ηK^ξ)`` and ``K`` by ``(G~ - M)/η``, so each step costs
  a few directional banded products and solves.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionError, ParameterError
from .tensor_ops import (
    KroneckerMass,
    KroneckerStiffness,
    PencilFactorization,
    factorize_pencils,
    mass_factorization,
)

ForceProvider = Optional[Callable[[float], Optional[np.ndarray]]]


class Variant(str, enum.Enum):
    STANDARD = "standard"
    SPLIT = "split"

    @classmethod
    def parse(cls, value) -> "Variant":
        try:
            return cls(str(getattr(value, "value", value)).lower())
        except ValueError:
            raise ParameterError(f"unknown variant {value!r}") from None


@dataclass(frozen=True)
class AlphaParams:
    rho_inf: float
    alpha_m: float
    alpha_f: float
    gamma: float
    beta: float
    variant: Variant

    def eta(self, tau: float) -> float:
        return tau * tau * self.alpha_f * self.beta / self.alpha_m


def params_from_rho(rho_inf: float, variant=Variant.SPLIT) -> AlphaParams:
    variant = Variant.parse(variant)
    rho = float(rho_inf)
    if not 0.0 <= rho <= 1.0:
        raise ParameterError(f"rho_inf must lie in [0, 1], got {rho_inf}")
    alpha_f = 1.0 / (1.0 + rho)
    if variant is Variant.SPLIT and rho >= 0.5:
        alpha_m = 1.0
    else:
        alpha_m = (2.0 - rho) / (1.0 + rho)
    gamma = 0.5 + alpha_m - alpha_f
    beta = 0.25 * (1.0 + alpha_m - alpha_f) ** 2
    return AlphaParams(rho, alpha_m, alpha_f, gamma, beta, variant)


def eta_value(params: AlphaParams, tau: float) -> float:
    return params.eta(tau)


@dataclass
class SolverState:
    U: np.ndarray
    V: np.ndarray
    A: np.ndarray
    t: float
    tau: float

    def __post_init__(self):
        if not (self.U.shape == self.V.shape == self.A.shape):
            raise DimensionError(
                f"U, V, A shapes differ: {self.U.shape}, {self.V.shape}, {self.A.shape}"
            )

    def copy(self) -> "SolverState":
        return replace(self, U=self.U.copy(), V=self.V.copy(), A=self.A.copy())


def _force(F_provider: ForceProvider, t: float, shape) -> np.ndarray | None:
    if F_provider is None:
        return None
    f = F_provider(t)
    if f is None:
        return None
    return np.asarray(f, dtype=float).reshape(shape)


def initial_acceleration(M: KroneckerMass, K: KroneckerStiffness, U0, F0=None, *, mass_factor=None):
    """A0 = M^{-1}(F0 - K U0) via the directional mass solves."""
    rhs = -K.apply(U0)
    if F0 is not None:
        rhs = rhs + np.asarray(F0, dtype=float).reshape(rhs.shape)
    if mass_factor is None:
        mass_factor = mass_factorization(M)
    return mass_factor.solve(rhs)


def _advance(state: SolverState, params: AlphaParams, jump: np.ndarray) -> SolverState:
    tau = state.tau
    U, V, A = state.U, state.V, state.A
    return SolverState(
        U=U + tau * V + (0.5 * tau * tau) * A + (tau * tau * params.beta) * jump,
        V=V + tau * A + (tau * params.gamma) * jump,
        A=A + jump,
        t=state.t + tau,
        tau=tau,
    )


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not tau > 0.0:
        raise ParameterError(f"time step tau must be > 0, got {tau}")
    return tau


class StandardStepper:
    """Unsplit generalized-α with an assembled sparse step matrix."""

    def __init__(self, params: AlphaParams, M, K, tau: float):
        self.params = params
        self.tau = _check_tau(tau)
        self.shape = getattr(M, "shape", None)
        self.M = M.to_sparse() if hasattr(M, "to_sparse") else sp.csr_matrix(M)
        self.K = K.to_sparse() if hasattr(K, "to_sparse") else sp.csr_matrix(K)
        if self.shape is None:
            self.shape = (self.M.shape[0],)
        lhs = params.alpha_m * self.M + (tau * tau * params.alpha_f * params.beta) * self.K
        self._lu = spla.splu(sp.csc_matrix(lhs))

    def step(self, state: SolverState, F_provider: ForceProvider = None) -> SolverState:
        p, tau = self.params, self.tau
        U, V, A = (np.ravel(w) for w in (state.U, state.V, state.A))
        w = U + (tau * p.alpha_f) * V + (0.5 * tau * tau * p.alpha_f) * A
        rhs = -(self.M @ A) - self.K @ w
        f = _force(F_provider, state.t + p.alpha_f * tau, U.shape)
        if f is not None:
            rhs += f
        jump = self._lu.solve(rhs).reshape(state.U.shape)
        return _advance(state, p, jump)


class SplitStepper:
    """Split generalized-α: every step is linear in the number of DOFs."""

    def __init__(self, params: AlphaParams, M: KroneckerMass, tau: float, *,
                 K_factors=None, pencils: PencilFactorization | None = None):
        self.params = params
        self.tau = _check_tau(tau)
        self.M = M
        self.eta = params.eta(self.tau)
        if pencils is None:
            if K_factors is None:
                raise ParameterError("SplitStepper needs either K_factors or pencils")
            pencils = factorize_pencils(M.factors, K_factors, self.eta)
        elif not np.isclose(pencils.eta, self.eta, rtol=1e-14, atol=0.0):
            raise ParameterError(
                f"pencils were built for eta={pencils.eta}, this step needs eta={self.eta}"
            )
        self.pencils = pencils

    def step(self, state: SolverState, F_provider: ForceProvider = None) -> SolverState:
        p, tau = self.params, self.tau
        U, V, A = state.U, state.V, state.A
        # R = F - M A - (G~ - M)/eta [U + τ α_f V + τ² α_f/2 A]
        w = U + (tau * p.alpha_f) * V + (0.5 * tau * tau * p.alpha_f) * A
        rhs = -self.M.apply(A) - self.pencils.apply_split_stiffness(w)
        f = _force(F_provider, state.t + p.alpha_f * tau, U.shape)
        if f is not None:
            rhs += f
        jump = self.pencils.solve(rhs) / p.alpha_m
        return _advance(state, p, jump)


def step_standard(state: SolverState, params: AlphaParams, M, K, F_provider: ForceProvider = None) -> SolverState:
    return StandardStepper(params, M, K, state.tau).step(state, F_provider)


def step_split(state: SolverState, params: AlphaParams, pencils: PencilFactorization,
               M: KroneckerMass, F_provider: ForceProvider = None) -> SolverState:
    return SplitStepper(params, M, state.tau, pencils=pencils).step(state, F_provider)


def n_steps_for(tau: float, T: float) -> int:
    tau = _check_tau(tau)
    if not T > 0:
        raise ParameterError(f"final time T must be > 0, got {T}")
    n = int(round(T / tau))
    if n < 1 or abs(n * tau - T) > 1e-9 * max(T, 1.0):
        raise ParameterError(f"tau={tau} does not divide T={T}")
    return n


def make_stepper(params: AlphaParams, M: KroneckerMass, K: KroneckerStiffness, tau: float):
    if params.variant is Variant.SPLIT:
        return SplitStepper(params, M, tau, K_factors=K.stiffness_factors)
    return StandardStepper(params, M, K, tau)


def run(M: KroneckerMass, K: KroneckerStiffness, U0, V0, params: AlphaParams, tau: float, T: float,
        F_provider: ForceProvider = None, callback: Callable[[int, SolverState], None] | None = None,
        ) -> SolverState:
    """March from t=0 to T in fixed steps; ``callback(n, state)`` after each step."""
    n = n_steps_for(tau, T)
    U0 = np.asarray(U0, dtype=float).reshape(M.shape)
    V0 = np.asarray(V0, dtype=float).reshape(M.shape)
    A0 = initial_acceleration(M, K, U0, _force(F_provider, 0.0, M.shape))
    state = SolverState(U0.copy(), V0.copy(), A0, 0.0, float(tau))
    stepper = make_stepper(params, M, K, tau)
    for k in range(1, n + 1):
        state = stepper.step(state, F_provider)
        if callback is not None:
            callback(k, state)
    # land exactly on T despite accumulated rounding in t
    state.t = float(T)
    return state
