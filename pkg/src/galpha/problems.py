"""Manufactured standing-wave solutions and discrete error norms.

The exact solution is ``u = s(t) * prod_k sin(pi x_k)`` with
``s(t) = sin(w t) + cos(w t)`` and ``w = sqrt(dim) * pi``; it is a Laplace
eigenfunction with matching frequency, so the forcing vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .basis1d import Basis1D, collocation_matrices, gauss_points
from .errors import ParameterError
from .tensor_ops import KroneckerMass, mass_factorization


@dataclass(frozen=True)
class ManufacturedCase:
    dim: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ParameterError(f"manufactured cases exist for dim 2 or 3, got {self.dim}")

    @property
    def omega(self) -> float:
        return np.sqrt(self.dim) * np.pi

    # temporal factor and its derivatives
    def time_factor(self, t, order: int = 0):
        w = self.omega
        s, c = np.sin(w * t), np.cos(w * t)
        return [s + c, w * (c - s), -w * w * (s + c)][order]

    @staticmethod
    def spatial_factor(x, order: int = 0):
        """sin(pi x) or its derivative."""
        if order == 0:
            return np.sin(np.pi * x)
        if order == 1:
            return np.pi * np.cos(np.pi * x)
        return -np.pi**2 * np.sin(np.pi * x)

    def _space(self, coords, orders=None):
        orders = orders or [0] * self.dim
        return reduce(np.multiply, [self.spatial_factor(np.asarray(x), o) for x, o in zip(coords, orders)])

    def u(self, *coords, t):
        return self.time_factor(t) * self._space(coords)

    def u_t(self, *coords, t):
        return self.time_factor(t, 1) * self._space(coords)

    def u_tt(self, *coords, t):
        return self.time_factor(t, 2) * self._space(coords)

    def laplacian(self, *coords, t):
        total = 0.0
        for k in range(self.dim):
            orders = [2 if j == k else 0 for j in range(self.dim)]
            total = total + self._space(coords, orders)
        return self.time_factor(t) * total

    def f(self, *coords, t):
        return np.zeros(np.broadcast(*coords).shape)

    def d0(self, *coords):
        return self.u(*coords, t=0.0)

    def v0(self, *coords):
        return self.u_t(*coords, t=0.0)


def manufactured_case(dim: int) -> ManufacturedCase:
    return ManufacturedCase(int(dim))


@dataclass(frozen=True)
class ErrorReport:
    l2_error: float
    h1_semi_error: float
    t: float
    dof: int
    h: float
    tau: float | None = None


@dataclass(frozen=True)
class _Quad1D:
    points: np.ndarray   # flattened element quadrature points
    weights: np.ndarray
    B: object            # sparse (n_points x n_dof_interior)
    D: object


def _quad_1d(basis: Basis1D, n_quad: int) -> _Quad1D:
    xi, w = gauss_points(n_quad)
    a, b = basis.breakpoints[:-1], basis.breakpoints[1:]
    half = 0.5 * (b - a)
    pts = ((0.5 * (a + b))[:, None] + half[:, None] * xi[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    B, D = collocation_matrices(basis, pts, np.repeat(basis.element_spans, n_quad))
    return _Quad1D(pts, wts, B, D)


def _mode_apply(mat, x: np.ndarray, axis: int) -> np.ndarray:
    """Multiply ``mat`` into ``x`` along ``axis``."""
    moved = np.moveaxis(x, axis, 0)
    out = mat @ moved.reshape(moved.shape[0], -1)
    return np.moveaxis(np.asarray(out).reshape((mat.shape[0],) + moved.shape[1:]), 0, axis)


def _default_nquad(bases: Sequence[Basis1D], extra: int) -> int:
    return max(b.degree for b in bases) + extra


def _mass(bases):
    from .basis1d import assemble_mass_1d

    return KroneckerMass(tuple(assemble_mass_1d(b) for b in bases))


def load_vector(func, bases: Sequence[Basis1D], n_quad: int | None = None) -> np.ndarray:
    """Entries ∫ func · φ_i over the tensor grid, for a general callable ``func(*coords)``."""
    n_quad = n_quad or _default_nquad(bases, 3)
    quads = [_quad_1d(b, n_quad) for b in bases]
    grids = np.meshgrid(*[q.points for q in quads], indexing="ij")
    vals = np.asarray(func(*grids), dtype=float) * np.ones(grids[0].shape)
    for axis, q in enumerate(quads):
        vals = _mode_apply((q.B.T.multiply(q.weights[None, :])).tocsr(), vals, axis)
    return vals


def l2_project(func, bases: Sequence[Basis1D], n_quad: int | None = None, M: KroneckerMass | None = None):
    M = M or _mass(bases)
    return mass_factorization(M).solve(load_vector(func, bases, n_quad))


def _separable_load(case: ManufacturedCase, quads: Sequence[_Quad1D], orders: Sequence[int]) -> np.ndarray:
    """∫ (prod_k sin^(o_k)(π x_k)) · (prod_k φ^(o_k)) for per-axis derivative orders o_k."""
    loads = []
    for q, o in zip(quads, orders):
        test = q.D if o else q.B
        loads.append(test.T @ (q.weights * case.spatial_factor(q.points, o)))
    return reduce(np.multiply.outer, loads)


def _stiffness_solve(M_factors, K_factors, rhs: np.ndarray) -> np.ndarray:
    """Solve K x = rhs with the directional eigenbases (fast diagonalization)."""
    from .spectral import generalized_eigs_1d

    eigs = [generalized_eigs_1d(k, m) for m, k in zip(M_factors, K_factors)]
    x = rhs
    for axis, e in enumerate(eigs):
        x = _mode_apply(e.vectors.T, x, axis)
    x = x / reduce(np.add.outer, [e.lambdas for e in eigs])
    for axis, e in enumerate(eigs):
        x = _mode_apply(e.vectors, x, axis)
    return x


def project_initial(case: ManufacturedCase, bases: Sequence[Basis1D], n_quad: int | None = None,
                    M: KroneckerMass | None = None, method: str = "l2"):
    """Projections (U0, V0) of the initial displacement and velocity.

    ``method="l2"`` is the L² projection; ``method="ritz"`` the elliptic
    projection (∇U0, ∇φ) = (∇d0, ∇φ). Both data share one spatial shape, so
    V0 is a multiple of U0 either way.
    """
    if len(bases) != case.dim:
        raise ParameterError(f"need {case.dim} bases, got {len(bases)}")
    n_quad = n_quad or _default_nquad(bases, 3)
    quads = [_quad_1d(b, n_quad) for b in bases]
    M = M or _mass(bases)
    if method == "l2":
        shape_proj = mass_factorization(M).solve(_separable_load(case, quads, [0] * case.dim))
    elif method == "ritz":
        from .basis1d import assemble_stiffness_1d

        load = sum(_separable_load(case, quads, [int(j == k) for j in range(case.dim)]) for k in range(case.dim))
        shape_proj = _stiffness_solve(M.factors, [assemble_stiffness_1d(b) for b in bases], load)
    else:
        raise ParameterError(f"method must be 'l2' or 'ritz', got {method!r}")
    return case.time_factor(0.0) * shape_proj, case.time_factor(0.0, 1) * shape_proj


def error_norms(U_h, case: ManufacturedCase, bases: Sequence[Basis1D], t: float,
                which: str = "u", n_quad: int | None = None, tau: float | None = None) -> ErrorReport:
    """L² norm and H¹ seminorm of (u_h - u)(., t), or of (v_h - u_t) for which="v"."""
    if which not in ("u", "v"):
        raise ParameterError(f"which must be 'u' or 'v', got {which!r}")
    n_quad = n_quad or _default_nquad(bases, 3)
    quads = [_quad_1d(b, n_quad) for b in bases]
    shape = tuple(b.n_dof_interior for b in bases)
    U_h = np.asarray(U_h, dtype=float).reshape(shape)
    s = case.time_factor(t, 0 if which == "u" else 1)
    dim = len(bases)

    def field(derivative_axis=None):
        approx = U_h
        for axis, q in enumerate(quads):
            approx = _mode_apply(q.D if axis == derivative_axis else q.B, approx, axis)
        exact = s * reduce(np.multiply.outer, [
            case.spatial_factor(q.points, 1 if axis == derivative_axis else 0) for axis, q in enumerate(quads)
        ])
        return approx - exact

    w = reduce(np.multiply.outer, [q.weights for q in quads])
    l2 = np.sqrt(np.sum(w * field() ** 2))
    h1 = np.sqrt(sum(np.sum(w * field(k) ** 2) for k in range(dim)))
    return ErrorReport(float(l2), float(h1), float(t), int(np.prod(shape)), max(b.h for b in bases), tau)


def semidiscrete_solution(M_factors, K_factors, U0, V0, t: float):
    """Exact-in-time solution of M U'' + K U = 0 on a fixed mesh.

    Uses the directional generalized eigenbases, so M^{-1}K = S diag(Λ) S^{-1}
    with S = P_x ⊗ P_y (⊗ P_z) and Λ the sums of directional eigenvalues.
    Serves as the reference that isolates the time-discretization error.
    """
    from .spectral import generalized_eigs_1d

    eigs = [generalized_eigs_1d(k, m) for m, k in zip(M_factors, K_factors)]
    shape = tuple(m.size for m in M_factors)
    U0 = np.asarray(U0, dtype=float).reshape(shape)
    V0 = np.asarray(V0, dtype=float).reshape(shape)

    def to_modes(x):
        # P^T M P = I, so modal coordinates are P^T M x
        for axis, (m, e) in enumerate(zip(M_factors, eigs)):
            x = _mode_apply(e.vectors.T, m.matvec(x, axis=axis), axis)
        return x

    def from_modes(c):
        for axis, e in enumerate(eigs):
            c = _mode_apply(e.vectors, c, axis)
        return c

    lam = reduce(np.add.outer, [e.lambdas for e in eigs])
    w = np.sqrt(lam)
    c, d = to_modes(U0), to_modes(V0)
    cos, sin = np.cos(w * t), np.sin(w * t)
    U = from_modes(cos * c + sin / w * d)
    V = from_modes(-w * sin * c + cos * d)
    return U, V


def discrete_l2_norm(M: KroneckerMass, x) -> float:
    """L² norm of the finite-element function with coefficients x."""
    x = np.asarray(x, dtype=float).reshape(M.shape)
    return float(np.sqrt(max(np.vdot(x, M.apply(x)), 0.0)))
