"""Kronecker-structured mass/stiffness algebra on tensor-product grids.

Tensors are numpy arrays of shape ``(m_x, m_y[, m_z])`` whose C-order
ravel is the lexicographic DOF vector, so ``(A ⊗ B) vec(X) = vec(A X B^T)``.
Nothing here forms a multi-dimensional matrix except the ``to_dense`` /
``to_sparse`` helpers used by oracles and the unsplit baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .banded import BandedCholesky, BandedSymMatrix
from .errors import DimensionError, ParameterError


def _check_shape(x: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape == shape:
        return x
    if x.ndim == 1 and x.size == int(np.prod(shape)):
        return x.reshape(shape)
    raise DimensionError(f"tensor of shape {x.shape} does not match operator shape {shape}")


def kron_apply(factors: Sequence[BandedSymMatrix], x: np.ndarray) -> np.ndarray:
    """Apply ``factors[0] ⊗ factors[1] ⊗ ...`` by one banded product per axis."""
    shape = tuple(f.size for f in factors)
    y = _check_shape(x, shape)
    for axis, f in enumerate(factors):
        y = f.matvec(y, axis=axis)
    return y


def kron_dense(factors: Sequence[BandedSymMatrix]) -> np.ndarray:
    return reduce(np.kron, [f.to_dense() for f in factors])


def kron_sparse(factors: Sequence[BandedSymMatrix]) -> sp.csr_matrix:
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), [f.to_sparse() for f in factors])


@dataclass(frozen=True)
class KroneckerMass:
    factors: tuple[BandedSymMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) not in (1, 2, 3):
            raise DimensionError(f"expected 1-3 factors, got {len(self.factors)}")

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.factors)

    def apply(self, x):
        return kron_apply(self.factors, x)

    def to_dense(self):
        return kron_dense(self.factors)

    def to_sparse(self):
        return kron_sparse(self.factors)


@dataclass(frozen=True)
class KroneckerStiffness:
    """Sum over directions of K^ξ in slot ξ and M in every other slot."""

    mass_factors: tuple[BandedSymMatrix, ...]
    stiffness_factors: tuple[BandedSymMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "mass_factors", tuple(self.mass_factors))
        object.__setattr__(self, "stiffness_factors", tuple(self.stiffness_factors))
        if len(self.mass_factors) != len(self.stiffness_factors):
            raise DimensionError("need one mass and one stiffness factor per direction")
        for m, k in zip(self.mass_factors, self.stiffness_factors):
            if m.size != k.size:
                raise DimensionError(f"factor sizes differ: {m.size} vs {k.size}")

    @property
    def dim(self) -> int:
        return len(self.mass_factors)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.mass_factors)

    def _terms(self):
        for xi in range(self.dim):
            yield [self.stiffness_factors[j] if j == xi else self.mass_factors[j] for j in range(self.dim)]

    def apply(self, x):
        x = _check_shape(x, self.shape)
        return sum(kron_apply(term, x) for term in self._terms())

    def to_dense(self):
        return sum(kron_dense(term) for term in self._terms())

    def to_sparse(self):
        return sum(kron_sparse(term) for term in self._terms()).tocsr()


@dataclass(frozen=True)
class PencilFactorization:
    """Per-direction banded Cholesky factors of ``M^ξ + eta K^ξ``.

    Their Kronecker product is the separable step operator G~.
    """

    pencils: tuple[BandedSymMatrix, ...]
    factors: tuple[BandedCholesky, ...]
    eta: float
    mass_factors: tuple[BandedSymMatrix, ...] = ()
    stiffness_factors: tuple[BandedSymMatrix, ...] = ()

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(p.size for p in self.pencils)

    @property
    def dim(self) -> int:
        return len(self.pencils)

    def apply_gtilde(self, x):
        return kron_apply(self.pencils, x)

    def apply_split_stiffness(self, x):
        """Apply (G~ - M) / eta without forming the difference.

        Telescoping gives (G~ - M)/eta = sum_ξ P_<ξ ⊗ K^ξ ⊗ M_>ξ with
        P = M + eta K, which avoids the 1/eta cancellation for small steps.
        """
        if not self.stiffness_factors:
            raise ParameterError("pencils were built without stiffness factors")
        x = _check_shape(x, self.shape)
        total = np.zeros(self.shape)
        for xi in range(self.dim):
            term = list(self.pencils[:xi]) + [self.stiffness_factors[xi]] + list(self.mass_factors[xi + 1:])
            total += kron_apply(term, x)
        return total

    def solve(self, rhs):
        y = _check_shape(rhs, self.shape)
        for axis, f in enumerate(self.factors):
            y = f.solve(y, axis=axis)
        return y

    def gtilde_dense(self):
        return kron_dense(self.pencils)


def kron_apply_mass(M: KroneckerMass, x):
    return M.apply(x)


def kron_apply_stiffness(K: KroneckerStiffness, x):
    return K.apply(x)


def factorize_pencils(M_factors, K_factors, eta: float) -> PencilFactorization:
    eta = float(eta)
    if not eta >= 0.0:
        raise ParameterError(f"eta must be >= 0, got {eta}")
    if len(M_factors) != len(K_factors):
        raise DimensionError("need one mass and one stiffness factor per direction")
    pencils = tuple(m.axpy(eta, k) if eta else m for m, k in zip(M_factors, K_factors))
    return PencilFactorization(pencils, tuple(p.cholesky() for p in pencils), eta,
                               tuple(M_factors), tuple(K_factors))


def solve_gtilde(f: PencilFactorization, rhs):
    return f.solve(rhs)


def mass_factorization(M: KroneckerMass) -> PencilFactorization:
    return PencilFactorization(M.factors, tuple(m.cholesky() for m in M.factors), 0.0)


def solve_mass(M: KroneckerMass, rhs, factorization: PencilFactorization | None = None):
    if factorization is None:
        factorization = mass_factorization(M)
    return factorization.solve(rhs)


def gtilde_defect_norm(M_factors, K_factors, eta: float) -> float:
    """Frobenius norm of eta^2 K^x ⊗ K^y, via ||A ⊗ B||_F = ||A||_F ||B||_F."""
    if len(K_factors) != 2:
        raise DimensionError("the defect norm is defined for 2D factor pairs")
    kx, ky = K_factors
    return float(eta) ** 2 * kx.frobenius_norm() * ky.frobenius_norm()
