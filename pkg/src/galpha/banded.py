"""Symmetric banded matrices in LAPACK upper storage.

The entry ``A[i, j]`` with ``i <= j`` lives at ``ab[b + i - j, j]``; this is
the layout consumed by :func:`scipy.linalg.cholesky_banded`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import DimensionError, FactorizationError


@dataclass(frozen=True)
class BandedSymMatrix:
    ab: np.ndarray

    def __post_init__(self):
        ab = np.asarray(self.ab, dtype=float)
        if ab.ndim != 2:
            raise DimensionError(f"banded storage must be 2D, got shape {ab.shape}")
        object.__setattr__(self, "ab", ab)

    @property
    def size(self) -> int:
        return self.ab.shape[1]

    @property
    def bandwidth(self) -> int:
        return self.ab.shape[0] - 1

    @classmethod
    def from_dense(cls, a, bandwidth: int | None = None) -> "BandedSymMatrix":
        a = np.atleast_2d(np.asarray(a, dtype=float))
        m = a.shape[0]
        if a.shape != (m, m):
            raise DimensionError(f"expected a square matrix, got {a.shape}")
        if bandwidth is None:
            rows, cols = np.nonzero(a)
            bandwidth = int(np.max(np.abs(rows - cols), initial=0))
        b = bandwidth
        ab = np.zeros((b + 1, m))
        for k in range(b + 1):
            ab[b - k, k:] = np.diagonal(a, k)
        return cls(ab)

    @classmethod
    def from_diagonals(cls, diags: list[np.ndarray]) -> "BandedSymMatrix":
        """Build from ``diags[k][i] = A[i, i + k]`` for k = 0..b."""
        b = len(diags) - 1
        m = len(diags[0])
        ab = np.zeros((b + 1, m))
        for k, d in enumerate(diags):
            ab[b - k, k:] = d
        return cls(ab)

    def diagonal(self, k: int = 0) -> np.ndarray:
        """Super-diagonal ``k``: entries ``A[i, i + k]``."""
        b = self.bandwidth
        if k > b:
            return np.zeros(max(self.size - k, 0))
        return self.ab[b - k, k:]

    def to_dense(self) -> np.ndarray:
        m, b = self.size, self.bandwidth
        a = np.zeros((m, m))
        for k in range(b + 1):
            d = self.diagonal(k)
            idx = np.arange(m - k)
            a[idx, idx + k] = d
            a[idx + k, idx] = d
        return a

    def to_sparse(self) -> sp.csr_matrix:
        b = self.bandwidth
        offsets, data = [], []
        for k in range(b + 1):
            d = self.diagonal(k)
            offsets.append(k)
            data.append(d)
            if k:
                offsets.append(-k)
                data.append(d)
        return sp.diags(data, offsets, shape=(self.size, self.size), format="csr")

    def restrict_interior(self) -> "BandedSymMatrix":
        """Drop the first and last rows/columns (homogeneous Dirichlet)."""
        m = self.size
        return BandedSymMatrix.from_diagonals(
            [self.diagonal(k)[1 : m - 1 - k] for k in range(min(self.bandwidth, m - 3) + 1)]
        )

    def __add__(self, other: "BandedSymMatrix") -> "BandedSymMatrix":
        return self.axpy(1.0, other)

    def axpy(self, alpha: float, other: "BandedSymMatrix") -> "BandedSymMatrix":
        """Return ``self + alpha * other``."""
        if other.size != self.size:
            raise DimensionError(f"size mismatch {self.size} vs {other.size}")
        b = max(self.bandwidth, other.bandwidth)
        ab = np.zeros((b + 1, self.size))
        ab[b - self.bandwidth :] += self.ab
        ab[b - other.bandwidth :] += alpha * other.ab
        return BandedSymMatrix(ab)

    def scaled(self, alpha: float) -> "BandedSymMatrix":
        return BandedSymMatrix(alpha * self.ab)

    def frobenius_norm(self) -> float:
        d0 = self.diagonal(0)
        s = d0 @ d0
        for k in range(1, self.bandwidth + 1):
            d = self.diagonal(k)
            s += 2.0 * (d @ d)
        return float(np.sqrt(s))

    def matvec(self, x: np.ndarray, axis: int = 0) -> np.ndarray:
        """Multiply along ``axis`` of ``x`` (every fiber along that axis)."""
        x = np.asarray(x, dtype=float)
        if x.shape[axis] != self.size:
            raise DimensionError(
                f"axis {axis} has length {x.shape[axis]}, matrix has size {self.size}"
            )
        xt = np.moveaxis(x, axis, 0)
        tail = (slice(None),) + (None,) * (xt.ndim - 1)
        y = self.diagonal(0)[tail] * xt
        for k in range(1, self.bandwidth + 1):
            if k >= self.size:
                break
            d = self.diagonal(k)[tail]
            y[:-k] += d * xt[k:]
            y[k:] += d * xt[:-k]
        return np.moveaxis(y, 0, axis)

    def cholesky(self) -> "BandedCholesky":
        try:
            cb = sla.cholesky_banded(self.ab, lower=False)
        except np.linalg.LinAlgError as exc:
            raise FactorizationError(f"banded Cholesky failed: {exc}") from exc
        return BandedCholesky(cb)


@dataclass(frozen=True)
class BandedCholesky:
    """Upper factor ``R`` with ``A = R^T R``, same storage as the matrix."""

    cb: np.ndarray

    @property
    def size(self) -> int:
        return self.cb.shape[1]

    def solve(self, rhs: np.ndarray, axis: int = 0) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[axis] != self.size:
            raise DimensionError(
                f"axis {axis} has length {rhs.shape[axis]}, factor has size {self.size}"
            )
        moved = np.moveaxis(rhs, axis, 0)
        flat = moved.reshape(self.size, -1)
        sol = sla.cho_solve_banded((self.cb, False), flat, check_finite=False)
        return np.moveaxis(sol.reshape(moved.shape), 0, axis)

    def reconstruct(self) -> BandedSymMatrix:
        r = BandedSymMatrix(self.cb)
        b = r.bandwidth
        upper = np.triu(r.to_dense())
        return BandedSymMatrix.from_dense(upper.T @ upper, bandwidth=b)
