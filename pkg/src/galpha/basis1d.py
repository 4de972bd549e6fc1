"""Uniform open-knot B-spline bases on [0, 1] and their 1D mass/stiffness matrices.

C0 bases reuse the B-spline machinery with interior knots repeated ``p``
times, so classical Lagrange-type finite elements and smooth IGA share one
assembly kernel.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .banded import BandedSymMatrix
from .errors import DomainError, ParameterError


class Continuity(str, enum.Enum):
    C0 = "C0"
    MAX = "Cp-1"

    @classmethod
    def parse(cls, value) -> "Continuity":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        if key in ("c0", "0", "fem"):
            return cls.C0
        if key in ("cp-1", "max", "smooth", "iga") or key.startswith("c"):
            return cls.MAX
        raise ParameterError(f"unknown continuity {value!r}")


def _continuity_for(p: int, value) -> Continuity:
    # "C1" with p=2 or "C2" with p=3 name the maximal class explicitly
    key = str(value).strip().lower()
    if key not in ("c0", "0") and key.startswith("c") and key[1:].isdigit():
        k = int(key[1:])
        if k == p - 1:
            return Continuity.MAX
        raise ParameterError(f"continuity C{k} is not available for degree {p}")
    return Continuity.parse(value)


@dataclass(frozen=True)
class KnotVector:
    degree: int
    knots: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        p = self.degree
        if p < 1:
            raise ParameterError(f"degree must be >= 1, got {p}")
        if np.any(np.diff(knots) < 0):
            raise ParameterError("knots must be nondecreasing")
        if knots[0] != 0.0 or knots[-1] != 1.0:
            raise ParameterError("knot vector must span [0, 1]")
        if np.count_nonzero(knots == 0.0) != p + 1 or np.count_nonzero(knots == 1.0) != p + 1:
            raise ParameterError("end knots must be repeated exactly p+1 times")
        object.__setattr__(self, "knots", knots)

    @property
    def n_functions(self) -> int:
        return len(self.knots) - self.degree - 1


@dataclass(frozen=True)
class Basis1D:
    knot_vector: KnotVector
    n_elements: int
    continuity: Continuity

    @property
    def degree(self) -> int:
        return self.knot_vector.degree

    @property
    def h(self) -> float:
        return 1.0 / self.n_elements

    @property
    def n_dof_total(self) -> int:
        return self.knot_vector.n_functions

    @property
    def n_dof_interior(self) -> int:
        return self.n_dof_total - 2

    @cached_property
    def breakpoints(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_elements + 1)

    @cached_property
    def element_spans(self) -> np.ndarray:
        """Knot-span index of every element, in element order."""
        knots = self.knot_vector.knots
        mids = 0.5 * (self.breakpoints[:-1] + self.breakpoints[1:])
        return np.searchsorted(knots, mids, side="right") - 1

    def find_span(self, x: np.ndarray) -> np.ndarray:
        knots = self.knot_vector.knots
        span = np.searchsorted(knots, x, side="right") - 1
        return np.clip(span, self.degree, self.n_dof_total - 1)


def build_basis(p: int, n_elements: int, continuity="Cp-1") -> Basis1D:
    if int(p) != p or p < 1:
        raise ParameterError(f"degree p must be an integer >= 1, got {p}")
    if int(n_elements) != n_elements or n_elements < 2:
        raise ParameterError(f"n_elements must be an integer >= 2, got {n_elements}")
    p, n_elements = int(p), int(n_elements)
    cont = _continuity_for(p, continuity)
    mult = 1 if cont is Continuity.MAX else p
    interior = np.repeat(np.arange(1, n_elements) / n_elements, mult)
    knots = np.concatenate([np.zeros(p + 1), interior, np.ones(p + 1)])
    return Basis1D(KnotVector(p, knots), n_elements, cont)


def _nonzero_basis(knots, p, span, x):
    """Values of the p+1 nonzero degree-p functions at each x (Cox-de Boor).

    Also returns the degree p-1 values, needed for derivatives.
    """
    npts = len(x)
    n = np.zeros((npts, p + 1))
    n[:, 0] = 1.0
    left = np.zeros((npts, p + 1))
    right = np.zeros((npts, p + 1))
    lower = n[:, :1].copy()
    for j in range(1, p + 1):
        left[:, j] = x - knots[span + 1 - j]
        right[:, j] = knots[span + j] - x
        saved = np.zeros(npts)
        for r in range(j):
            temp = n[:, r] / (right[:, r + 1] + left[:, j - r])
            n[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        n[:, j] = saved
        if j == p - 1:
            lower = n[:, :p].copy()
    return n, lower


def _eval_arrays(basis: Basis1D, x: np.ndarray, span: np.ndarray):
    knots = basis.knot_vector.knots
    p = basis.degree
    vals, lower = _nonzero_basis(knots, p, span, x)
    # derivative: N'_i = p N_{i,p-1}/(t_{i+p}-t_i) - p N_{i+1,p-1}/(t_{i+p+1}-t_{i+1})
    ders = np.zeros_like(vals)
    for r in range(p + 1):
        i = span - p + r
        if r >= 1:
            den = knots[i + p] - knots[i]
            ders[:, r] += np.where(den > 0, p * lower[:, r - 1] / np.where(den > 0, den, 1.0), 0.0)
        if r <= p - 1:
            den = knots[i + p + 1] - knots[i + 1]
            ders[:, r] -= np.where(den > 0, p * lower[:, r] / np.where(den > 0, den, 1.0), 0.0)
    idx = span[:, None] - p + np.arange(p + 1)
    return idx, vals, ders


def eval_basis(basis: Basis1D, x: float):
    """Active function indices, values and first derivatives at one point.

    Indices refer to the full (unreduced) basis.
    """
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x = {x} outside [0, 1]")
    xs = np.array([x])
    idx, vals, ders = _eval_arrays(basis, xs, basis.find_span(xs))
    return idx[0], vals[0], ders[0]


def gauss_points(n_quad: int):
    """Gauss-Legendre nodes/weights on [-1, 1]."""
    return np.polynomial.legendre.leggauss(n_quad)


def element_quadrature(basis: Basis1D, n_quad: int):
    """Per-element physical points/weights and active basis data.

    Returns (points, weights, idx, vals, ders) with shapes
    (E, Q), (E, Q), (E, p+1), (E, Q, p+1), (E, Q, p+1).
    """
    xi, w = gauss_points(n_quad)
    a, b = basis.breakpoints[:-1], basis.breakpoints[1:]
    half = 0.5 * (b - a)
    pts = (0.5 * (a + b))[:, None] + half[:, None] * xi[None, :]
    wts = half[:, None] * w[None, :]
    spans = np.repeat(basis.element_spans, n_quad)
    idx, vals, ders = _eval_arrays(basis, pts.ravel(), spans)
    E, p1 = basis.n_elements, basis.degree + 1
    return (
        pts,
        wts,
        idx.reshape(E, n_quad, p1)[:, 0, :],
        vals.reshape(E, n_quad, p1),
        ders.reshape(E, n_quad, p1),
    )


def _assemble(basis: Basis1D, n_quad: int | None, derivative: bool) -> BandedSymMatrix:
    p = basis.degree
    if n_quad is None:
        n_quad = p + 1
    if n_quad < p + 1:
        raise ParameterError(f"n_quad must be >= p+1 = {p + 1}, got {n_quad}")
    _, wts, idx, vals, ders = element_quadrature(basis, n_quad)
    f = ders if derivative else vals
    local = np.einsum("eq,eqa,eqb->eab", wts, f, f)
    m = basis.n_dof_total
    diags = [np.zeros(m - k) for k in range(p + 1)]
    # fixed element order: np.add.at accumulates sequentially
    for k in range(p + 1):
        rows = idx[:, : p + 1 - k]
        np.add.at(diags[k], rows.ravel(), np.diagonal(local, offset=k, axis1=1, axis2=2).ravel())
    full = BandedSymMatrix.from_diagonals(diags)
    return full


def assemble_mass_1d(basis: Basis1D, n_quad: int | None = None, *, interior: bool = True) -> BandedSymMatrix:
    full = _assemble(basis, n_quad, derivative=False)
    return full.restrict_interior() if interior else full


def assemble_stiffness_1d(basis: Basis1D, n_quad: int | None = None, *, interior: bool = True) -> BandedSymMatrix:
    full = _assemble(basis, n_quad, derivative=True)
    return full.restrict_interior() if interior else full


def collocation_matrices(basis: Basis1D, points: np.ndarray, spans: np.ndarray | None = None):
    """Sparse value and derivative matrices (n_points x n_dof_interior)."""
    points = np.asarray(points, dtype=float).ravel()
    if np.any(points < 0.0) or np.any(points > 1.0):
        raise DomainError("collocation points must lie in [0, 1]")
    if spans is None:
        spans = basis.find_span(points)
    idx, vals, ders = _eval_arrays(basis, points, spans)
    rows = np.repeat(np.arange(len(points)), basis.degree + 1)
    cols = idx.ravel() - 1
    keep = (cols >= 0) & (cols < basis.n_dof_interior)
    shape = (len(points), basis.n_dof_interior)
    value = sp.csr_matrix((vals.ravel()[keep], (rows[keep], cols[keep])), shape=shape)
    deriv = sp.csr_matrix((ders.ravel()[keep], (rows[keep], cols[keep])), shape=shape)
    return value, deriv
