"""Per-mode amplification matrices and stability scans.

Every matrix acts on the mode coordinates ``(U, τV, τ²A)``. With the
per-step jump written as ``τ²[[A]] = c1 U + c2 τV + c3 τ²A`` the scheme
updates give

    [[1 + β c1, 1 + β c2, 1/2 + β c3],
     [    γ c1, 1 + γ c2,   1 + γ c3],
     [      c1,       c2,   1 + c3  ]]

so each scheme is fully described by its jump coefficients. Mode
stiffnesses enter through ``σ_ξ = τ² λ_ξ``; ``σ = inf`` gives the exact
infinite-step limit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .banded import BandedSymMatrix
from .errors import FactorizationError, ParameterError
from .integrator import AlphaParams


class Scheme(str, enum.Enum):
    STANDARD = "standard"
    NAIVE_LHS = "naive_lhs"
    SPLIT = "split"

    @classmethod
    def parse(cls, value) -> "Scheme":
        key = str(getattr(value, "value", value)).lower().replace("-", "_")
        aliases = {"naive": "naive_lhs", "lhs": "naive_lhs", "naivelhs": "naive_lhs"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ParameterError(f"unknown scheme {value!r}") from None


@dataclass(frozen=True)
class ModeMatrix3:
    entries: np.ndarray
    scheme: Scheme
    sigma_x: float
    sigma_y: float = 0.0


@dataclass(frozen=True)
class ModeSpectrum:
    eigenvalues: np.ndarray
    spectral_radius: float


@dataclass(frozen=True)
class GeneralizedEigs1D:
    lambdas: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class StabilityScanResult:
    scheme: Scheme
    params: AlphaParams
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    radii: np.ndarray
    max_radius: float
    argmax: tuple[float, float]
    radius_zero: float
    radius_inf: float


def generalized_eigs_1d(K: BandedSymMatrix, M: BandedSymMatrix) -> GeneralizedEigs1D:
    """Solve K v = λ M v densely; eigenvectors are M-orthonormal."""
    try:
        lam, vec = sla.eigh(K.to_dense(), M.to_dense())
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(f"generalized eigenproblem failed: {exc}") from exc
    if lam[0] <= 0.0:
        raise FactorizationError(f"stiffness is not positive definite (λ_min = {lam[0]})")
    return GeneralizedEigs1D(lam, vec)


def _q(s, k):
    """1 / (1 + k s), exact at s = inf."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.isinf(s), 0.0, 1.0 / (1.0 + k * np.where(np.isinf(s), 0.0, s)))


def _r(s, k):
    """s / (1 + k s), exact at s = inf."""
    s = np.asarray(s, dtype=float)
    finite = np.where(np.isinf(s), 0.0, s)
    return np.where(np.isinf(s), 1.0 / k, finite / (1.0 + k * finite))


def _matrix(c1, c2, c3, params: AlphaParams) -> np.ndarray:
    b, g = params.beta, params.gamma
    c1, c2, c3 = np.broadcast_arrays(c1, c2, c3)
    out = np.empty(c1.shape + (3, 3))
    out[..., 0, 0] = 1 + b * c1
    out[..., 0, 1] = 1 + b * c2
    out[..., 0, 2] = 0.5 + b * c3
    out[..., 1, 0] = g * c1
    out[..., 1, 1] = 1 + g * c2
    out[..., 1, 2] = 1 + g * c3
    out[..., 2, 0] = c1
    out[..., 2, 1] = c2
    out[..., 2, 2] = 1 + c3
    return out


def _k(params: AlphaParams) -> float:
    # η λ = k σ
    return params.alpha_f * params.beta / params.alpha_m


def standard_batch(sigma, params: AlphaParams) -> np.ndarray:
    am, af, k = params.alpha_m, params.alpha_f, _k(params)
    e, es = _q(sigma, k), _r(sigma, k)
    return _matrix(-es / am, -es * af / am, -(e + 0.5 * af * es) / am, params)


def naive_lhs_batch(sigma_x, sigma_y, params: AlphaParams) -> np.ndarray:
    am, af, k = params.alpha_m, params.alpha_f, _k(params)
    qx, qy = _q(sigma_x, k), _q(sigma_y, k)
    e = qx * qy
    zeta = _r(sigma_x, k) * qy + qx * _r(sigma_y, k)   # τ² ζ per mode
    return _matrix(-zeta / am, -zeta * af / am, -(e + 0.5 * af * zeta) / am, params)


def split_batch(sigma_x, sigma_y, params: AlphaParams, form: str = "printed") -> np.ndarray:
    """Split scheme in its ẽ-only form.

    ``form="printed"`` is the published matrix; ``form="scheme"`` is the exact
    one-step map of the implemented update. They coincide when α_m = 1.
    """
    am, af, b, k = params.alpha_m, params.alpha_f, params.beta, _k(params)
    e = _q(sigma_x, k) * _q(sigma_y, k)
    c1 = -(1 - e) / (af * b)
    c2 = -(1 - e) / b
    if form == "printed":
        c3 = -(1 / (2 * b) - (1 / (2 * b) - 1) * e)
    elif form == "scheme":
        c3 = -e / am - (1 - e) / (2 * b)
    else:
        raise ParameterError(f"form must be 'printed' or 'scheme', got {form!r}")
    return _matrix(c1, c2, c3, params)


def amplification_standard(sigma: float, params: AlphaParams) -> ModeMatrix3:
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    return ModeMatrix3(standard_batch(sigma, params), Scheme.STANDARD, float(sigma))


def amplification_naive_lhs(sigma_x: float, sigma_y: float, params: AlphaParams) -> ModeMatrix3:
    if sigma_x < 0 or sigma_y < 0:
        raise ParameterError("sigmas must be >= 0")
    return ModeMatrix3(naive_lhs_batch(sigma_x, sigma_y, params), Scheme.NAIVE_LHS, float(sigma_x), float(sigma_y))


def amplification_split(sigma_x: float, sigma_y: float, params: AlphaParams, form: str = "printed") -> ModeMatrix3:
    if sigma_x < 0 or sigma_y < 0:
        raise ParameterError("sigmas must be >= 0")
    return ModeMatrix3(split_batch(sigma_x, sigma_y, params, form), Scheme.SPLIT, float(sigma_x), float(sigma_y))


def amplification(scheme, sigma_x, sigma_y, params: AlphaParams, form: str = "printed") -> np.ndarray:
    """Batched matrices for any scheme; the standard scheme uses σ_x + σ_y."""
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.STANDARD:
        return standard_batch(np.asarray(sigma_x, dtype=float) + np.asarray(sigma_y, dtype=float), params)
    if scheme is Scheme.NAIVE_LHS:
        return naive_lhs_batch(sigma_x, sigma_y, params)
    return split_batch(sigma_x, sigma_y, params, form)


def _eig2(a: np.ndarray) -> np.ndarray:
    half_trace = 0.5 * (a[0, 0] + a[1, 1])
    disc = 0.25 * (a[0, 0] - a[1, 1]) ** 2 + a[0, 1] * a[1, 0]
    # a noise-level discriminant is a double root; sqrt would amplify it to ~1e-8
    if abs(disc) <= 1e-14 * max(1.0, half_trace**2):
        return np.array([half_trace, half_trace], dtype=complex)
    root = np.sqrt(complex(disc))
    return np.array([half_trace + root, half_trace - root])


def eig3(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a 3x3 matrix, exact-structure aware.

    Block-triangular matrices (the σ -> 0 and σ -> inf limits) split into a
    1x1 and a 2x2 block solved in closed form; everything else goes to LAPACK.
    """
    a = np.asarray(a, dtype=float)
    if (a[1, 0] == 0 and a[2, 0] == 0) or (a[0, 1] == 0 and a[0, 2] == 0):
        return np.concatenate([[complex(a[0, 0])], _eig2(a[1:, 1:])])
    if (a[2, 0] == 0 and a[2, 1] == 0) or (a[0, 2] == 0 and a[1, 2] == 0):
        return np.concatenate([_eig2(a[:2, :2]), [complex(a[2, 2])]])
    return np.linalg.eigvals(a).astype(complex)


def spectral_radius(m) -> ModeSpectrum:
    a = m.entries if isinstance(m, ModeMatrix3) else np.asarray(m, dtype=float)
    eig = eig3(a)
    return ModeSpectrum(eig, float(np.max(np.abs(eig))))


def log_grid(lo: float = 1e-8, hi: float = 1e8, n: int = 200) -> np.ndarray:
    return np.logspace(np.log10(lo), np.log10(hi), n)


def scan_stability(scheme, params: AlphaParams, sigma_grid=None, form: str = "printed") -> StabilityScanResult:
    """Max spectral radius over a σ grid (a (σ_x, σ_y) product grid for split schemes).

    Ties resolve to the lexicographically first (σ_x, σ_y).
    """
    scheme = Scheme.parse(scheme)
    grid = log_grid() if sigma_grid is None else np.asarray(sigma_grid, dtype=float)
    if np.any(grid < 0):
        raise ParameterError("sigma grid must be nonnegative")
    if scheme is Scheme.STANDARD:
        sx, sy = grid, np.zeros_like(grid)
    else:
        sx, sy = (a.ravel() for a in np.meshgrid(grid, grid, indexing="ij"))
    mats = amplification(scheme, sx, sy, params, form)
    radii = np.max(np.abs(np.linalg.eigvals(mats)), axis=-1)
    i = int(np.argmax(radii))
    zero = spectral_radius(amplification(scheme, 0.0, 0.0, params, form)).spectral_radius
    inf = spectral_radius(amplification(scheme, np.inf, np.inf if scheme is not Scheme.STANDARD else 0.0,
                                        params, form)).spectral_radius
    return StabilityScanResult(scheme, params, sx, sy, radii, float(radii[i]), (float(sx[i]), float(sy[i])), zero, inf)
