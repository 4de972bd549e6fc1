import numpy as np
import pytest
from scipy.interpolate import BSpline


def recursive_basis(knots, i, k, x):
    """Textbook Cox-de Boor recursion, one function at one point."""
    if k == 0:
        if knots[i] <= x < knots[i + 1]:
            return 1.0
        # right end of the domain belongs to the last nonempty span
        last = np.max(np.nonzero(knots[1:] > knots[:-1])[0])
        return 1.0 if (x == knots[-1] and i == last) else 0.0
    out = 0.0
    d1 = knots[i + k] - knots[i]
    d2 = knots[i + k + 1] - knots[i + 1]
    if d1 > 0:
        out += (x - knots[i]) / d1 * recursive_basis(knots, i, k - 1, x)
    if d2 > 0:
        out += (knots[i + k + 1] - x) / d2 * recursive_basis(knots, i + 1, k - 1, x)
    return out


def scipy_basis(knots, p, x, nu=0):
    """All basis functions (columns) at points x via scipy's BSpline."""
    n = len(knots) - p - 1
    spl = BSpline(knots, np.eye(n), p, extrapolate=False)
    return spl(np.asarray(x, dtype=float), nu=nu)


def dense_fem_matrices(knots, p, n_quad=None):
    """Full (unreduced) mass and stiffness by brute-force Gauss integration."""
    n_quad = n_quad or p + 5
    xi, w = np.polynomial.legendre.leggauss(n_quad)
    breaks = np.unique(knots)
    n = len(knots) - p - 1
    M = np.zeros((n, n))
    K = np.zeros((n, n))
    for a, b in zip(breaks[:-1], breaks[1:]):
        x = 0.5 * (a + b) + 0.5 * (b - a) * xi
        ww = 0.5 * (b - a) * w
        B = scipy_basis(knots, p, x)
        D = scipy_basis(knots, p, x, nu=1)
        M += B.T @ (ww[:, None] * B)
        K += D.T @ (ww[:, None] * D)
    return M, K


@pytest.fixture
def rng():
    return np.random.default_rng(20201015)


# acceptance results, printed as one PASS/FAIL line each after the run
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    def record(key: str, ok: bool, detail: str = "") -> bool:
        ACCEPTANCE[key] = (bool(ok), detail)
        print(f"criterion {key}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split()[0].rstrip("ab")), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
