import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galpha.basis1d import (
    KnotVector,
    assemble_mass_1d,
    assemble_stiffness_1d,
    build_basis,
    eval_basis,
)
from galpha.errors import DomainError, ParameterError

from conftest import dense_fem_matrices, recursive_basis, scipy_basis

SETTINGS = [(1, "C0"), (2, "C0"), (2, "C1"), (3, "C0"), (3, "C2")]


@pytest.mark.parametrize("p,n,cont,total,interior", [
    (1, 2, "C0", 3, 1),
    (2, 4, "C1", 6, 4),
    (3, 64, "C2", 67, 65),
    (2, 4, "C0", 9, 7),
    (3, 5, "C0", 16, 14),
])
def test_dof_counts(p, n, cont, total, interior):
    b = build_basis(p, n, cont)
    assert b.n_dof_total == total
    assert b.n_dof_interior == interior
    assert b.h == pytest.approx(1.0 / n)


def test_dof_count_matches_brute_force_enumeration():
    # count functions whose support has positive measure
    for p, cont in SETTINGS:
        for n in (2, 3, 7):
            b = build_basis(p, n, cont)
            t = b.knot_vector.knots
            nonempty = sum(1 for i in range(len(t) - p - 1) if t[i + p + 1] > t[i])
            assert nonempty == b.n_dof_total


def test_knot_vector_invariants():
    for p, cont in SETTINGS:
        b = build_basis(p, 6, cont)
        t = b.knot_vector.knots
        assert np.all(np.diff(t) >= 0)
        assert np.count_nonzero(t == 0) == p + 1 and np.count_nonzero(t == 1) == p + 1
        interior = t[(t > 0) & (t < 1)]
        _, mult = np.unique(interior, return_counts=True)
        assert set(mult) <= {1, p}


@pytest.mark.parametrize("bad", [dict(p=0, n_elements=4), dict(p=2, n_elements=1), dict(p=2.5, n_elements=4)])
def test_build_basis_rejects_bad_parameters(bad):
    with pytest.raises(ParameterError):
        build_basis(bad["p"], bad["n_elements"])


def test_knot_vector_rejects_bad_end_multiplicity():
    with pytest.raises(ParameterError):
        KnotVector(2, np.array([0, 0, 0.5, 1, 1, 1.0]))


def test_continuity_name_must_match_degree():
    with pytest.raises(ParameterError):
        build_basis(2, 4, "C2")


def test_hat_functions_at_quarter():
    idx, vals, ders = eval_basis(build_basis(1, 2, "C0"), 0.25)
    assert list(idx) == [0, 1]
    np.testing.assert_allclose(vals, [0.5, 0.5])
    np.testing.assert_allclose(ders, [-2.0, 2.0])


def test_eval_outside_domain():
    with pytest.raises(DomainError):
        eval_basis(build_basis(2, 4), 1.5)


@pytest.mark.parametrize("p,cont", SETTINGS)
def test_eval_matches_recursive_and_scipy_oracles(p, cont):
    b = build_basis(p, 4, cont)
    t = b.knot_vector.knots
    grid = np.linspace(0.0, 1.0, 1000)
    ref_vals = scipy_basis(t, p, grid)
    ref_ders = scipy_basis(t, p, grid, nu=1)
    for k, x in enumerate(grid):
        idx, vals, ders = eval_basis(b, x)
        full = np.zeros(b.n_dof_total)
        full[idx] = vals
        rec = np.array([recursive_basis(t, i, p, x) for i in range(b.n_dof_total)])
        np.testing.assert_allclose(full, rec, atol=1e-13)
        if 0 < x < 1:
            np.testing.assert_allclose(full, ref_vals[k], atol=1e-13)
            # scipy picks the left span at breakpoints; derivatives of C0 bases jump there
            if not np.any(np.isclose(x, np.unique(t))):
                dfull = np.zeros(b.n_dof_total)
                dfull[idx] = ders
                np.testing.assert_allclose(dfull, ref_ders[k], atol=1e-10)


@pytest.mark.parametrize("p,cont", SETTINGS)
def test_partition_of_unity(p, cont, rng):
    b = build_basis(p, 7, cont)
    for x in rng.uniform(0, 1, 10_000 // len(SETTINGS)):
        _, vals, ders = eval_basis(b, x)
        assert abs(vals.sum() - 1.0) < 1e-12
        assert abs(ders.sum()) < 1e-10


@settings(max_examples=200, deadline=None)
@given(p=st.integers(1, 4), n=st.integers(2, 12), c0=st.booleans(), x=st.floats(0.0, 1.0))
def test_partition_of_unity_property(p, n, c0, x):
    b = build_basis(p, n, "C0" if c0 else "Cp-1")
    idx, vals, ders = eval_basis(b, x)
    assert len(idx) == p + 1
    assert abs(vals.sum() - 1.0) < 1e-12
    assert abs(ders.sum()) < 1e-9 * n
    assert np.all(vals >= -1e-15)


def test_mass_single_hat():
    M = assemble_mass_1d(build_basis(1, 2, "C0"), 2)
    np.testing.assert_allclose(M.to_dense(), [[1 / 3]], rtol=1e-14)


def test_stiffness_single_hat():
    K = assemble_stiffness_1d(build_basis(1, 2, "C0"), 2)
    np.testing.assert_allclose(K.to_dense(), [[4.0]], rtol=1e-14)


def test_linear_elements_four_cells():
    b = build_basis(1, 4, "C0")
    M, K = assemble_mass_1d(b, 2).to_dense(), assemble_stiffness_1d(b, 2).to_dense()
    tri = lambda d, o: d * np.eye(3) + o * (np.eye(3, k=1) + np.eye(3, k=-1))
    np.testing.assert_allclose(M, tri(1 / 6, 1 / 24), rtol=1e-14)
    np.testing.assert_allclose(K, tri(8.0, -4.0), rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("p,cont", SETTINGS)
def test_unreduced_row_sums(p, cont):
    b = build_basis(p, 5, cont)
    M = assemble_mass_1d(b, interior=False).to_dense()
    K = assemble_stiffness_1d(b, interior=False).to_dense()
    assert M.sum() == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(K.sum(axis=1), 0.0, atol=1e-12)


@pytest.mark.parametrize("p,cont", SETTINGS)
def test_bandwidth_and_cholesky(p, cont):
    b = build_basis(p, 9, cont)
    for A in (assemble_mass_1d(b), assemble_stiffness_1d(b)):
        assert A.bandwidth == p
        dense = A.to_dense()
        np.testing.assert_array_equal(dense, dense.T)
        A.cholesky()  # raises FactorizationError on pivot failure


@pytest.mark.parametrize("p,cont", SETTINGS)
def test_quadrature_exactness(p, cont):
    b = build_basis(p, 6, cont)
    for assemble in (assemble_mass_1d, assemble_stiffness_1d):
        a = assemble(b, p + 1).to_dense()
        c = assemble(b, 2 * (p + 1)).to_dense()
        assert np.max(np.abs(a - c)) <= 1e-13 * max(1.0, np.max(np.abs(a)))


@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("n", [2, 4, 8])
@pytest.mark.parametrize("c0", [True, False])
def test_banded_assembly_equals_dense_oracle(p, n, c0):
    b = build_basis(p, n, "C0" if c0 else "Cp-1")
    M_ref, K_ref = dense_fem_matrices(b.knot_vector.knots, p)
    M = assemble_mass_1d(b, interior=False).to_dense()
    K = assemble_stiffness_1d(b, interior=False).to_dense()
    np.testing.assert_allclose(M, M_ref, atol=1e-13 * max(1.0, np.abs(M_ref).max()))
    np.testing.assert_allclose(K, K_ref, atol=1e-13 * max(1.0, np.abs(K_ref).max()))
    np.testing.assert_allclose(assemble_mass_1d(b).to_dense(), M_ref[1:-1, 1:-1], atol=1e-13)


def test_assembly_is_deterministic():
    b = build_basis(3, 40, "C2")
    a = assemble_stiffness_1d(b).ab
    assert np.array_equal(a, assemble_stiffness_1d(b).ab)
