import numpy as np
import pytest

from oracles import gram_schmidt_rows

from infmat.algebra import Vector
from infmat.bases_orth import (BasisFamily, OrthogonalRows, orthogonalize,
                               transformation_matrix, transition_matrix)
from infmat.errors import DependentRowsError, GramConvergenceError
from infmat.matrix_core import (DecayCertificate, DenseMatrix, INFINITE,
                                MatrixSpec, TruncationSchedule, entrywise_spec)
from infmat.series import ConvergencePolicy, sum_series

SCHED = TruncationSchedule(8, 2, 64)


def standard_basis():
    return BasisFamily(INFINITE, lambda i: Vector(
        INFINITE, lambda j, _i=i: 1.0 if j == _i else 0.0))


# --- orthogonalization --------------------------------------------------------

def test_orthogonalize_worked_example():
    rep = orthogonalize(DenseMatrix([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]]))
    assert rep.gram.tolist() == [[2.0, 1.0], [1.0, 2.0]]
    # single elimination step: row2 <- row2 - 0.5 row1
    assert rep.G.tolist() == [[2.0, 1.0], [0.0, 1.5]]
    assert rep.A_prime.tolist() == [[1.0, 1.0, 0.0], [-0.5, 0.5, 1.0]]
    d = np.dot(rep.A_prime.data[0], rep.A_prime.data[1])
    assert abs(d) <= 1e-15
    assert rep.max_offdiag_dot <= 1e-15


def test_orthogonalize_already_orthogonal_rows():
    a = DenseMatrix([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
    rep = orthogonalize(a)
    assert rep.A_prime.tolist() == a.tolist()
    assert rep.G.tolist() == [[1.0, 0.0], [0.0, 4.0]]


def test_orthogonalize_dependent_rows_named():
    with pytest.raises(DependentRowsError) as err:
        orthogonalize(DenseMatrix([[1.0, 2.0], [2.0, 4.0]]))
    assert err.value.row == 2


def test_orthogonalize_matches_gram_schmidt():
    rng = np.random.default_rng(0)
    for _ in range(100):
        m = int(rng.integers(1, 7))
        n = int(rng.integers(m, 11))
        a = rng.uniform(-2, 2, (m, n))
        rep = orthogonalize(DenseMatrix(a))
        want = gram_schmidt_rows(a)
        assert np.max(np.abs(rep.A_prime.data - want)) <= 1e-9
        # G is upper triangular with exact zeros below the diagonal
        assert np.array_equal(np.tril(rep.G.data, -1), np.zeros((m, m)))
        prods = rep.A_prime.data @ rep.A_prime.data.T
        off = prods - np.diag(np.diag(prods))
        assert np.max(np.abs(off)) <= 1e-8 * max(1.0, np.max(np.diag(prods)))


def test_orthogonalize_row_space_preserved():
    rng = np.random.default_rng(1)
    for _ in range(30):
        m, n = int(rng.integers(1, 6)), 8
        a = rng.uniform(-1, 1, (m, n))
        rep = orthogonalize(DenseMatrix(a))
        # every original row solves as a combination of transformed rows
        sol, residuals, *_ = np.linalg.lstsq(rep.A_prime.data.T, a.T, rcond=None)
        recon = rep.A_prime.data.T @ sol
        assert np.max(np.abs(recon - a.T)) <= 1e-9


def test_orthogonalize_geometric_rows():
    spec = MatrixSpec(2, INFINITE,
                      lambda i, j: (2.0 if i == 1 else 3.0) ** -j)
    rep = orthogonalize(spec)
    assert rep.gram.at(1, 1) == pytest.approx(1.0 / 3.0, abs=1e-10)
    assert rep.gram.at(1, 2) == pytest.approx(1.0 / 5.0, abs=1e-10)
    assert rep.gram.at(2, 2) == pytest.approx(1.0 / 8.0, abs=1e-10)
    assert isinstance(rep.A_prime, OrthogonalRows)
    # second transformed row is r2 - (3/5) r1
    coeff = rep.A_prime.coefficients
    assert coeff[1, 0] == pytest.approx(-3.0 / 5.0, abs=1e-9)
    # its inner product with row 1 vanishes as a checked series
    resid = sum_series(lambda j: spec.entry(1, j) * rep.A_prime.entry(2, j))
    assert abs(resid.estimate) <= 1e-9
    assert rep.max_offdiag_dot <= 1e-8 * (1.0 / 3.0)


def test_orthogonalize_certified_rows_report():
    spec = entrywise_spec(lambda i, j: 0.5 ** (i + j), rows=2,
                          decay=DecayCertificate(1.0, 0.5))
    with pytest.raises(DependentRowsError):
        # geometric rows are proportional: dependent
        orthogonalize(spec)


def test_orthogonalize_divergent_gram_entry():
    spec = MatrixSpec(2, INFINITE, lambda i, j: 1.0)
    with pytest.raises(GramConvergenceError) as err:
        orthogonalize(spec, ConvergencePolicy(tol=1e-4))
    assert err.value.pair == (1, 1)


def test_orthogonal_rows_section_matches_entries():
    spec = MatrixSpec(2, INFINITE,
                      lambda i, j: (2.0 if i == 1 else 3.0) ** -j)
    rep = orthogonalize(spec)
    sec = rep.A_prime.section(5)
    for p in (1, 2):
        for j in (1, 3, 5):
            assert sec.at(p, j) == pytest.approx(rep.A_prime.entry(p, j), abs=1e-14)


# --- transition matrices --------------------------------------------------------

def test_transition_worked_pair():
    B = BasisFamily(2, lambda i: Vector.from_values([1.0, 0.0] if i == 1 else [0.0, 1.0]))
    Bp = BasisFamily(2, lambda i: Vector.from_values([1.0, 1.0] if i == 1 else [1.0, -1.0]))
    res = transition_matrix(B, Bp, 2)
    assert res.matrix.tolist() == [[1.0, 1.0], [1.0, -1.0]]
    assert set(res.column_status.values()) == {"converged"}


def test_transition_same_basis_is_identity():
    rng = np.random.default_rng(2)
    v = rng.uniform(-2, 2, (3, 3)) + 4 * np.eye(3)
    B = BasisFamily(3, lambda i: Vector.from_values(v[i - 1]))
    res = transition_matrix(B, B, 3)
    assert np.max(np.abs(res.matrix.data - np.eye(3))) <= 1e-12


def test_transition_inverse_relation():
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = rng.uniform(-2, 2, (4, 4)) + 5 * np.eye(4)
        w = rng.uniform(-2, 2, (4, 4)) + 5 * np.eye(4)
        B = BasisFamily(4, lambda i, _v=v: Vector.from_values(_v[i - 1]))
        Bp = BasisFamily(4, lambda i, _w=w: Vector.from_values(_w[i - 1]))
        ab = transition_matrix(B, Bp, 4).matrix.data
        ba = transition_matrix(Bp, B, 4).matrix.data
        assert np.max(np.abs(ab @ ba - np.eye(4))) <= 1e-8


def test_transition_shifted_standard_family():
    shifted = BasisFamily(INFINITE, lambda i: Vector(
        INFINITE, lambda j, _i=i: 1.0 if j in (_i, _i + 1) else 0.0))
    res = transition_matrix(standard_basis(), shifted, 6, SCHED)
    m = res.matrix.data
    assert np.array_equal(np.diag(m), np.ones(6))
    assert np.array_equal(np.diag(m, -1), np.ones(5))
    assert np.max(np.abs(np.triu(m, 1))) == 0.0
    assert set(res.column_status.values()) == {"converged"}


def test_transformation_matrix_identity_map():
    tm = transformation_matrix(
        lambda i: Vector.from_values([1.0 if j == i else 0.0 for j in range(1, 4)]),
        3, 3)
    assert np.array_equal(tm.data, np.eye(3))


def test_transformation_matrix_monomial_derivative():
    def image(i):
        # derivative of x^(i-1) expressed in the monomial basis
        return Vector.from_values(
            [float(i - 1) if j == i - 1 else 0.0 for j in range(1, 5)])

    tm = transformation_matrix(image, 4, 4)
    want = np.zeros((4, 4))
    for i in range(2, 5):
        want[i - 2, i - 1] = i - 1
    assert np.array_equal(tm.data, want)


def test_transformation_matrix_zero_map():
    tm = transformation_matrix(
        lambda i: Vector.from_values([0.0, 0.0]), 3, 2)
    assert np.array_equal(tm.data, np.zeros((2, 3)))


def test_transformation_matrix_with_target_basis():
    target = BasisFamily(3, lambda i: Vector.from_values(
        [2.0 if j == i else 0.0 for j in range(1, 4)]))

    def image(i):
        return Vector.from_values([1.0 if j == i else 0.0 for j in range(1, 4)])

    tm = transformation_matrix(image, 3, 3, target_basis=target)
    assert np.max(np.abs(tm.data - 0.5 * np.eye(3))) <= 1e-12
