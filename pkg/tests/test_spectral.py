import numpy as np
import pytest

from oracles import charpoly_roots

from infmat.errors import PreconditionError, SingularSystemError
from infmat.matrix_core import (DenseMatrix, TruncationSchedule, diagonal_spec,
                                identity_spec)
from infmat.spectral import char_value, eigenvector_for, find_eigenvalues

SCHED = TruncationSchedule(8, 2, 64)


def test_char_value_diagonal_hits_zero():
    spec = diagonal_spec(lambda i: 1.0 / i)
    assert char_value(spec, 0.5, 4) == 0.0


def test_char_value_identity():
    assert char_value(identity_spec(), 0.0, 5) == pytest.approx(1.0)
    assert char_value(identity_spec(), 0.0, 9) == pytest.approx(1.0)


def test_char_value_symmetric_eigenvalue():
    a = DenseMatrix([[2.0, 1.0], [1.0, 2.0]])
    assert char_value(a, 1.0, 2) == pytest.approx(0.0, abs=1e-12)


def test_char_value_routes_agree_when_log_series_applies():
    a = DenseMatrix([[1.2, 0.1], [0.05, 0.9]])
    lam = 0.2
    lu = char_value(a, lam, 2, route="lu-oracle")
    log = char_value(a, lam, 2, route="log-series")
    assert log == pytest.approx(lu, abs=1e-8)


def test_char_value_forced_log_series_precondition():
    with pytest.raises(PreconditionError):
        char_value(identity_spec(), 5.0, 4, route="log-series")


def test_find_eigenvalues_two_by_two():
    pairs = find_eigenvalues(DenseMatrix([[2.0, 1.0], [1.0, 2.0]]), (0.0, 4.0))
    assert len(pairs) == 2
    assert pairs[0].lam == pytest.approx(1.0, abs=1e-8)
    assert pairs[1].lam == pytest.approx(3.0, abs=1e-8)
    v = pairs[1].vector.values()
    assert v.tolist() == pytest.approx([1.0, 1.0], abs=1e-8)


def test_find_eigenvalues_empty_interval_result():
    pairs = find_eigenvalues(identity_spec(4), (2.0, 3.0))
    assert pairs == []


def test_find_eigenvalues_reciprocal_diagonal():
    spec = diagonal_spec(lambda i: 1.0 / i)
    pairs = find_eigenvalues(spec, (0.4, 0.6), SCHED)
    assert len(pairs) == 1
    pair = pairs[0]
    assert pair.lam == pytest.approx(0.5, abs=1e-9)
    assert pair.stable
    vec = pair.vector.values()
    assert abs(vec[1] - 1.0) <= 1e-9
    assert max(abs(v) for k, v in enumerate(vec) if k != 1) <= 1e-9
    assert pair.vec_residual <= 1e-8


def test_find_eigenvalues_matches_charpoly_oracle():
    rng = np.random.default_rng(4)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        raw = rng.integers(-3, 4, (n, n))
        a = (raw + raw.T).astype(float)
        roots = charpoly_roots(a.astype(int).tolist())
        gaps = np.diff(roots)
        if len(gaps) and np.min(np.abs(gaps)) < 1e-3:
            continue  # only simple, separated roots are in scope
        lo, hi = roots[0] - 1.0, roots[-1] + 1.0
        grid = max(256, int((hi - lo) / max(np.min(np.abs(gaps)) if len(gaps) else 1.0, 1e-3) * 4))
        pairs = find_eigenvalues(DenseMatrix(a), (lo, hi), grid_points=grid)
        got = [p.lam for p in pairs]
        assert len(got) == len(roots)
        for want, have in zip(roots, got):
            assert have == pytest.approx(want, abs=1e-8)


def test_eigenvalue_scaling_invariance():
    rng = np.random.default_rng(5)
    a = rng.uniform(-1, 1, (4, 4))
    a = (a + a.T) / 2
    base = find_eigenvalues(DenseMatrix(a), (-4.0, 4.0), grid_points=1024)
    doubled = find_eigenvalues(DenseMatrix(2.0 * a), (-8.0, 8.0), grid_points=1024)
    assert len(base) == len(doubled)
    for p, q in zip(base, doubled):
        assert q.lam == pytest.approx(2.0 * p.lam, abs=1e-8)


def test_eigenvector_for_shared_eigenvalue():
    a = DenseMatrix([[2.0, 1.0], [1.0, 2.0]])
    v = eigenvector_for(a, 3.0, 2).values()
    assert v.tolist() == pytest.approx([1.0, 1.0], abs=1e-10)
    w = eigenvector_for(a, 1.0, 2).values()
    assert abs(w[0] + w[1]) <= 1e-10


def test_eigenvector_diagonal_basis_vector():
    spec = diagonal_spec(lambda i: 1.0 / i)
    v = eigenvector_for(spec, 1.0 / 3.0, 6).values()
    want = np.zeros(6)
    want[2] = 1.0
    assert np.max(np.abs(v - want)) <= 1e-12


def test_eigenvector_identity_first_free_convention():
    v = eigenvector_for(identity_spec(), 1.0, 4).values()
    assert v.tolist() == [1.0, 0.0, 0.0, 0.0]


def test_eigenvector_rejects_non_eigenvalue():
    with pytest.raises(SingularSystemError):
        eigenvector_for(DenseMatrix([[2.0, 0.0], [0.0, 3.0]]), 1.0, 2)


def test_eigenpair_residual_invariant():
    rng = np.random.default_rng(6)
    for _ in range(10):
        a = rng.uniform(-1, 1, (5, 5))
        a = (a + a.T) / 2
        pairs = find_eigenvalues(DenseMatrix(a), (-4.0, 4.0), grid_points=1024)
        for p in pairs:
            assert p.vec_residual <= 1e-6 * (1.0 + abs(p.lam))
            assert np.max(np.abs(p.vector.values())) == pytest.approx(1.0)
