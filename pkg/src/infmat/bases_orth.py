"""Transition matrices between bases, transformation matrices of linear
maps, and row orthogonalization through the Gram block.

Orthogonalization forms the block [G0 | A] with G0 the Gram matrix of
pairwise row inner products, then eliminates using only "add a multiple
of an earlier row to a later row".  Swaps or scalings would break the
orthogonality of the transformed right block, so they are deliberately
unavailable; a zero pivot therefore means dependent rows.  For matrices
with infinitely many columns the Gram entries are convergence-checked
series and the transformed rows stay lazy (coefficient combinations over
the original rows).
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._dense import gauss_solve, norm_inf
from .algebra import Vector
from .errors import (DependentRowsError, ExtentMismatchError,
                     GramConvergenceError)
from .matrix_core import (DenseMatrix, Extent, MatrixSpec, TruncationSchedule,
                          is_finite_extent, truncate)
from .series import (ConvergencePolicy, ConvergenceReport, GeometricTail,
                     stabilize_vector, sum_series)

PIVOT_SCALE = 1e-10


@dataclass(frozen=True)
class BasisFamily:
    """Countably many vectors in a fixed ambient coordinate system.

    ``vector_at(i)`` returns the i-th vector (1-based).  Linear
    independence is the caller's promise; violations surface as pivot
    failures when coordinates are solved for.
    """

    count: Extent
    vector_at: Callable[[int], Vector]


class OrthogonalRows:
    """Lazy transformed rows: explicit combinations of the source rows."""

    def __init__(self, coefficients: np.ndarray, source: MatrixSpec):
        self.coefficients = np.array(coefficients, dtype=float)
        self.source = source

    @property
    def count(self) -> int:
        return self.coefficients.shape[0]

    def entry(self, p: int, j: int) -> float:
        row = self.coefficients[p - 1]
        return float(sum(row[q] * self.source.entry(q + 1, j)
                         for q in range(len(row)) if row[q] != 0.0))

    def section(self, cols: int) -> DenseMatrix:
        base = truncate(self.source, self.count, cols).data
        return DenseMatrix(self.coefficients @ base)


@dataclass(frozen=True)
class OrthReport:
    """Outcome of the Gram-block orthogonalization.

    ``G`` is the transformed Gram block (upper triangular with positive
    diagonal on success), ``gram`` the untransformed inner products, and
    ``A_prime`` the transformed rows (dense when columns are finite).
    """

    G: DenseMatrix
    A_prime: DenseMatrix | OrthogonalRows
    max_offdiag_dot: float
    gram: DenseMatrix


@dataclass(frozen=True)
class TransitionResult:
    """A coordinate matrix plus per-column stabilization statuses."""

    matrix: DenseMatrix
    column_status: dict[int, str]
    column_reports: dict[int, ConvergenceReport]


def _gram_series(A: MatrixSpec, p: int, q: int,
                 policy: ConvergencePolicy) -> ConvergenceReport:
    ea = A.entry

    def term(j, _p=p, _q=q):
        return ea(_p, j) * ea(_q, j)

    tail = None
    if A.decay is not None:
        C, r = A.decay.C, A.decay.r
        tail = GeometricTail(C * C * r ** (p + q), r * r)
    return sum_series(term, policy, tail=tail)


def _row_inner(A: MatrixSpec, p: int, q: int, policy) -> float:
    """Inner product of rows p and q, exact when the support is finite."""
    sup_p, sup_q = A.row_support(p), A.row_support(q)
    if sup_p is not None or sup_q is not None:
        lo, hi = 1, None
        for s in (sup_p, sup_q):
            if s is not None:
                hi = s[1] if hi is None else min(hi, s[1])
        total = 0.0
        for j in range(lo, (hi or 0) + 1):
            total += A.entry(p, j) * A.entry(q, j)
        return total
    rep = _gram_series(A, p, q, policy)
    if not rep.converged:
        raise GramConvergenceError(
            f"inner product of rows {p} and {q} {rep.status} "
            f"after {rep.terms_used} terms", pair=(p, q), status=rep.status)
    return rep.estimate


def orthogonalize(A: MatrixSpec | DenseMatrix,
                  policy: ConvergencePolicy | None = None) -> OrthReport:
    """Bring [Gram | A] to [G | A'] by lower eliminations only.

    Requires finitely many rows, declared linearly independent.  The
    returned rows are orthogonal but not normalized.  The largest
    pairwise inner product among transformed rows is re-measured
    independently (exact dots for finite columns, checked series
    otherwise) and reported as ``max_offdiag_dot``.
    """
    policy = policy or ConvergencePolicy()
    spec = A.as_spec() if isinstance(A, DenseMatrix) else A
    if not is_finite_extent(spec.rows):
        raise ExtentMismatchError("row count must be finite")
    m = int(spec.rows)

    gram = np.empty((m, m))
    for p in range(1, m + 1):
        for q in range(p, m + 1):
            gram[p - 1, q - 1] = gram[q - 1, p - 1] = _row_inner(spec, p, q, policy)
    gram_dm = DenseMatrix(gram)

    g = np.array(gram)
    coeff = np.eye(m)
    pivot_floor = PIVOT_SCALE * max(1.0, norm_inf(gram))
    for k in range(m):
        if abs(g[k, k]) <= pivot_floor:
            raise DependentRowsError(
                f"zero pivot at row {k + 1}: rows are not independent", row=k + 1)
        for l in range(k + 1, m):
            factor = g[l, k] / g[k, k]
            if factor != 0.0:
                g[l, :] -= factor * g[k, :]
                coeff[l, :] -= factor * coeff[k, :]
            g[l, k] = 0.0

    finite_cols = is_finite_extent(spec.cols)
    if finite_cols:
        rows = coeff @ truncate(spec, m, int(spec.cols)).data
        a_prime: DenseMatrix | OrthogonalRows = DenseMatrix(rows)
        prods = rows @ rows.T
        off = prods - np.diag(np.diag(prods))
        max_off = float(np.max(np.abs(off))) if m > 1 else 0.0
    else:
        a_prime = OrthogonalRows(coeff, spec)
        max_off = 0.0
        if spec.decay is not None:
            C, r = spec.decay.C, spec.decay.r
            amp = np.array([C * sum(abs(coeff[p, q]) * r ** (q + 1)
                                    for q in range(m)) for p in range(m)])
        else:
            amp = None
        for p in range(m):
            for q in range(p + 1, m):
                def term(j, _p=p, _q=q):
                    col = [spec.entry(t + 1, j) for t in range(m)]
                    w = coeff @ np.array(col)
                    return float(w[_p] * w[_q])

                tail = None
                if amp is not None:
                    # |A'_p(j)| <= amp_p * r^j, so the term is <= amp_p amp_q (r^2)^j
                    tail = GeometricTail(float(amp[p] * amp[q]), r * r)
                rep = sum_series(term, policy, tail=tail)
                if not rep.converged:
                    raise GramConvergenceError(
                        f"orthogonality check for rows {p + 1}, {q + 1} "
                        f"{rep.status}", pair=(p + 1, q + 1), status=rep.status)
                max_off = max(max_off, abs(rep.estimate))
    return OrthReport(DenseMatrix(g), a_prime, max_off, gram_dm)


def transition_matrix(B: BasisFamily, B_prime: BasisFamily, count: int,
                      schedule: TruncationSchedule | None = None,
                      policy: ConvergencePolicy | None = None) -> TransitionResult:
    """Coordinates of each new-basis vector in the old basis.

    Column i of the result holds the coordinates of ``B_prime[i]`` with
    respect to ``B`` (entry (j, i) is the j-th coordinate), obtained by
    solving the column system on truncations; for infinite ambient
    coordinates each column is stabilized over the schedule and flagged
    if it fails to settle.
    """
    policy = policy or ConvergencePolicy()
    schedule = schedule or TruncationSchedule()
    if count < 1:
        raise ValueError("count must be >= 1")

    finite = True
    probe = B.vector_at(1)
    if not is_finite_extent(probe.extent):
        finite = False

    def solve_at(n, i):
        v_mat = np.empty((n, n))
        for col in range(1, n + 1):
            vec = B.vector_at(col)
            for row in range(1, n + 1):
                v_mat[row - 1, col - 1] = vec.entry(row)
        u = B_prime.vector_at(i)
        rhs = np.array([u.entry(row) for row in range(1, n + 1)])
        return gauss_solve(v_mat, rhs, PIVOT_SCALE * max(1.0, norm_inf(v_mat)))

    out = np.zeros((count, count))
    statuses: dict[int, str] = {}
    reports: dict[int, ConvergenceReport] = {}
    if finite:
        n = int(probe.extent)
        if n < count:
            raise ExtentMismatchError(
                f"ambient dimension {n} below requested count {count}")
        for i in range(1, count + 1):
            alpha = solve_at(n, i)
            out[:, i - 1] = alpha[:count]
            statuses[i] = "converged"
            reports[i] = ConvergenceReport(float(np.max(np.abs(alpha[:count]))),
                                           "converged", 1, 0.0, False)
    else:
        sizes = [s for s in schedule.sizes() if s >= count]
        if not sizes:
            raise ExtentMismatchError(f"schedule cap below count {count}")
        for i in range(1, count + 1):
            alpha, rep = stabilize_vector(
                lambda n, _i=i: solve_at(n, _i)[:count], sizes, policy)
            out[:, i - 1] = alpha
            statuses[i] = rep.status
            reports[i] = rep
    return TransitionResult(DenseMatrix(out), statuses, reports)


def transformation_matrix(L: Callable[[int], Vector], m: int, n: int,
                          target_basis: BasisFamily | None = None,
                          schedule: TruncationSchedule | None = None,
                          policy: ConvergencePolicy | None = None) -> DenseMatrix:
    """Matrix of a linear map: column i holds the coordinates of the image
    of the i-th domain basis vector, rows indexed by the target basis.

    ``L(i)`` must supply those coordinates directly; when ``target_basis``
    is given, ``L(i)`` is instead an ambient vector whose coordinates are
    solved for with the transition machinery.
    """
    if not isinstance(m, (int, np.integer)):
        raise ExtentMismatchError("a finite column count is required to assemble "
                                  "the matrix; request a finite section")
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    if target_basis is not None:
        images = BasisFamily(m, L)
        result = transition_matrix(target_basis, images, max(m, n),
                                   schedule, policy)
        return DenseMatrix(result.matrix.data[:n, :m])
    out = np.empty((n, m))
    for i in range(1, m + 1):
        vec = L(i)
        for j in range(1, n + 1):
            out[j - 1, i - 1] = vec.entry(j)
    return DenseMatrix(out)
