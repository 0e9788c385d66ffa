"""Determinants: an elimination oracle, the traced-logarithm series route,
truncation-limit determinants of infinite matrices, and the minor-sum
expansion of det(AB) over increasing column selections.

The series route writes ``det M = exp(tr(log M))`` with ``log`` expanded
about the identity: ``log M = sum_k (-1)^(k+1) (M - I)^k / k``, valid for
``max-row-sum norm of (M - I) < 1``.  The uncentered variant, which sums
powers of ``M`` itself and fails the ``det(I) = 1`` sanity check, stays
available behind ``center=False`` for comparison.
"""

import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._dense import lu_det, norm_inf
from .algebra import matmul
from .errors import ConvergenceFailureError, ExtentMismatchError, PreconditionError
from .matrix_core import (DenseMatrix, MatrixSpec, TruncationSchedule,
                          is_finite_extent, truncate)
from .series import (ConvergencePolicy, ConvergenceReport, limit_of_sequence,
                     sum_series)

ROUTE_LU = "lu-oracle"
ROUTE_LOG_SERIES = "log-series"
ROUTE_LIMIT = "truncation-limit"


@dataclass(frozen=True)
class DetReport:
    value: float
    route: str
    log_terms_used: int | None = None
    report: ConvergenceReport | None = None


@dataclass(frozen=True)
class ColumnSelection:
    """Strictly increasing 1-based column indices."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = self.indices
        if len(idx) == 0:
            raise ValueError("empty selection")
        if idx[0] < 1 or any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError(f"indices must be strictly increasing and >= 1: {idx}")


def column_minor(M: DenseMatrix, selection: ColumnSelection) -> DenseMatrix:
    cols = [j - 1 for j in selection.indices]
    if cols[-1] >= M.n:
        raise ExtentMismatchError(f"column {cols[-1] + 1} beyond {M.n}")
    return DenseMatrix(M.data[:, cols])


def row_minor(M: DenseMatrix, selection: ColumnSelection) -> DenseMatrix:
    rows = [j - 1 for j in selection.indices]
    if rows[-1] >= M.m:
        raise ExtentMismatchError(f"row {rows[-1] + 1} beyond {M.m}")
    return DenseMatrix(M.data[rows, :])


def det_oracle(M: DenseMatrix) -> float:
    """Exact-as-floating-point determinant by pivoted elimination."""
    if M.m != M.n:
        raise ExtentMismatchError(f"determinant of non-square {M.m}x{M.n}")
    return lu_det(M.data)


def det_log_series(M: DenseMatrix, policy: ConvergencePolicy | None = None,
                   center: bool = True) -> DetReport:
    """Determinant via ``exp`` of the traced logarithm series.

    Requires ``norm_inf(M - I) < 1`` (the measured norm is attached to
    the error when violated).  The power series of the trace is truncated
    by the standard window rule.
    """
    policy = policy or ConvergencePolicy()
    if M.m != M.n:
        raise ExtentMismatchError(f"determinant of non-square {M.m}x{M.n}")
    base = M.data - np.eye(M.m) if center else np.array(M.data, dtype=float)
    norm = norm_inf(base)
    if norm >= 1.0:
        raise PreconditionError(
            f"max-row-sum norm of the series base is {norm:.6g} >= 1",
            measured=norm)

    running = {"k": 0, "mat": np.eye(M.m)}

    def term(k):
        if k <= running["k"]:
            running["k"], running["mat"] = 0, np.eye(M.m)
        while running["k"] < k:
            running["mat"] = running["mat"] @ base
            running["k"] += 1
        sign = 1.0 if k % 2 == 1 else -1.0
        return sign * float(np.trace(running["mat"])) / k

    rep = sum_series(term, policy)
    if not rep.converged:
        raise ConvergenceFailureError(
            f"trace series {rep.status} after {rep.terms_used} terms")
    return DetReport(float(np.exp(rep.estimate)), ROUTE_LOG_SERIES,
                     log_terms_used=rep.terms_used, report=rep)


def det_truncation(M: MatrixSpec, n: int, policy: ConvergencePolicy | None = None,
                   route: str = "auto") -> float:
    """Determinant of the n-by-n truncation by the selected route.

    ``auto`` prefers the log-series whenever its norm precondition holds
    at this size and falls back to elimination otherwise.
    """
    policy = policy or ConvergencePolicy()
    T = truncate(M, n, n)
    if route == ROUTE_LU:
        return det_oracle(T)
    norm = norm_inf(T.data - np.eye(n))
    if route == ROUTE_LOG_SERIES:
        return det_log_series(T, policy).value
    if route != "auto":
        raise ValueError(f"unknown route {route!r}")
    if norm < 1.0:
        return det_log_series(T, policy).value
    return det_oracle(T)


def det_infinite(M: MatrixSpec, schedule: TruncationSchedule | None = None,
                 policy: ConvergencePolicy | None = None) -> DetReport:
    """Stabilized determinant of square truncations along a schedule.

    Non-stabilization is reported, not raised: the returned report has
    status ``undetermined`` and the value is the last estimate.
    """
    policy = policy or ConvergencePolicy()
    schedule = schedule or TruncationSchedule()
    if isinstance(M, DenseMatrix):
        return DetReport(det_oracle(M), ROUTE_LU)
    if not M.is_square:
        raise ExtentMismatchError(f"determinant of non-square {M.rows}x{M.cols}")
    if is_finite_extent(M.rows):
        return DetReport(det_oracle(truncate(M, M.rows, M.cols)), ROUTE_LU)

    rep = limit_of_sequence(lambda n: det_truncation(M, n, policy), schedule, policy)
    return DetReport(rep.estimate, ROUTE_LIMIT, report=rep)


def cauchy_binet(A: DenseMatrix, B: DenseMatrix) -> float:
    """det(AB) as the sum over all increasing m-column selections of
    products of maximal minors of A and B.

    ``A`` is m-by-n, ``B`` is n-by-m with m <= n; for m > n the value is
    0 by rank deficiency (a warning is emitted).
    """
    m, n = A.m, A.n
    if B.m != n or B.n != m:
        raise ExtentMismatchError(
            f"need shapes m x n and n x m, got {A.m}x{A.n} and {B.m}x{B.n}")
    if m > n:
        warnings.warn("more rows than columns: det(AB) = 0 by rank deficiency",
                      stacklevel=2)
        return 0.0
    a, b = A.data, B.data
    total = 0.0
    for sel in combinations(range(n), m):
        cols = list(sel)
        total += lu_det(a[:, cols]) * lu_det(b[cols, :])
    return total


@dataclass(frozen=True)
class CauchyBinetReport:
    """Selection-sum estimate next to the product-determinant value."""

    series: ConvergenceReport
    product_det: float
    gap: float

    @property
    def estimate(self) -> float:
        return self.series.estimate

    @property
    def status(self) -> str:
        return self.series.status


def cauchy_binet_infinite(A: MatrixSpec, B: MatrixSpec,
                          policy: ConvergencePolicy | None = None,
                          cap: int = 64) -> CauchyBinetReport:
    """Minor-sum expansion for an m-by-infinite ``A`` and infinite-by-m ``B``.

    Selections are enumerated in order of increasing maximal column
    index (every selection inside ``{1..t}`` precedes any using ``t+1``),
    which makes the partial sums a well-defined sequence; ``cap`` bounds
    the largest index explored.  The report also carries the determinant
    of the convergence-checked product ``A B`` and the gap between the
    two values.
    """
    policy = policy or ConvergencePolicy()
    if not is_finite_extent(A.rows):
        raise ExtentMismatchError("row count of the left factor must be finite")
    m = int(A.rows)
    if is_finite_extent(A.cols) or is_finite_extent(B.rows):
        raise ExtentMismatchError("inner extents must be infinite here; use cauchy_binet")
    if not (is_finite_extent(B.cols) and int(B.cols) == m):
        raise ExtentMismatchError(f"right factor must have {m} columns")
    if cap < m:
        raise ValueError(f"cap {cap} smaller than selection size {m}")

    a_cols: dict[int, np.ndarray] = {}
    b_rows: dict[int, np.ndarray] = {}

    def acol(j):
        v = a_cols.get(j)
        if v is None:
            v = np.array([A.entry(i, j) for i in range(1, m + 1)])
            a_cols[j] = v
        return v

    def brow(j):
        v = b_rows.get(j)
        if v is None:
            v = np.array([B.entry(j, c) for c in range(1, m + 1)])
            b_rows[j] = v
        return v

    def term(q):
        t = m + q - 1  # largest column index of all selections in this term
        total = 0.0
        if m == 1:
            return float(acol(t)[0] * brow(t)[0])
        for head in combinations(range(1, t), m - 1):
            sel = head + (t,)
            left = np.column_stack([acol(j) for j in sel])
            right = np.vstack([brow(j) for j in sel])
            total += lu_det(left) * lu_det(right)
        return total

    capped = ConvergencePolicy(tol=policy.tol, window=policy.window,
                               max_terms=min(policy.max_terms, cap - m + 1))
    rep = sum_series(term, capped)

    product = matmul(A, B, policy)
    pd = det_oracle(truncate(product.matrix, m, m))
    return CauchyBinetReport(rep, pd, abs(rep.estimate - pd))
