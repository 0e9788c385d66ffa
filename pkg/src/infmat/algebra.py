"""Sums, scalar multiples, products and traces of oracle-backed matrices.

Products with an infinite inner dimension are the delicate part: each
requested entry is the sum of a series, evaluated in ascending index
order and convergence-checked.  When both operands declare bounded
structure (bands, finite support, a diagonal) the inner index set is
finite and entries are computed exactly instead.  A product over an
infinite inner dimension is returned lazily with a sampled certification
pass over a fixed index probe; whatever the probe finds, entries keep
their individual reports available on demand.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._dense import product_ascending
from .errors import ExtentMismatchError
from .matrix_core import (BANDED, DENSE, DIAGONAL, EXPR, FINITE_SUPPORT, DenseMatrix,
                          DecayCertificate, Extent, MatrixSpec, clip_extent,
                          extents_equal, is_finite_extent, truncate)
from .series import (CONVERGED, DIVERGED, ConvergencePolicy, ConvergenceReport,
                     GeometricTail, exact_report, sum_series)

PROBE_SIDE = 8

STATUS_CONVERGED = "converged"
STATUS_PARTIAL = "partial"
STATUS_FAILED = "failed"


@dataclass(frozen=True)
class Vector:
    """A finite or infinite vector as a pure index oracle (1-based)."""

    extent: Extent
    entry: Callable[[int], float]

    @classmethod
    def from_values(cls, values) -> "Vector":
        arr = np.array(values, dtype=float).ravel()
        if arr.size < 1:
            raise ValueError("empty vector")

        def entry(i, _arr=arr):
            return float(_arr[i - 1])

        return cls(int(arr.size), entry)

    def at(self, i: int) -> float:
        if i < 1:
            raise IndexError("indices are 1-based")
        if is_finite_extent(self.extent) and i > self.extent:
            raise IndexError(f"index {i} beyond extent {self.extent}")
        return float(self.entry(i))

    def values(self, count: int | None = None) -> np.ndarray:
        if count is None:
            if not is_finite_extent(self.extent):
                raise ValueError("count required for an infinite vector")
            count = self.extent
        return np.array([self.at(i) for i in range(1, count + 1)])

    def support(self) -> tuple[int, int] | None:
        return (1, self.extent) if is_finite_extent(self.extent) else None


@dataclass(frozen=True)
class ProductResult:
    """A product plus the evidence that its entries exist.

    ``per_entry_reports`` holds the probe sample for infinite inner
    dimensions; ``entry_report`` recomputes the report for any index.
    """

    matrix: MatrixSpec | DenseMatrix
    per_entry_reports: dict[tuple[int, int], ConvergenceReport]
    overall_status: str
    _reporter: Callable[[int, int], ConvergenceReport] | None = field(
        default=None, repr=False, compare=False)

    def entry_report(self, i: int, j: int) -> ConvergenceReport:
        if self._reporter is None:
            return exact_report(_entry_of(self.matrix, i, j), 1)
        return self._reporter(i, j)


def _entry_of(M, i, j) -> float:
    return M.at(i, j) if isinstance(M, DenseMatrix) else float(M.entry(i, j))


def _as_spec(M) -> MatrixSpec:
    return M.as_spec() if isinstance(M, DenseMatrix) else M


def add(A: MatrixSpec, B: MatrixSpec) -> MatrixSpec:
    """Entrywise sum; structures join, certificates combine when possible."""
    A, B = _as_spec(A), _as_spec(B)
    if not (extents_equal(A.rows, B.rows) and extents_equal(A.cols, B.cols)):
        raise ExtentMismatchError(
            f"cannot add {A.rows}x{A.cols} and {B.rows}x{B.cols}")
    ea, eb = A.entry, B.entry

    def entry(i, j, _ea=ea, _eb=eb):
        return _ea(i, j) + _eb(i, j)

    structure, bandwidth, support = _join_structure(A, B)
    decay = None
    if A.decay is not None and B.decay is not None:
        decay = DecayCertificate(A.decay.C + B.decay.C, max(A.decay.r, B.decay.r))
    return MatrixSpec(A.rows, A.cols, entry, structure=structure, decay=decay,
                      bandwidth=bandwidth, support=support)


def _join_structure(A, B):
    banded_like = {BANDED: lambda s: s.bandwidth, DIAGONAL: lambda s: 0}
    if A.structure == DIAGONAL and B.structure == DIAGONAL:
        return DIAGONAL, None, None
    if A.structure in banded_like and B.structure in banded_like:
        bw = max(banded_like[A.structure](A), banded_like[B.structure](B))
        return BANDED, bw, None
    if A.structure == FINITE_SUPPORT and B.structure == FINITE_SUPPORT:
        box = (max(A.support[0], B.support[0]), max(A.support[1], B.support[1]))
        return FINITE_SUPPORT, None, box
    if A.structure == B.structure == DENSE:
        return DENSE, None, None
    return EXPR, None, None


def scale(c: float, A: MatrixSpec) -> MatrixSpec:
    """Scalar multiple; the decay certificate rescales with ``|c|``."""
    A = _as_spec(A)
    c = float(c)
    ea = A.entry

    def entry(i, j, _ea=ea, _c=c):
        return _c * _ea(i, j)

    decay = None
    if A.decay is not None and c != 0.0:
        decay = DecayCertificate(abs(c) * A.decay.C, A.decay.r)
    return MatrixSpec(A.rows, A.cols, entry, structure=A.structure, decay=decay,
                      bandwidth=A.bandwidth, support=A.support)


def shift_diagonal(A: MatrixSpec, c: float) -> MatrixSpec:
    """``A + c * identity``; used for characteristic-value shifts."""
    A = _as_spec(A)
    ea = A.entry

    def entry(i, j, _ea=ea, _c=float(c)):
        v = _ea(i, j)
        return v + _c if i == j else v

    if A.structure == DIAGONAL:
        return MatrixSpec(A.rows, A.cols, entry, structure=DIAGONAL)
    if A.structure == BANDED:
        return MatrixSpec(A.rows, A.cols, entry, structure=BANDED,
                          bandwidth=A.bandwidth)
    if A.structure == FINITE_SUPPORT:
        bw = max(A.support) - 1
        return MatrixSpec(A.rows, A.cols, entry, structure=BANDED, bandwidth=bw)
    if A.structure == DENSE:
        return MatrixSpec(A.rows, A.cols, entry, structure=DENSE)
    return MatrixSpec(A.rows, A.cols, entry, structure=EXPR)


def _intersect_supports(sa, sb, inner: Extent) -> tuple[int, int] | None:
    """Finite inner index range implied by structure, or None if unbounded."""
    lo, hi = 1, None
    if is_finite_extent(inner):
        hi = int(inner)
    for s in (sa, sb):
        if s is not None:
            lo = max(lo, s[0])
            hi = s[1] if hi is None else min(hi, s[1])
    if hi is None:
        return None
    return (lo, hi)


def _product_tail(da: DecayCertificate | None, db: DecayCertificate | None,
                  i: int, j: int) -> GeometricTail | None:
    if da is None or db is None:
        return None
    # |A(i,l) B(l,j)| <= Ca Cb ra^i rb^j (ra rb)^l
    return GeometricTail(da.C * db.C * da.r ** i * db.r ** j, da.r * db.r)


def _series_entry(A, B, i, j, policy):
    ea, eb = A.entry, B.entry

    def term(l, _ea=ea, _eb=eb, _i=i, _j=j):
        return _ea(_i, l) * _eb(l, _j)

    return sum_series(term, policy, tail=_product_tail(A.decay, B.decay, i, j))


def _exact_inner(A, B, i, j, lo, hi) -> float:
    s = 0.0
    ea, eb = A.entry, B.entry
    for l in range(lo, hi + 1):
        s += ea(i, l) * eb(l, j)
    return s


def matmul(A: MatrixSpec | DenseMatrix, B: MatrixSpec | DenseMatrix,
           policy: ConvergencePolicy | None = None) -> ProductResult:
    """Product of two oracle matrices.

    Finite inner dimensions give exact ascending-order sums.  Infinite
    inner dimensions give a lazy result whose entries are series sums; a
    fixed probe over the leading indices certifies a sample of entries at
    construction, and any diverging probe entry marks the whole product
    ``failed`` (data remains available for inspection).
    """
    policy = policy or ConvergencePolicy()
    A, B = _as_spec(A), _as_spec(B)
    if not extents_equal(A.cols, B.rows):
        raise ExtentMismatchError(f"inner extents differ: {A.cols} vs {B.rows}")
    inner = A.cols

    if (is_finite_extent(inner) and is_finite_extent(A.rows)
            and is_finite_extent(B.cols)):
        da = truncate(A, A.rows, inner).data
        db = truncate(B, B.rows, B.cols).data
        return ProductResult(DenseMatrix(product_ascending(da, db)), {},
                             STATUS_CONVERGED)

    cache: dict[tuple[int, int], tuple[float, ConvergenceReport]] = {}

    def compute(i, j):
        key = (i, j)
        hit = cache.get(key)
        if hit is not None:
            return hit
        span = _intersect_supports(A.row_support(i), B.col_support(j), inner)
        if span is not None:
            lo, hi = span
            value = _exact_inner(A, B, i, j, lo, hi) if lo <= hi else 0.0
            result = (value, exact_report(value, max(0, hi - lo + 1)))
        else:
            rep = _series_entry(A, B, i, j, policy)
            result = (rep.estimate, rep)
        cache[key] = result
        return result

    def entry(i, j):
        return compute(i, j)[0]

    def reporter(i, j):
        return compute(i, j)[1]

    structure, bandwidth = EXPR, None
    banded_like = {BANDED, DIAGONAL}
    if A.structure in banded_like and B.structure in banded_like:
        if A.structure == DIAGONAL and B.structure == DIAGONAL:
            structure = DIAGONAL
        else:
            structure = BANDED
            bandwidth = ((A.bandwidth or 0) if A.structure == BANDED else 0) + \
                        ((B.bandwidth or 0) if B.structure == BANDED else 0)
    decay = None
    if A.decay is not None and B.decay is not None and not is_finite_extent(inner):
        ra, rb = A.decay.r, B.decay.r
        decay = DecayCertificate(A.decay.C * B.decay.C * ra * rb / (1 - ra * rb),
                                 max(ra, rb))
    out = MatrixSpec(A.rows, B.cols, entry, structure=structure,
                     decay=decay, bandwidth=bandwidth)

    probe_rows = range(1, clip_extent(A.rows, PROBE_SIDE) + 1)
    probe_cols = range(1, clip_extent(B.cols, PROBE_SIDE) + 1)
    reports = {(i, j): reporter(i, j) for i in probe_rows for j in probe_cols}
    statuses = {rep.status for rep in reports.values()}
    if statuses <= {CONVERGED}:
        overall = STATUS_CONVERGED
    elif DIVERGED in statuses:
        overall = STATUS_FAILED
    else:
        overall = STATUS_PARTIAL
    return ProductResult(out, reports, overall, _reporter=reporter)


def matvec(A: MatrixSpec | DenseMatrix, x: Vector,
           policy: ConvergencePolicy | None = None
           ) -> tuple[Vector, dict[int, ConvergenceReport]]:
    """Apply ``A`` to a vector; entries are convergence-checked when the
    column extent is infinite and structure does not bound the sum."""
    policy = policy or ConvergencePolicy()
    A = _as_spec(A)
    if not extents_equal(A.cols, x.extent):
        raise ExtentMismatchError(f"extents differ: {A.cols} vs {x.extent}")

    cache: dict[int, tuple[float, ConvergenceReport]] = {}

    def compute(i):
        hit = cache.get(i)
        if hit is not None:
            return hit
        span = _intersect_supports(A.row_support(i), x.support(), A.cols)
        if span is not None:
            lo, hi = span
            s = 0.0
            for l in range(lo, hi + 1):
                s += A.entry(i, l) * x.entry(l)
            result = (s, exact_report(s, max(0, hi - lo + 1)))
        else:
            def term(l, _i=i):
                return A.entry(_i, l) * x.entry(l)

            # vectors carry no certificates, so the check stays empirical
            rep = sum_series(term, policy)
            result = (rep.estimate, rep)
        cache[i] = result
        return result

    def entry(i):
        return compute(i)[0]

    out = Vector(A.rows, entry)
    reports = {i: compute(i)[1]
               for i in range(1, clip_extent(A.rows, PROBE_SIDE) + 1)}
    return out, reports


def trace_partial(A: MatrixSpec | DenseMatrix,
                  policy: ConvergencePolicy | None = None,
                  schedule=None) -> ConvergenceReport:
    """Diagonal sum: exact for finite matrices, a checked series otherwise.

    ``schedule`` is accepted for interface symmetry with the truncation
    operations and is not consulted; the diagonal series has its own cap.
    """
    policy = policy or ConvergencePolicy()
    A = _as_spec(A)
    if not A.is_square:
        raise ExtentMismatchError(f"trace requires a square matrix, got {A.rows}x{A.cols}")
    if is_finite_extent(A.rows):
        s = 0.0
        for i in range(1, A.rows + 1):
            s += A.entry(i, i)
        return exact_report(s, A.rows)

    def term(k):
        return A.entry(k, k)

    tail = None
    if A.decay is not None:
        # |A(k,k)| <= C r^(2k) = C (r^2)^k
        tail = GeometricTail(A.decay.C, A.decay.r ** 2)
    return sum_series(term, policy, tail=tail)
