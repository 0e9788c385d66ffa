"""Finite dense matrices and infinite matrices as element oracles.

An infinite matrix is a pure function ``entry(i, j)`` on 1-based indices
together with structural metadata (band, diagonal, finite support box)
and an optional geometric decay certificate.  Every infinite computation
in the package factors through :func:`truncate`, which materializes the
top-left section as a :class:`DenseMatrix`.

Extents are either a positive ``int`` or the distinguished token
:data:`INFINITE`; operations must branch explicitly on finiteness, no
sentinel numbers are used.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CertificateError, ExtentMismatchError, OracleValueError

# structure classes
DENSE = "dense-finite"
EXPR = "expr"
BANDED = "banded"
DIAGONAL = "diagonal"
FINITE_SUPPORT = "finite-support"

_STRUCTURES = (DENSE, EXPR, BANDED, DIAGONAL, FINITE_SUPPORT)


class _Infinite:
    """Singleton token for a countably infinite extent."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"


INFINITE = _Infinite()

Extent = int | _Infinite


def is_finite_extent(extent: Extent) -> bool:
    return not isinstance(extent, _Infinite)


def check_extent(extent: Extent, name: str = "extent") -> Extent:
    if isinstance(extent, _Infinite):
        return extent
    if isinstance(extent, (int, np.integer)) and extent >= 1:
        return int(extent)
    raise ValueError(f"{name} must be a positive integer or INFINITE, got {extent!r}")


def extents_equal(a: Extent, b: Extent) -> bool:
    if isinstance(a, _Infinite) or isinstance(b, _Infinite):
        return isinstance(a, _Infinite) and isinstance(b, _Infinite)
    return a == b


def clip_extent(extent: Extent, n: int) -> int:
    """Largest usable size not exceeding ``n`` for this extent."""
    return n if isinstance(extent, _Infinite) else min(int(extent), n)


@dataclass(frozen=True)
class DecayCertificate:
    """Declared bound ``|entry(i, j)| <= C * r**(i + j)``, geometric kind."""

    C: float
    r: float
    kind: str = "geometric"

    def __post_init__(self):
        if self.kind != "geometric":
            raise CertificateError(f"unsupported certificate kind {self.kind!r}")
        if not (self.C > 0):
            raise CertificateError("C must be positive")
        if not (0 < self.r < 1):
            raise CertificateError("r must lie in (0, 1)")

    def bound(self, i: int, j: int) -> float:
        return self.C * self.r ** (i + j)


@dataclass(frozen=True)
class MatrixSpec:
    """A matrix of finite or infinite extent defined by an element oracle.

    ``entry`` must be pure and total on the declared index range (1-based).
    ``bandwidth`` is required for ``BANDED`` structure, ``support`` (a
    ``(rows, cols)`` box) for ``FINITE_SUPPORT``.  Structure declarations
    are promises: out-of-structure entries must be exactly zero.
    """

    rows: Extent
    cols: Extent
    entry: Callable[[int, int], float]
    structure: str = EXPR
    decay: DecayCertificate | None = None
    bandwidth: int | None = None
    support: tuple[int, int] | None = None

    def __post_init__(self):
        check_extent(self.rows, "rows")
        check_extent(self.cols, "cols")
        if self.structure not in _STRUCTURES:
            raise ValueError(f"unknown structure {self.structure!r}")
        if self.structure == BANDED and (self.bandwidth is None or self.bandwidth < 0):
            raise ValueError("banded structure requires a non-negative bandwidth")
        if self.structure == FINITE_SUPPORT and self.support is None:
            raise ValueError("finite-support structure requires a support box")
        if self.structure == DENSE and not (is_finite_extent(self.rows) and is_finite_extent(self.cols)):
            raise ValueError("dense-finite structure requires finite extents")

    @property
    def is_square(self) -> bool:
        return extents_equal(self.rows, self.cols)

    def at(self, i: int, j: int) -> float:
        if i < 1 or j < 1:
            raise IndexError("indices are 1-based")
        if is_finite_extent(self.rows) and i > self.rows:
            raise IndexError(f"row {i} beyond extent {self.rows}")
        if is_finite_extent(self.cols) and j > self.cols:
            raise IndexError(f"col {j} beyond extent {self.cols}")
        return self.entry(i, j)

    def row_support(self, i: int) -> tuple[int, int] | None:
        """Inclusive column range outside which row ``i`` is zero.

        ``None`` means unbounded; an empty range is returned as (1, 0).
        """
        if self.structure == DIAGONAL:
            return (i, clip_extent(self.cols, i))
        if self.structure == BANDED:
            lo = max(1, i - self.bandwidth)
            hi = i + self.bandwidth
            if is_finite_extent(self.cols):
                hi = min(hi, self.cols)
            return (lo, hi)
        if self.structure == FINITE_SUPPORT:
            box_rows, box_cols = self.support
            if i > box_rows:
                return (1, 0)
            return (1, clip_extent(self.cols, box_cols))
        if is_finite_extent(self.cols):
            return (1, self.cols)
        return None

    def col_support(self, j: int) -> tuple[int, int] | None:
        """Inclusive row range outside which column ``j`` is zero."""
        if self.structure == DIAGONAL:
            return (j, clip_extent(self.rows, j))
        if self.structure == BANDED:
            lo = max(1, j - self.bandwidth)
            hi = j + self.bandwidth
            if is_finite_extent(self.rows):
                hi = min(hi, self.rows)
            return (lo, hi)
        if self.structure == FINITE_SUPPORT:
            box_rows, box_cols = self.support
            if j > box_cols:
                return (1, 0)
            return (1, clip_extent(self.rows, box_rows))
        if is_finite_extent(self.rows):
            return (1, self.rows)
        return None


class DenseMatrix:
    """Finite m-by-n array of scalars, 1-based in all interfaces.

    All entries must be finite; the backing array is frozen.
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.array(data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("DenseMatrix requires a non-empty 2-d array")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise OracleValueError(
                f"non-finite entry at ({bad[0] + 1}, {bad[1] + 1})",
                index=(int(bad[0]) + 1, int(bad[1]) + 1))
        arr.setflags(write=False)
        self._data = arr

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def m(self) -> int:
        return self._data.shape[0]

    @property
    def n(self) -> int:
        return self._data.shape[1]

    def at(self, i: int, j: int) -> float:
        if not (1 <= i <= self.m and 1 <= j <= self.n):
            raise IndexError(f"({i}, {j}) outside {self.m}x{self.n}")
        return float(self._data[i - 1, j - 1])

    def tolist(self) -> list[list[float]]:
        return self._data.tolist()

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix(self._data.T)

    def as_spec(self) -> MatrixSpec:
        data = self._data

        def entry(i, j, _data=data):
            return float(_data[i - 1, j - 1])

        return MatrixSpec(self.m, self.n, entry, structure=DENSE)

    def __repr__(self):
        return f"DenseMatrix({self.m}x{self.n})"


@dataclass(frozen=True)
class TruncationSchedule:
    """Geometric sequence of section sizes: start, start*growth, ... capped."""

    start: int = 8
    growth: int = 2
    max_size: int = 1024

    def __post_init__(self):
        if self.start < 1:
            raise ValueError("start must be >= 1")
        if self.growth < 2:
            raise ValueError("growth must be >= 2")
        if self.max_size < 1:
            raise ValueError("max_size must be >= 1")

    def sizes(self) -> list[int]:
        out = []
        n = self.start
        while True:
            out.append(min(n, self.max_size))
            if n >= self.max_size:
                return out
            n *= self.growth


def _checked(value, i, j) -> float:
    v = float(value)
    if not math.isfinite(v):
        raise OracleValueError(f"oracle returned non-finite value at ({i}, {j})",
                               index=(i, j), value=value)
    return v


def truncate(M: MatrixSpec | DenseMatrix, m: int, n: int) -> DenseMatrix:
    """Materialize the top-left m-by-n section of ``M``.

    For structured specs only the declared nonzero pattern is evaluated.
    Raises :class:`OracleValueError`, naming the index, if the oracle
    produces a non-finite value.
    """
    if isinstance(M, DenseMatrix):
        if m > M.m or n > M.n:
            raise ExtentMismatchError(f"requested {m}x{n} from {M.m}x{M.n} matrix")
        return DenseMatrix(M.data[:m, :n])
    if m < 1 or n < 1:
        raise ValueError("section sizes must be >= 1")
    if is_finite_extent(M.rows) and m > M.rows:
        raise ExtentMismatchError(f"requested {m} rows from extent {M.rows}")
    if is_finite_extent(M.cols) and n > M.cols:
        raise ExtentMismatchError(f"requested {n} cols from extent {M.cols}")
    out = np.zeros((m, n))
    entry = M.entry
    if M.structure in (BANDED, DIAGONAL, FINITE_SUPPORT):
        for i in range(1, m + 1):
            lo, hi = M.row_support(i)
            for j in range(lo, min(hi, n) + 1):
                out[i - 1, j - 1] = _checked(entry(i, j), i, j)
    else:
        for i in range(1, m + 1):
            for j in range(1, n + 1):
                out[i - 1, j - 1] = _checked(entry(i, j), i, j)
    return DenseMatrix(out)


def transpose(M: MatrixSpec) -> MatrixSpec:
    """Swap row/column roles; structure metadata transposes with it."""
    if isinstance(M, DenseMatrix):
        return M.transpose().as_spec()
    entry = M.entry

    def flipped(i, j, _entry=entry):
        return _entry(j, i)

    support = None
    if M.support is not None:
        support = (M.support[1], M.support[0])
    return MatrixSpec(M.cols, M.rows, flipped, structure=M.structure,
                      decay=M.decay, bandwidth=M.bandwidth, support=support)


# ---------------------------------------------------------------------------
# constructors

def identity_spec(extent: Extent = INFINITE) -> MatrixSpec:
    check_extent(extent)

    def entry(i, j):
        return 1.0 if i == j else 0.0

    return MatrixSpec(extent, extent, entry, structure=BANDED, bandwidth=0)


def zero_spec(rows: Extent = INFINITE, cols: Extent = INFINITE) -> MatrixSpec:
    def entry(i, j):
        return 0.0

    return MatrixSpec(rows, cols, entry, structure=BANDED, bandwidth=0)


def diagonal_spec(diag: Callable[[int], float], extent: Extent = INFINITE) -> MatrixSpec:
    def entry(i, j, _diag=diag):
        return float(_diag(i)) if i == j else 0.0

    return MatrixSpec(extent, extent, entry, structure=DIAGONAL)


def banded_spec(bands: dict[int, Callable[[int, int], float]],
                rows: Extent = INFINITE, cols: Extent = INFINITE) -> MatrixSpec:
    """Matrix whose entry at offset ``j - i`` comes from ``bands[offset]``."""
    if not bands:
        return zero_spec(rows, cols)
    bands = dict(bands)
    bandwidth = max(abs(off) for off in bands)

    def entry(i, j, _bands=bands):
        fn = _bands.get(j - i)
        return float(fn(i, j)) if fn is not None else 0.0

    return MatrixSpec(rows, cols, entry, structure=BANDED, bandwidth=bandwidth)


def finite_support_spec(fn: Callable[[int, int], float], box_rows: int, box_cols: int,
                        rows: Extent = INFINITE, cols: Extent = INFINITE) -> MatrixSpec:
    def entry(i, j, _fn=fn, _r=box_rows, _c=box_cols):
        return float(_fn(i, j)) if (i <= _r and j <= _c) else 0.0

    return MatrixSpec(rows, cols, entry, structure=FINITE_SUPPORT,
                      support=(box_rows, box_cols))


def entrywise_spec(fn: Callable[[int, int], float],
                   rows: Extent = INFINITE, cols: Extent = INFINITE,
                   decay: DecayCertificate | None = None) -> MatrixSpec:
    def entry(i, j, _fn=fn):
        return float(_fn(i, j))

    return MatrixSpec(rows, cols, entry, structure=EXPR, decay=decay)


def from_dense(dm: DenseMatrix) -> MatrixSpec:
    return dm.as_spec()


def spot_check_decay(M: MatrixSpec, samples: int = 200, rng=None,
                     slack: float = 1e-15, max_index: int = 50) -> None:
    """Sample entries and verify the declared decay bound.

    Raises :class:`CertificateError` on the first violated sample.
    """
    if M.decay is None:
        raise CertificateError("spec carries no decay certificate")
    rng = rng if rng is not None else np.random.default_rng(0)
    hi_r = clip_extent(M.rows, max_index)
    hi_c = clip_extent(M.cols, max_index)
    for _ in range(samples):
        i = int(rng.integers(1, hi_r + 1))
        j = int(rng.integers(1, hi_c + 1))
        v = M.entry(i, j)
        if abs(v) > M.decay.bound(i, j) + slack:
            raise CertificateError(
                f"entry ({i}, {j}) = {v} violates bound {M.decay.bound(i, j)}")
