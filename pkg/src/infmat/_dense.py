"""Dense numpy kernels: elimination, determinants, solves, products.

Elimination is hand-rolled (vectorized row updates) rather than deferred
to LAPACK so pivot thresholds stay explicit and sign tracking across row
swaps is visible to tests.
"""

import numpy as np

from .errors import SingularSystemError


def norm_inf(a: np.ndarray) -> float:
    """Induced max-absolute-row-sum norm; 0 for an empty array."""
    if a.size == 0:
        return 0.0
    if a.ndim == 1:
        return float(np.max(np.abs(a)))
    return float(np.max(np.sum(np.abs(a), axis=1)))


def lu_det(a: np.ndarray) -> float:
    """Determinant via partially pivoted elimination, sign tracked on swaps."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    sign = 1.0
    det = 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0.0:
            return 0.0
        if p != k:
            a[[k, p]] = a[[p, k]]
            sign = -sign
        det *= a[k, k]
        if k + 1 < n:
            f = a[k + 1:, k] / a[k, k]
            a[k + 1:, k + 1:] -= np.outer(f, a[k, k + 1:])
    return sign * det


def echelon(a: np.ndarray, pivot_tol: float) -> tuple[np.ndarray, list[int]]:
    """Row echelon form with partial pivoting.

    Returns the reduced array and the list of pivot column indices
    (0-based).  Columns whose best remaining pivot is <= ``pivot_tol``
    in magnitude are skipped.
    """
    u = np.array(a, dtype=float)
    rows, cols = u.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(u[r:, c])))
        if abs(u[p, c]) <= pivot_tol:
            continue
        if p != r:
            u[[r, p]] = u[[p, r]]
        if r + 1 < rows:
            f = u[r + 1:, c] / u[r, c]
            u[r + 1:, :] -= np.outer(f, u[r, :])
            u[r + 1:, c] = 0.0
        pivots.append(c)
        r += 1
    return u, pivots


def rank_of_array(a: np.ndarray, pivot_tol: float) -> int:
    return len(echelon(a, pivot_tol)[1])


def null_vector(a: np.ndarray, pivot_tol: float) -> np.ndarray | None:
    """One null-space vector, or None if the array is full column rank.

    Convention: the first pivot-free column gets value 1, all later free
    columns 0; pivot variables come from back-substitution.
    """
    u, pivots = echelon(a, pivot_tol)
    cols = u.shape[1]
    pivot_set = set(pivots)
    free = next((c for c in range(cols) if c not in pivot_set), None)
    if free is None:
        return None
    v = np.zeros(cols)
    v[free] = 1.0
    for row in range(len(pivots) - 1, -1, -1):
        pc = pivots[row]
        s = float(u[row, pc + 1:] @ v[pc + 1:])
        v[pc] = -s / u[row, pc]
    return v


def gauss_solve(a: np.ndarray, b: np.ndarray, pivot_tol: float = 0.0) -> np.ndarray:
    """Solve a square system by elimination with partial pivoting."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape[0] != n:
        raise ValueError("square system required")
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= pivot_tol:
            raise SingularSystemError(f"pivot {abs(a[p, k])} at column {k + 1}")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        if k + 1 < n:
            f = a[k + 1:, k] / a[k, k]
            a[k + 1:, k + 1:] -= np.outer(f, a[k, k + 1:])
            b[k + 1:] -= f * b[k]
            a[k + 1:, k] = 0.0
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - float(a[k, k + 1:] @ x[k + 1:])) / a[k, k]
    return x


def product_ascending(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product accumulated strictly in ascending inner index order.

    Matches a naive triple loop bit for bit, which keeps lazy-entry and
    dense code paths byte-deterministic with each other.
    """
    m, inner = a.shape
    inner2, n = b.shape
    if inner != inner2:
        raise ValueError("inner dimensions differ")
    out = np.zeros((m, n))
    for l in range(inner):
        out += np.outer(a[:, l], b[l, :])
    return out
