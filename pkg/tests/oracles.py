"""Independent brute-force oracles used only by the tests.

Each oracle deliberately takes a different route than the library code it
checks: cofactor expansion against pivoted elimination, exact rational
elimination against floating-point rank, classical Gram-Schmidt against
the Gram-block elimination, and an exact characteristic polynomial
against root bracketing.
"""

from fractions import Fraction

import numpy as np


def cofactor_det(a) -> float:
    """Determinant by recursive cofactor expansion along the first row."""
    a = [list(map(float, row)) for row in a]
    n = len(a)
    if n == 1:
        return a[0][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        sign = 1.0 if j % 2 == 0 else -1.0
        total += sign * a[0][j] * cofactor_det(minor)
    return total


def fraction_rank(rows) -> int:
    """Exact rank over the rationals by fraction-free elimination."""
    mat = [[Fraction(x).limit_denominator(10**9) if not isinstance(x, Fraction)
            else x for x in row] for row in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    rank = 0
    r = 0
    for c in range(ncols):
        pivot = next((k for k in range(r, nrows) if mat[k][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        for k in range(r + 1, nrows):
            if mat[k][c] != 0:
                f = mat[k][c] / mat[r][c]
                mat[k] = [mat[k][t] - f * mat[r][t] for t in range(ncols)]
        r += 1
        rank += 1
        if r == nrows:
            break
    return rank


def gram_schmidt_rows(a: np.ndarray) -> np.ndarray:
    """Classical unnormalized Gram-Schmidt on the rows of ``a``."""
    a = np.array(a, dtype=float)
    out = np.zeros_like(a)
    for p in range(a.shape[0]):
        v = np.array(a[p])
        for q in range(p):
            u = out[q]
            v = v - (a[p] @ u) / (u @ u) * u
        out[p] = v
    return out


def charpoly_coefficients(a) -> list[Fraction]:
    """Exact characteristic polynomial coefficients (leading first) via the
    trace-recursion algorithm over rationals."""
    n = len(a)
    mat = [[Fraction(int(round(x))) if float(x).is_integer() else
            Fraction(x).limit_denominator(10**9) for x in row] for row in a]

    def matmul_frac(x, y):
        return [[sum(x[i][k] * y[k][j] for k in range(n)) for j in range(n)]
                for i in range(n)]

    coeffs = [Fraction(1)]
    m = [[Fraction(0)] * n for _ in range(n)]
    c = Fraction(1)
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I ; c_k = -tr(A M_k) / k
        for i in range(n):
            m[i][i] += c
        m = matmul_frac(mat, m)
        c = -sum(m[i][i] for i in range(n)) / k
        coeffs.append(c)
    return coeffs


def charpoly_roots(a) -> np.ndarray:
    """Real roots of the exact characteristic polynomial, ascending."""
    coeffs = [float(c) for c in charpoly_coefficients(a)]
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) < 1e-9].real
    return np.sort(real)


def triple_loop_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m, inner = a.shape
    n = b.shape[1]
    out = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            s = 0.0
            for l in range(inner):
                s += a[i, l] * b[l, j]
            out[i, j] = s
    return out
