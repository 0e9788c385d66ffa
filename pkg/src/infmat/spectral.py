"""Eigenvalue search on truncations via the characteristic determinant.

The characteristic value det(A - lambda*I) is only ever evaluated on
finite sections; a root found by grid scan plus bisection at the largest
scheduled size is accepted when it reappears (within 1e-6) at the
previous size.  Roots of truncations approximate spectrum points of the
infinite matrix but no claim beyond stabilization is made.  Double roots
produce no sign change and are missed by design.
"""

from dataclasses import dataclass

import numpy as np

from ._dense import norm_inf, null_vector
from .algebra import Vector, shift_diagonal
from .determinant import det_truncation
from .errors import ExtentMismatchError, SingularSystemError
from .matrix_core import (DenseMatrix, MatrixSpec, TruncationSchedule,
                          clip_extent, is_finite_extent, truncate)
from .series import ConvergencePolicy

BISECT_WIDTH = 1e-10
ROOT_STABILITY_TOL = 1e-6
NULL_PIVOT_SCALE = 1e-8


@dataclass(frozen=True)
class EigenPair:
    """An eigenvalue estimate with its extracted eigenvector section.

    The vector is normalized so its largest-magnitude entry equals 1.
    ``stable`` records whether the root persisted across the last two
    truncation sizes.
    """

    lam: float
    vector: Vector
    char_residual: float
    vec_residual: float
    stable: bool = True


def char_value(A: MatrixSpec | DenseMatrix, lam: float, n: int,
               route: str = "auto",
               policy: ConvergencePolicy | None = None) -> float:
    """det of the n-by-n truncation of A - lam*I by the chosen route."""
    policy = policy or ConvergencePolicy()
    spec = A.as_spec() if isinstance(A, DenseMatrix) else A
    if not spec.is_square:
        raise ExtentMismatchError(f"square matrix required, got {spec.rows}x{spec.cols}")
    shifted = shift_diagonal(spec, -lam)
    return det_truncation(shifted, n, policy, route=route)


def eigenvector_for(A: MatrixSpec | DenseMatrix, lam: float, n: int) -> Vector:
    """Nonzero null vector of the n-truncation of A - lam*I.

    Elimination pivots below ``1e-8 * (1 + norm)`` mark a free column;
    the first free column is set to 1 and later free columns to 0.
    Raises :class:`SingularSystemError` when the truncation is
    numerically full rank, i.e. ``lam`` is not an eigenvalue at this size.
    """
    spec = A.as_spec() if isinstance(A, DenseMatrix) else A
    shifted = shift_diagonal(spec, -lam)
    n = clip_extent(spec.rows, n)
    t = truncate(shifted, n, n).data
    v = null_vector(t, NULL_PIVOT_SCALE * (1.0 + norm_inf(t)))
    if v is None:
        raise SingularSystemError(
            f"no null direction at size {n}: {lam} may not be an eigenvalue here")
    top = int(np.argmax(np.abs(v)))
    v = v / v[top]
    return Vector.from_values(v)


def _bisect(f, lo, hi, flo, fhi):
    while hi - lo > BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (flo < 0) != (fmid < 0):
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def find_eigenvalues(A: MatrixSpec | DenseMatrix, interval: tuple[float, float],
                     schedule: TruncationSchedule | None = None,
                     policy: ConvergencePolicy | None = None,
                     max_roots: int = 32,
                     grid_points: int = 256) -> list[EigenPair]:
    """Bracket and bisect sign changes of the characteristic value.

    Scans ``grid_points`` evenly spaced arguments at the largest
    scheduled truncation size, bisects each bracket to width 1e-10, and
    re-checks each root at the previous size; roots moving more than
    1e-6 between the two sizes are flagged unstable.  An interval with
    no sign change yields an empty list, not an error.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    policy = policy or ConvergencePolicy()
    schedule = schedule or TruncationSchedule()
    spec = A.as_spec() if isinstance(A, DenseMatrix) else A

    sizes = schedule.sizes()
    if is_finite_extent(spec.rows):
        cap = int(spec.rows)
        sizes = sorted({min(s, cap) for s in sizes})
    n_final = sizes[-1]
    n_prev = sizes[-2] if len(sizes) >= 2 else n_final

    def f_at(size):
        return lambda x: char_value(spec, x, size, "auto", policy)

    f = f_at(n_final)
    xs = np.linspace(lo, hi, grid_points)
    fx = [f(x) for x in xs]

    pairs: list[EigenPair] = []
    for t in range(len(xs) - 1):
        if len(pairs) >= max_roots:
            break
        a, b = float(xs[t]), float(xs[t + 1])
        fa, fb = fx[t], fx[t + 1]
        if fa == 0.0:
            root = a
        elif (fa < 0) != (fb < 0):
            root = _bisect(f, a, b, fa, fb)
        else:
            continue
        stable = True
        if n_prev != n_final:
            g = f_at(n_prev)
            ga, gb = g(a), g(b)
            if ga == 0.0:
                prev_root = a
            elif (ga < 0) != (gb < 0):
                prev_root = _bisect(g, a, b, ga, gb)
            else:
                prev_root = None
            stable = prev_root is not None and abs(prev_root - root) <= ROOT_STABILITY_TOL
        vec = eigenvector_for(spec, root, n_final)
        shifted = truncate(shift_diagonal(spec, -root), n_final, n_final).data
        vec_res = float(np.max(np.abs(shifted @ vec.values())))
        pairs.append(EigenPair(root, vec, abs(f(root)), vec_res, stable))
    # trailing endpoint that is itself a root
    if len(pairs) < max_roots and fx[-1] == 0.0:
        root = float(xs[-1])
        vec = eigenvector_for(spec, root, n_final)
        shifted = truncate(shift_diagonal(spec, -root), n_final, n_final).data
        vec_res = float(np.max(np.abs(shifted @ vec.values())))
        pairs.append(EigenPair(root, vec, 0.0, vec_res, True))
    pairs.sort(key=lambda p: p.lam)
    return pairs
