"""Convergence detection for scalar series and truncation sequences.

Every limit process in the package (entry series of infinite products,
determinants over growing truncations, stabilizing solution vectors)
funnels through this module, so all verdicts share one stopping rule:

* converged  -- successive estimates changed by at most ``tol`` (relative
  to ``max(1, |estimate|)``) for ``window`` consecutive steps, or an
  analytic geometric tail bound dropped below that threshold;
* diverged   -- estimates grew monotonically past ``1/tol``, or an oracle
  produced a non-finite value;
* undetermined -- neither rule fired before the term cap / schedule end.

Verdicts are heuristic unless a :class:`GeometricTail` certificate is
supplied, in which case ``certified`` is set and the error of the reported
estimate is bounded by the certificate.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

CONVERGED = "converged"
DIVERGED = "diverged"
UNDETERMINED = "undetermined"

logger = logging.getLogger("infmat")


@dataclass(frozen=True)
class ConvergencePolicy:
    """Tuning knobs for the stopping rule.

    tol: relative tolerance on step-to-step change.
    window: number of consecutive quiet steps required.
    max_terms: hard cap on evaluated terms / sizes.
    """

    tol: float = 1e-10
    window: int = 3
    max_terms: int = 100_000

    def __post_init__(self):
        if not (self.tol > 0):
            raise ValueError("tol must be positive")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.max_terms < self.window + 1:
            raise ValueError("max_terms must be at least window + 1")


@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of a limit process.

    ``estimate`` is the last value computed (partial sum or sequence
    value), whatever the verdict.  ``last_delta`` is the last observed
    step change; on a certified stop it is the analytic tail bound, so
    the invariant ``converged => last_delta <= tol * max(1, |estimate|)``
    holds on both paths.
    """

    estimate: float
    status: str
    terms_used: int
    last_delta: float
    certified: bool = False

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


@dataclass(frozen=True)
class GeometricTail:
    """Analytic bound ``|t_k| <= C * r**k`` on the terms of a series."""

    C: float
    r: float

    def __post_init__(self):
        if not (self.C >= 0):
            raise ValueError("C must be non-negative")
        if not (0 < self.r < 1):
            raise ValueError("r must lie in (0, 1)")

    def remainder(self, terms: int) -> float:
        """Bound on the absolute tail after ``terms`` terms were summed."""
        return self.C * self.r ** (terms + 1) / (1.0 - self.r)


def exact_report(value: float, terms: int) -> ConvergenceReport:
    """Report for a finitely computed (exact) quantity."""
    return ConvergenceReport(value, CONVERGED, terms, 0.0, False)


def _stabilize(values: Iterator[float], policy: ConvergencePolicy,
               remainder: Callable[[int], float] | None = None) -> ConvergenceReport:
    """Run the stopping rule over successive estimates.

    ``values`` yields estimates in order; the first value never counts
    toward the quiet streak (there is no previous value to compare to).
    """
    blowup = 1.0 / policy.tol
    prev = None
    prev_abs = None
    estimate = math.nan
    last_delta = math.inf
    quiet = 0
    growing = 0
    count = 0
    for value in values:
        count += 1
        if not math.isfinite(value):
            return ConvergenceReport(estimate, DIVERGED, count, math.inf, False)
        estimate = value
        if remainder is not None:
            bound = remainder(count)
            if bound <= policy.tol * max(1.0, abs(value)):
                return ConvergenceReport(value, CONVERGED, count, bound, True)
        # the divergence heuristic outranks the quiet rule: past the blowup
        # threshold a still-growing sequence is never accepted as converged
        mag = abs(value)
        if mag > blowup and prev_abs is not None and mag > prev_abs:
            growing += 1
            if growing >= policy.window:
                if prev is not None:
                    last_delta = abs(value - prev)
                return ConvergenceReport(value, DIVERGED, count, last_delta, False)
        else:
            growing = 0
        if prev is not None:
            last_delta = abs(value - prev)
            if remainder is None:
                if growing == 0 and last_delta <= policy.tol * max(1.0, abs(prev)):
                    quiet += 1
                    if quiet >= policy.window:
                        return ConvergenceReport(value, CONVERGED, count, last_delta, False)
                else:
                    quiet = 0
        prev = value
        prev_abs = mag
        if count >= policy.max_terms:
            break
    return ConvergenceReport(estimate, UNDETERMINED, count, last_delta, False)


def sum_series(term: Callable[[int], float],
               policy: ConvergencePolicy | None = None,
               tail: GeometricTail | None = None) -> ConvergenceReport:
    """Sum ``term(1) + term(2) + ...`` until the stopping rule fires.

    ``term`` must be a pure function on indices 1, 2, 3, ...  A non-finite
    term value yields a diverged verdict whose ``terms_used`` names the
    offending index.  Partial sums are accumulated in ascending index
    order, so results are deterministic.
    """
    policy = policy or ConvergencePolicy()

    def partials():
        s = 0.0
        for k in range(1, policy.max_terms + 1):
            t = term(k)
            s = s + t if math.isfinite(t) else math.nan
            yield s

    return _stabilize(partials(), policy,
                      remainder=tail.remainder if tail is not None else None)


def _schedule_sizes(schedule) -> list[int]:
    sizes = getattr(schedule, "sizes", None)
    if callable(sizes):
        return list(sizes())
    return [int(n) for n in schedule]


def limit_of_sequence(value_at: Callable[[int], float], schedule,
                      policy: ConvergencePolicy | None = None) -> ConvergenceReport:
    """Detect the limit of ``value_at(n)`` along a truncation schedule.

    ``schedule`` is anything with a ``sizes()`` method or an iterable of
    sizes.  Stopping semantics are those of :func:`sum_series` applied to
    the sequence of values.
    """
    policy = policy or ConvergencePolicy()
    sizes = _schedule_sizes(schedule)
    if len(sizes) < policy.window + 1:
        logger.warning("schedule has %d sizes but the stopping rule needs "
                       "window + 1 = %d; the result cannot converge",
                       len(sizes), policy.window + 1)

    def values():
        for n in sizes:
            v = value_at(n)
            logger.info("schedule step: size=%d value=%.12g", n, v)
            yield v

    return _stabilize(values(), policy)


def stabilize_vector(value_at: Callable[[int], "np.ndarray"], schedule,
                     policy: ConvergencePolicy | None = None
                     ) -> tuple["np.ndarray", ConvergenceReport]:
    """Stabilize a vector-valued quantity along a schedule.

    ``value_at(n)`` must return a 1-d array of fixed length; the step
    delta is the max-abs componentwise change.  Returns the last value
    together with a report whose ``estimate`` is that delta-checked
    vector's max-abs entry (scalar summary).
    """
    policy = policy or ConvergencePolicy()
    sizes = _schedule_sizes(schedule)
    prev = None
    last = None
    last_delta = math.inf
    quiet = 0
    count = 0
    for n in sizes:
        v = np.asarray(value_at(n), dtype=float)
        count += 1
        last = v
        if not np.all(np.isfinite(v)):
            return v, ConvergenceReport(math.nan, DIVERGED, count, math.inf, False)
        logger.info("schedule step: size=%d block-max=%.12g", n, float(np.max(np.abs(v))) if v.size else 0.0)
        if prev is not None:
            last_delta = float(np.max(np.abs(v - prev))) if v.size else 0.0
            scale = max(1.0, float(np.max(np.abs(prev))) if prev.size else 0.0)
            if last_delta <= policy.tol * scale:
                quiet += 1
                if quiet >= policy.window:
                    summary = float(np.max(np.abs(v))) if v.size else 0.0
                    return v, ConvergenceReport(summary, CONVERGED, count, last_delta, False)
            else:
                quiet = 0
        prev = v
        if count >= policy.max_terms:
            break
    summary = float(np.max(np.abs(last))) if last is not None and last.size else math.nan
    return last, ConvergenceReport(summary, UNDETERMINED, count, last_delta, False)
