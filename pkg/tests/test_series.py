import math

import pytest
from hypothesis import given, strategies as st

from infmat.series import (CONVERGED, DIVERGED, UNDETERMINED, ConvergencePolicy,
                           GeometricTail, exact_report, limit_of_sequence,
                           stabilize_vector, sum_series)
from infmat.matrix_core import TruncationSchedule

DEFAULT = ConvergencePolicy()


def test_policy_invariants():
    with pytest.raises(ValueError):
        ConvergencePolicy(tol=0.0)
    with pytest.raises(ValueError):
        ConvergencePolicy(window=0)
    with pytest.raises(ValueError):
        ConvergencePolicy(window=5, max_terms=5)


def test_geometric_quarter_ratio():
    # sum over k >= 1 of 4^-k is 1/3
    rep = sum_series(lambda k: 4.0 ** -k)
    assert rep.status == CONVERGED
    assert rep.estimate == pytest.approx(1.0 / 3.0, abs=1e-10)


def test_zero_series_converges_in_window_plus_one():
    rep = sum_series(lambda k: 0.0)
    assert rep.status == CONVERGED
    assert rep.estimate == 0.0
    assert rep.terms_used == DEFAULT.window + 1


def test_harmonic_never_converges():
    rep = sum_series(lambda k: 1.0 / k, ConvergencePolicy(max_terms=20000))
    assert rep.status in (UNDETERMINED, DIVERGED)


def test_constant_positive_terms_diverge_past_blowup():
    rep = sum_series(lambda k: 1.0, ConvergencePolicy(tol=1e-3))
    assert rep.status == DIVERGED
    assert rep.terms_used == 1000 + DEFAULT.window


def test_non_finite_term_reports_offending_index():
    def term(k):
        return math.inf if k == 7 else 0.5 ** k

    rep = sum_series(term)
    assert rep.status == DIVERGED
    assert rep.terms_used == 7
    assert rep.last_delta == math.inf


def test_certified_tail_bound():
    tail = GeometricTail(C=1.0, r=0.25)
    rep = sum_series(lambda k: 4.0 ** -k, tail=tail)
    assert rep.status == CONVERGED
    assert rep.certified
    assert abs(rep.estimate - 1.0 / 3.0) <= tail.remainder(rep.terms_used)
    # report invariant holds on the certified path too
    assert rep.last_delta <= DEFAULT.tol * max(1.0, abs(rep.estimate))


def test_certified_alternating_within_bound():
    tail = GeometricTail(C=2.0, r=0.5)
    rep = sum_series(lambda k: 2.0 * (-0.5) ** k, tail=tail)
    true = 2.0 * (-0.5) / 1.5
    assert rep.certified
    assert abs(rep.estimate - true) <= tail.remainder(rep.terms_used)


def test_refinement_stability_for_certified_geometric():
    first = sum_series(lambda k: 3.0 * 0.7 ** k, tail=GeometricTail(3.0, 0.7))
    tighter = ConvergencePolicy(tol=1e-12, max_terms=1_000_000)
    second = sum_series(lambda k: 3.0 * 0.7 ** k, tighter,
                        tail=GeometricTail(3.0, 0.7))
    assert first.status == second.status == CONVERGED
    assert abs(first.estimate - second.estimate) <= \
        10 * DEFAULT.tol * max(1.0, abs(first.estimate))


@given(st.floats(min_value=0.05, max_value=0.9),
       st.floats(min_value=0.1, max_value=100.0))
def test_geometric_certificate_error_bound(r, c):
    tail = GeometricTail(C=c, r=r)
    rep = sum_series(lambda k: c * r ** k, tail=tail)
    true = c * r / (1.0 - r)
    assert rep.status == CONVERGED and rep.certified
    # the bound is exactly tight for a pure geometric series, so allow
    # accumulated float rounding on top of it
    assert abs(rep.estimate - true) <= \
        tail.remainder(rep.terms_used) + 1e-12 * max(1.0, abs(true))


@given(st.integers(min_value=1, max_value=6))
def test_stopping_rule_deterministic(window):
    policy = ConvergencePolicy(tol=1e-8, window=window, max_terms=5000)
    a = sum_series(lambda k: (-0.8) ** k, policy)
    b = sum_series(lambda k: (-0.8) ** k, policy)
    assert a == b


def test_limit_of_reciprocal_drift():
    # 1 + 1/n settles once the step 1/(2n) drops under the tolerance
    policy = ConvergencePolicy(tol=1e-4)
    schedule = TruncationSchedule(start=8, growth=2, max_size=65536)
    rep = limit_of_sequence(lambda n: 1.0 + 1.0 / n, schedule, policy)
    assert rep.status == CONVERGED
    assert rep.estimate == pytest.approx(1.0, abs=1e-3)


def test_limit_of_oscillation_undetermined():
    # geometric schedules only sample even sizes, where (-1)^n is constant;
    # an explicit run of consecutive sizes shows the oscillation
    rep = limit_of_sequence(lambda n: (-1.0) ** n, list(range(1, 13)))
    assert rep.status == UNDETERMINED


def test_limit_of_constant_converges_at_window_plus_one():
    rep = limit_of_sequence(lambda n: math.log(0.99), TruncationSchedule())
    assert rep.status == CONVERGED
    assert rep.terms_used == DEFAULT.window + 1
    assert rep.estimate == math.log(0.99)


def test_limit_accepts_plain_size_iterables():
    rep = limit_of_sequence(lambda n: 2.0, [4, 8, 16, 32, 64])
    assert rep.status == CONVERGED


def test_converged_delta_invariant():
    for rep in (sum_series(lambda k: 4.0 ** -k),
                limit_of_sequence(lambda n: 5.0, TruncationSchedule()),
                sum_series(lambda k: 100.0 * 0.5 ** k)):
        if rep.status == CONVERGED:
            assert rep.last_delta <= DEFAULT.tol * max(1.0, abs(rep.estimate))


def test_stabilize_vector():
    import numpy as np

    def value_at(n):
        return np.array([1.0 + 2.0 ** -n, 3.0])

    vec, rep = stabilize_vector(value_at, [8, 16, 32, 64, 128, 256],
                                ConvergencePolicy(tol=1e-6))
    assert rep.status == CONVERGED
    assert vec[0] == pytest.approx(1.0, abs=1e-4)


def test_exact_report_shape():
    rep = exact_report(2.5, 7)
    assert rep.converged and rep.terms_used == 7 and rep.last_delta == 0.0
