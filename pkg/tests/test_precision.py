import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from zetabessel.precision import EvaluationBudget, PrecisionContext, compensated_sum, with_guard


def test_compensated_sum_cancellation(ctx40):
    mp = ctx40.mp
    assert compensated_sum([mp.mpf(1), mp.mpf(-1), mp.mpf("1e-30")], ctx40) == mp.mpf("1e-30")


def test_compensated_sum_empty(ctx40):
    assert compensated_sum([], ctx40) == 0


def test_compensated_sum_basel_partial(ctx40):
    mp = ctx40.mp
    terms = [mp.mpf(1) / (n * n) for n in range(1, 10_001)]
    with mpmath.workdps(80):
        ref = mpmath.fsum(mpmath.mpf(1) / (n * n) for n in range(1, 10_001))
    assert abs(compensated_sum(terms, ctx40) - ref) < mpmath.mpf("1e-38")


@pytest.mark.parametrize("digits,extra,expected", [(30, 0, 30), (30, 20, 50)])
def test_with_guard(digits, extra, expected):
    assert with_guard(PrecisionContext(digits), extra).digits == expected


def test_with_guard_chained():
    assert with_guard(with_guard(PrecisionContext(30), 10), 10).digits == 50


def test_contexts_are_isolated():
    lo, hi = PrecisionContext(20), PrecisionContext(60)
    assert lo.mp.dps == 20 and hi.mp.dps == 60
    assert hi.mp.pi != lo.mp.pi


@pytest.mark.parametrize("kwargs", [
    {"max_terms_outer": 0},
    {"tail_epsilon": "0"},
    {"singularity_threshold": "0.5"},
    {"target_tolerance": "-1"},
])
def test_budget_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        EvaluationBudget(**kwargs)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-10**6, 10**6), max_size=40))
def test_compensated_sum_exact_on_integers(xs):
    ctx = PrecisionContext(30)
    assert compensated_sum([ctx.mp.mpf(x) for x in xs], ctx) == sum(xs)
