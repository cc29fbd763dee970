"""Property-based tests for the oracle and the solvers."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from expectile import (
    foc_residual,
    make_empirical,
    one_sided_map,
    sample_two_sided_map,
    solve,
    solve_sample_one_sided,
    solve_sample_two_sided,
    two_sided_map,
    two_sided_map_quotient,
)
from exact_reference import exact_sample_expectile

finite_values = st.floats(
    min_value=-100.0, max_value=100.0, allow_nan=False, allow_infinity=False
)
samples = st.lists(finite_values, min_size=1, max_size=60)
thresholds = st.floats(
    min_value=-150.0, max_value=150.0, allow_nan=False, allow_infinity=False
)
levels = st.floats(min_value=0.01, max_value=0.99)
lower_levels = st.floats(min_value=0.01, max_value=0.49)


@given(samples)
@settings(max_examples=60)
def test_make_empirical_roundtrip(data):
    d = make_empirical(data)
    assert d.values == tuple(sorted(float(v) for v in data))
    assert d.count == len(data)
    assert d.prefix_sums[-1] == pytest.approx(sum(d.values), abs=1e-9)
    assert math.isclose(d.mean(), sum(d.values) / len(data), rel_tol=1e-12, abs_tol=1e-12)


@given(samples, thresholds)
@settings(max_examples=80)
def test_oracle_identities(data, x):
    d = make_empirical(data)
    ev = d.evaluate(x)
    mean = d.mean()
    scale = 1.0 + abs(mean) + abs(x)
    assert abs(ev.upm - ev.lpm - (mean - x)) <= 1e-10 * scale
    assert abs(ev.survival + ev.cdf - 1.0) <= 1e-12
    assert ev.upm >= 0.0 and ev.lpm >= -1e-12 * scale
    assert abs(ev.upe - ev.upm - x * ev.survival) <= 1e-12 * scale


@given(samples, thresholds, thresholds, levels)
@settings(max_examples=80)
def test_one_sided_contraction(data, x, y, a):
    d = make_empirical(data)
    ratio = (1 - 2 * a) / (1 - a) if a < 0.5 else (2 * a - 1) / a
    fx, fy = one_sided_map(a, x, d), one_sided_map(a, y, d)
    assert abs(fx - fy) <= ratio * abs(x - y) + 1e-12


@given(samples, thresholds, thresholds, levels)
@settings(max_examples=80)
def test_residual_is_nonincreasing(data, x, y, a):
    d = make_empirical(data)
    lo, hi = min(x, y), max(x, y)
    assert foc_residual(a, lo, d) >= foc_residual(a, hi, d) - 1e-12


@given(samples, thresholds, levels)
@settings(max_examples=80)
def test_two_sided_forms_agree(data, x, a):
    d = make_empirical(data)
    increment_form = two_sided_map(a, x, d)
    quotient_form = two_sided_map_quotient(a, x, d)
    scale = 1.0 + abs(x) + abs(increment_form)
    assert abs(increment_form - quotient_form) <= 1e-11 * scale


@given(samples, thresholds, lower_levels)
@settings(max_examples=60, deadline=None)
def test_two_sided_overshoot(data, x, a):
    d = make_empirical(data)
    e = solve_sample_two_sided(a, d).value
    assert two_sided_map(a, x, d) >= e - 1e-9 * (1.0 + abs(e))


@given(samples, lower_levels, thresholds)
@settings(max_examples=60, deadline=None)
def test_sample_two_sided_step_bound(data, a, x0):
    d = make_empirical(data)
    res = solve_sample_two_sided(a, d, x0=x0)
    assert res.iterations <= d.count + 1


@given(samples, lower_levels)
@settings(max_examples=40, deadline=None)
def test_sample_solvers_find_the_exact_root(data, a):
    d = make_empirical(data)
    want = float(exact_sample_expectile(data, Fraction(a)))
    tol = 1e-9 * (1.0 + abs(want))
    assert abs(solve_sample_one_sided(a, d).value - want) <= tol
    assert abs(solve_sample_two_sided(a, d).value - want) <= tol


@given(samples, levels)
@settings(max_examples=40, deadline=None)
def test_reflection_identity(data, a):
    d = make_empirical(data)
    nd = make_empirical([-v for v in data])
    direct = solve(a, d, method="two_sided").value
    mirrored = -solve(1.0 - a, nd, method="two_sided").value
    scale = 1.0 + abs(direct) + abs(d.mean())
    assert abs(direct - mirrored) <= 1e-10 * scale


@given(samples, lower_levels, st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_two_sided_cells_give_identical_values(data, a, seed):
    import numpy as np

    d = make_empirical(data)
    rng = np.random.default_rng(seed)
    x1, x2 = rng.uniform(d.values[0] - 5.0, d.values[-1] + 5.0, 2)
    if d.count_le(float(x1)) == d.count_le(float(x2)):
        assert sample_two_sided_map(a, d, float(x1)) == sample_two_sided_map(
            a, d, float(x2)
        )
