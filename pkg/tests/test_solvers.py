"""Generic solver tests: golden traces, bisection, reflection, agreement."""

from fractions import Fraction

import numpy as np
import pytest

from expectile import (
    BracketingFailed,
    ExpectileResult,
    IterationTrace,
    Method,
    NormalDistribution,
    PointMassDistribution,
    SolverConfig,
    Termination,
    UniformDistribution,
    foc_residual,
    make_empirical,
    solve,
    solve_bisection,
    solve_one_sided,
    solve_reflected,
    solve_two_sided,
)
from exact_reference import exact_sample_expectile

Z3 = make_empirical([1, 2, 7])
Z4 = make_empirical([1, 2, 5, 8])
Z4B = make_empirical([1, 2, 3, 6])
TRACED = SolverConfig(record_trace=True)


class TestSolverConfig:
    def test_defaults(self):
        cfg = SolverConfig()
        assert cfg.tolerance == 1e-12
        assert cfg.max_iterations == 10_000
        assert cfg.record_trace is False

    @pytest.mark.parametrize("kwargs", [{"tolerance": 0.0}, {"tolerance": -1e-3}, {"max_iterations": 0}])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    def test_trace_length_validation(self):
        with pytest.raises(ValueError):
            IterationTrace((1.0, 2.0), (0.0,), Method.ONE_SIDED)


class TestOneSidedSolver:
    def test_three_point_iterates_from_mean(self):
        res = solve_one_sided(1 / 6, Z3, x0=10.0 / 3.0, config=TRACED)
        expected = [Fraction(10, 3), Fraction(106, 45), Fraction(1414, 675), Fraction(20506, 10125)]
        for got, want in zip(res.trace.iterates, expected):
            assert abs(got - want) < 1e-12
        assert abs(res.value - 2.0) < 1e-10
        assert res.termination is Termination.TOLERANCE_MET

    def test_three_point_iterates_from_min(self):
        res = solve_one_sided(1 / 6, Z3, x0=1.0, config=TRACED)
        expected = [Fraction(1), Fraction(22, 15), Fraction(386, 225), Fraction(6238, 3375)]
        for got, want in zip(res.trace.iterates, expected):
            assert abs(got - want) < 1e-12
        assert abs(res.value - 2.0) < 1e-10
        # approach from below never crosses the fixed point
        assert all(x <= 2.0 + 1e-12 for x in res.trace.iterates)

    def test_half_level_is_mean_in_one_iteration(self):
        for x0 in (-50.0, 0.0, 10.0 / 3.0, 123.0):
            res = solve_one_sided(0.5, Z3, x0=x0, config=TRACED)
            assert res.value == 10.0 / 3.0
            assert res.iterations == 1
            assert res.trace.iterates == (x0, 10.0 / 3.0)

    def test_geometric_error_decay(self):
        for a in (0.1, 0.25, 0.45, 0.7):
            c = (1 - 2 * a) / (1 - a) if a < 0.5 else (2 * a - 1) / a
            res = solve_one_sided(a, Z4, x0=-40.0, config=TRACED)
            e = res.value
            errors = [abs(x - e) for x in res.trace.iterates]
            for previous, current in zip(errors, errors[1:]):
                assert current <= c * previous + 1e-12

    def test_default_start_is_mean(self):
        res = solve_one_sided(0.2, Z4, config=TRACED)
        assert res.trace.iterates[0] == 4.0

    def test_max_iterations_returns_result(self):
        cfg = SolverConfig(max_iterations=2, record_trace=True)
        res = solve_one_sided(0.01, Z4, x0=1000.0, config=cfg)
        assert res.termination is Termination.MAX_ITERATIONS_HIT
        assert res.iterations == 2
        assert len(res.trace) == 3


class TestTwoSidedSolver:
    def test_four_point_descent(self):
        res = solve_two_sided(0.125, Z4B, x0=6.0, config=TRACED)
        expected = [6.0, 3.0, 24.0 / 11.0, 15.0 / 8.0, 9.0 / 5.0]
        for got, want in zip(res.trace.iterates, expected):
            assert abs(got - want) < 1e-12
        assert abs(res.value - 1.8) < 1e-10

    def test_fixed_point_start(self):
        res = solve_two_sided(0.25, Z4, x0=2.75, config=TRACED)
        assert res.value == pytest.approx(2.75, abs=1e-12)
        assert res.iterations <= 1

    def test_half_level_normal(self):
        res = solve_two_sided(0.5, NormalDistribution(2.0, 6.0), x0=77.0)
        assert res.value == 2.0
        assert res.iterations == 1

    def test_monotone_after_first_step(self):
        rng = np.random.default_rng(51)
        for a in (0.05, 0.2, 0.45):
            for _ in range(20):
                data = rng.uniform(-100.0, 100.0, rng.integers(1, 60)).tolist()
                d = make_empirical(data)
                x0 = float(rng.uniform(-150.0, 150.0))
                res = solve_two_sided(a, d, x0=x0, config=TRACED)
                e = res.value
                tail = res.trace.iterates[1:]
                for previous, current in zip(tail, tail[1:]):
                    assert current <= previous + 1e-10 * (1.0 + abs(previous))
                assert all(x >= e - 1e-10 * (1.0 + abs(e)) for x in tail)


class TestBisection:
    def test_three_point_root(self):
        res = solve_bisection(1 / 6, Z3)
        assert abs(res.value - 2.0) <= 1e-12

    def test_four_point_root(self):
        res = solve_bisection(0.25, Z4)
        assert abs(res.value - 2.75) <= 1e-12

    def test_point_mass_immediate(self):
        res = solve_bisection(0.77, PointMassDistribution(4.5))
        assert res.value == 4.5
        assert res.iterations == 0
        assert res.termination is Termination.FINITE_TERMINATION

    def test_unbounded_support_expansion(self):
        d = NormalDistribution(100.0, 0.5)
        res = solve_bisection(0.9, d)
        assert abs(foc_residual(0.9, res.value, d)) < 1e-12

    def test_bracketing_failure_on_degenerate_oracle(self):
        from expectile.distributions import DistributionOracle, OracleEvaluation

        class Degenerate(DistributionOracle):
            # residual is a constant +0.2: no root anywhere
            def mean(self):
                return 0.0

            def evaluate(self, x):
                return OracleEvaluation(1.0, 1.0, 0.5, 0.5, 1.0)

            def negated(self):
                return self

        with pytest.raises(BracketingFailed):
            solve_bisection(0.6, Degenerate())


class TestReflection:
    def test_negated_three_point(self):
        d = make_empirical([-7, -2, -1])
        res = solve_reflected(5 / 6, d, config=TRACED)
        assert abs(res.value - (-2.0)) < 1e-10
        assert res.trace.method is Method.TWO_SIDED

    def test_point_mass_any_level(self):
        res = solve_reflected(0.75, PointMassDistribution(3.25))
        assert res.value == 3.25

    def test_standard_normal_symmetry(self):
        lo = solve_bisection(0.25, NormalDistribution(0.0, 1.0)).value
        hi = solve(0.75, NormalDistribution(0.0, 1.0), method="two_sided").value
        assert abs(hi + lo) < 1e-10

    def test_rejects_lower_levels(self):
        with pytest.raises(ValueError):
            solve_reflected(0.3, Z3)

    def test_trace_is_negated_back(self):
        d = make_empirical([-6, -3, -2, -1])
        res = solve_reflected(0.875, d, x0=-6.0, config=TRACED)
        assert res.trace.iterates[0] == -6.0
        assert abs(res.value - (-1.8)) < 1e-10

    def test_identity_on_random_instances(self):
        rng = np.random.default_rng(61)
        for _ in range(60):
            data = rng.uniform(-100.0, 100.0, rng.integers(1, 80)).tolist()
            a = float(rng.uniform(0.02, 0.98))
            d = make_empirical(data)
            nd = make_empirical([-v for v in data])
            direct = solve(a, d, method="two_sided").value
            mirrored = -solve(1.0 - a, nd, method="two_sided").value
            scale = 1.0 + abs(direct) + abs(d.mean())
            assert abs(direct - mirrored) <= 1e-10 * scale


class TestDispatch:
    def test_sample_method_requires_empirical(self):
        from expectile import UnsupportedOracle

        with pytest.raises(UnsupportedOracle):
            solve(0.2, NormalDistribution(0, 1), method="sample_two_sided")

    def test_string_and_enum_methods_agree(self):
        via_str = solve(0.2, Z4, method="bisection")
        via_enum = solve(0.2, Z4, method=Method.BISECTION)
        assert via_str.value == via_enum.value

    def test_sample_methods_reflect_above_half(self):
        for m in ("sample_one_sided", "sample_two_sided"):
            res = solve(0.8, Z4, method=m)
            want = exact_sample_expectile([1, 2, 5, 8], Fraction(4, 5))
            assert abs(res.value - want) < 1e-10

    def test_sample_methods_at_half_return_mean(self):
        for m in ("sample_one_sided", "sample_two_sided"):
            res = solve(0.5, Z4, method=m)
            assert res.value == 4.0
            assert res.termination is Termination.FINITE_TERMINATION

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            solve(0.2, Z4, method="newton")


ALL_METHODS = ["one_sided", "two_sided", "bisection", "sample_one_sided", "sample_two_sided"]


class TestCrossSolverAgreement:
    def test_random_empirical_grid(self):
        rng = np.random.default_rng(71)
        for _ in range(50):
            data = rng.uniform(-100.0, 100.0, rng.integers(1, 500)).tolist()
            d = make_empirical(data)
            for a in (0.01, 0.1, 0.25, 0.5, 0.75, 0.99):
                values = [solve(a, d, method=m).value for m in ALL_METHODS]
                scale = 1.0 + abs(d.mean()) + max(abs(v) for v in values)
                assert max(values) - min(values) <= 1e-8 * scale

    def test_analytic_instances(self):
        for d in (NormalDistribution(2, 6), UniformDistribution(0, 1), NormalDistribution(-5, 0.5)):
            for a in (0.05, 0.3, 0.5, 0.7, 0.95):
                values = [
                    solve(a, d, method=m).value
                    for m in ("one_sided", "two_sided", "bisection")
                ]
                scale = 1.0 + abs(d.mean()) + max(abs(v) for v in values)
                assert max(values) - min(values) <= 1e-8 * scale

    def test_monotone_in_level(self):
        rng = np.random.default_rng(73)
        grid = [round(0.1 * i, 1) for i in range(1, 10)]
        for _ in range(10):
            d = make_empirical(rng.uniform(-50.0, 50.0, 40).tolist())
            values = [solve(a, d, method="two_sided").value for a in grid]
            for lo, hi in zip(values, values[1:]):
                assert hi >= lo - 1e-10

    def test_matches_exact_reference(self):
        rng = np.random.default_rng(79)
        for _ in range(40):
            data = [float(v) for v in rng.uniform(-20.0, 20.0, rng.integers(1, 40))]
            a = float(rng.uniform(0.02, 0.48))
            want = float(exact_sample_expectile(data, Fraction(a)))
            d = make_empirical(data)
            for m in ALL_METHODS:
                got = solve(a, d, method=m).value
                assert abs(got - want) <= 1e-9 * (1.0 + abs(want))


class TestResultInvariants:
    def test_residual_bound_when_converged(self):
        rng = np.random.default_rng(83)
        cfg = SolverConfig()
        for _ in range(30):
            d = make_empirical(rng.uniform(-100.0, 100.0, rng.integers(1, 200)).tolist())
            a = float(rng.uniform(0.02, 0.98))
            for m in ALL_METHODS:
                res = solve(a, d, method=m, config=cfg)
                if res.termination is not Termination.MAX_ITERATIONS_HIT:
                    scale = 1.0 + abs(res.value) + abs(d.mean())
                    assert abs(res.foc_residual) <= 100.0 * cfg.tolerance * scale

    def test_trace_shapes(self):
        res = solve(0.2, Z4, method="two_sided", config=TRACED)
        assert len(res.trace.iterates) == len(res.trace.residuals)
        assert res.trace.method is Method.TWO_SIDED
        assert res.trace.iterates[0] == 4.0
        untraced = solve(0.2, Z4, method="two_sided")
        assert untraced.trace is None
