"""Iterative expectile solvers over any distribution oracle.

Three routes are provided:

* :func:`solve_one_sided` iterates the one-sided contraction.  Globally
  convergent for every level with geometric rate, although the ratio
  approaches 1 near levels 0 and 1.
* :func:`solve_two_sided` iterates the two-sided weighted-average map.
  Below level 1/2 every iterate from the first step on sits at or above
  the expectile and the sequence is nonincreasing; levels above 1/2 are
  solved through :func:`solve_reflected` on the negated distribution.
* :func:`solve_bisection` brackets and bisects the first-order-condition
  residual, serving as an oracle independent of both fixed-point maps.

Solvers never raise on slow convergence: hitting the iteration cap is
reported through the result's ``termination`` field together with the
recorded trace, which is exactly what one needs to diagnose a stall.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .distributions import AlphaLevel, DistributionOracle, as_alpha
from .maps import (
    MapEvaluation,
    foc_residual,
    one_sided_evaluation,
    two_sided_evaluation,
)

__all__ = [
    "BracketingFailed",
    "DEFAULT_CONFIG",
    "ExpectileResult",
    "IterationTrace",
    "Method",
    "SolverConfig",
    "Termination",
    "solve_bisection",
    "solve_one_sided",
    "solve_reflected",
    "solve_two_sided",
]


class BracketingFailed(RuntimeError):
    """No sign change found while expanding the bisection bracket."""


class Method(str, Enum):
    ONE_SIDED = "one_sided"
    TWO_SIDED = "two_sided"
    BISECTION = "bisection"
    SAMPLE_ONE_SIDED = "sample_one_sided"
    SAMPLE_TWO_SIDED = "sample_two_sided"


class Termination(str, Enum):
    TOLERANCE_MET = "tolerance_met"
    FINITE_TERMINATION = "finite_termination"
    MAX_ITERATIONS_HIT = "max_iterations_hit"


@dataclass(frozen=True)
class SolverConfig:
    """Stopping control shared by all solvers.

    Iteration stops once the relative step |x_{i+1} - x_i| falls below
    ``tolerance * max(1, |x_i|)`` AND the residual at the new point falls
    below ``tolerance * (1 + |mean|)``; the dual condition prevents stops
    where steps are small but the root has not been reached.
    """

    tolerance: float = 1e-12
    max_iterations: int = 10_000
    record_trace: bool = False

    def __post_init__(self) -> None:
        if not self.tolerance > 0.0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(
                f"max_iterations must be at least 1, got {self.max_iterations}"
            )


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class IterationTrace:
    """Iterates x0, x1, ... with the FOC residual at each point."""

    iterates: tuple[float, ...]
    residuals: tuple[float, ...]
    method: Method

    def __post_init__(self) -> None:
        if len(self.iterates) != len(self.residuals):
            raise ValueError("iterates and residuals must have equal length")

    def __len__(self) -> int:
        return len(self.iterates)


@dataclass(frozen=True)
class ExpectileResult:
    """Solver outcome: the expectile value plus convergence diagnostics."""

    value: float
    alpha: AlphaLevel
    iterations: int
    termination: Termination
    foc_residual: float
    trace: IterationTrace | None = None


def _fixed_point_loop(
    step: Callable[[float], MapEvaluation],
    alpha: AlphaLevel,
    d: DistributionOracle,
    x0: float,
    cfg: SolverConfig,
    method: Method,
) -> ExpectileResult:
    tol = cfg.tolerance
    residual_scale = 1.0 + abs(d.mean())
    x = x0
    current = step(x0)
    iterates = [x0]
    residuals = [current.residual]
    iterations = cfg.max_iterations
    termination = Termination.MAX_ITERATIONS_HIT
    for i in range(1, cfg.max_iterations + 1):
        x_next = current.value
        following = step(x_next)
        iterates.append(x_next)
        residuals.append(following.residual)
        if (
            abs(x_next - x) <= tol * max(1.0, abs(x))
            and abs(following.residual) <= tol * residual_scale
        ):
            iterations = i
            termination = Termination.TOLERANCE_MET
            break
        x = x_next
        current = following
    trace = (
        IterationTrace(tuple(iterates), tuple(residuals), method)
        if cfg.record_trace
        else None
    )
    return ExpectileResult(
        iterates[-1], alpha, iterations, termination, residuals[-1], trace
    )


def _degenerate_result(
    alpha: AlphaLevel,
    d: DistributionOracle,
    cfg: SolverConfig,
    method: Method,
) -> ExpectileResult | None:
    """Single-point laws: every expectile is the location, no iteration."""
    bounds = d.support_bounds()
    if bounds is None or bounds[0] != bounds[1]:
        return None
    location = bounds[0]
    residual = foc_residual(alpha, location, d)
    trace = (
        IterationTrace((location,), (residual,), method)
        if cfg.record_trace
        else None
    )
    return ExpectileResult(
        location, alpha, 0, Termination.FINITE_TERMINATION, residual, trace
    )


def _mean_result(
    alpha: AlphaLevel,
    d: DistributionOracle,
    x0: float,
    cfg: SolverConfig,
    method: Method,
    termination: Termination,
) -> ExpectileResult:
    # level 1/2: the mean is the expectile, one map application suffices
    m = d.mean()
    residual = foc_residual(alpha, m, d)
    trace = None
    if cfg.record_trace:
        trace = IterationTrace(
            (x0, m), (foc_residual(alpha, x0, d), residual), method
        )
    return ExpectileResult(m, alpha, 1, termination, residual, trace)


def solve_one_sided(
    alpha: float | AlphaLevel,
    d: DistributionOracle,
    x0: float | None = None,
    config: SolverConfig | None = None,
) -> ExpectileResult:
    """Iterate the one-sided contraction from ``x0`` (default: the mean).

    Converges from any starting point.  The contraction ratio
    (1 - 2a)/(1 - a), mirrored above level 1/2, approaches 1 near the
    endpoints, where the two-sided method is the better choice.
    """
    a = as_alpha(alpha)
    cfg = config or DEFAULT_CONFIG
    degenerate = _degenerate_result(a, d, cfg, Method.ONE_SIDED)
    if degenerate is not None:
        return degenerate
    start = d.mean() if x0 is None else float(x0)
    if a.value == 0.5:
        return _mean_result(
            a, d, start, cfg, Method.ONE_SIDED, Termination.TOLERANCE_MET
        )
    return _fixed_point_loop(
        lambda x: one_sided_evaluation(a, x, d),
        a,
        d,
        start,
        cfg,
        Method.ONE_SIDED,
    )


def solve_reflected(
    alpha: float | AlphaLevel,
    d: DistributionOracle,
    x0: float | None = None,
    config: SolverConfig | None = None,
    inner: Callable[..., ExpectileResult] | None = None,
) -> ExpectileResult:
    """Solve a level above 1/2 by solving the negated law at the mirror level.

    Negating the distribution swaps the tails, so the expectile at level a
    equals minus the expectile of -X at level 1 - a.  The returned trace
    holds the negated-back iterates of the inner run.
    """
    a = as_alpha(alpha)
    if a.value <= 0.5:
        raise ValueError("reflection applies to levels above 1/2")
    cfg = config or DEFAULT_CONFIG
    solver = inner if inner is not None else solve_two_sided
    mirrored = solver(
        AlphaLevel(1.0 - a.value),
        d.negated(),
        x0=None if x0 is None else -float(x0),
        config=cfg,
    )
    trace = None
    if mirrored.trace is not None:
        trace = IterationTrace(
            tuple(-t for t in mirrored.trace.iterates),
            tuple(-r for r in mirrored.trace.residuals),
            mirrored.trace.method,
        )
    return ExpectileResult(
        -mirrored.value,
        a,
        mirrored.iterations,
        mirrored.termination,
        -mirrored.foc_residual,
        trace,
    )


def solve_two_sided(
    alpha: float | AlphaLevel,
    d: DistributionOracle,
    x0: float | None = None,
    config: SolverConfig | None = None,
) -> ExpectileResult:
    """Iterate the two-sided weighted-average map from ``x0`` (default mean).

    Below level 1/2 the approach is one-sided: every iterate from the first
    step on lies at or above the expectile and the sequence is
    nonincreasing.  Levels above 1/2 are routed through the negated
    distribution; level 1/2 returns the mean immediately.
    """
    a = as_alpha(alpha)
    cfg = config or DEFAULT_CONFIG
    degenerate = _degenerate_result(a, d, cfg, Method.TWO_SIDED)
    if degenerate is not None:
        return degenerate
    if a.value > 0.5:
        return solve_reflected(a, d, x0=x0, config=cfg, inner=solve_two_sided)
    start = d.mean() if x0 is None else float(x0)
    if a.value == 0.5:
        return _mean_result(
            a, d, start, cfg, Method.TWO_SIDED, Termination.TOLERANCE_MET
        )
    return _fixed_point_loop(
        lambda x: two_sided_evaluation(a, x, d),
        a,
        d,
        start,
        cfg,
        Method.TWO_SIDED,
    )


def solve_bisection(
    alpha: float | AlphaLevel,
    d: DistributionOracle,
    config: SolverConfig | None = None,
) -> ExpectileResult:
    """Bisect the FOC residual; the cross-check independent of both maps.

    The residual decreases with a root at the expectile, so a valid bracket
    has residual >= 0 on the left and <= 0 on the right.  The bracket comes
    from the support bounds when the oracle knows them, otherwise from a
    geometric expansion around the mean (half-width 1, doubling, at most
    200 times).  Bisection stops when the bracket width reaches the
    configured tolerance or the floating-point floor, whichever is first.
    """
    a = as_alpha(alpha)
    cfg = config or DEFAULT_CONFIG

    def residual_at(x: float) -> float:
        return foc_residual(a, x, d)

    bounds = d.support_bounds()
    if bounds is not None:
        lo, hi = bounds
        if lo == hi:
            r = residual_at(lo)
            trace = (
                IterationTrace((lo,), (r,), Method.BISECTION)
                if cfg.record_trace
                else None
            )
            return ExpectileResult(
                lo, a, 0, Termination.FINITE_TERMINATION, r, trace
            )
        f_lo, f_hi = residual_at(lo), residual_at(hi)
        if f_lo < 0.0 or f_hi > 0.0:
            raise BracketingFailed("support bounds do not bracket the root")
    else:
        center = d.mean()
        half = 1.0
        lo, hi = center - half, center + half
        f_lo, f_hi = residual_at(lo), residual_at(hi)
        doublings = 0
        while f_lo < 0.0 or f_hi > 0.0:
            doublings += 1
            if doublings > 200:
                raise BracketingFailed(
                    "no sign change within 200 bracket doublings; "
                    "the oracle looks degenerate"
                )
            half *= 2.0
            if f_lo < 0.0:
                lo = center - half
                f_lo = residual_at(lo)
            if f_hi > 0.0:
                hi = center + half
                f_hi = residual_at(hi)

    midpoints: list[float] = []
    residuals: list[float] = []
    iterations = 0
    termination = Termination.TOLERANCE_MET
    while hi - lo > cfg.tolerance:
        if iterations >= cfg.max_iterations:
            termination = Termination.MAX_ITERATIONS_HIT
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # bracket is at the floating-point floor
        r = residual_at(mid)
        iterations += 1
        if cfg.record_trace:
            midpoints.append(mid)
            residuals.append(r)
        if r > 0.0:
            lo = mid
        elif r < 0.0:
            hi = mid
        else:
            lo = hi = mid
            break
    value = 0.5 * (lo + hi)
    final_residual = residual_at(value)
    trace = None
    if cfg.record_trace:
        midpoints.append(value)
        residuals.append(final_residual)
        trace = IterationTrace(
            tuple(midpoints), tuple(residuals), Method.BISECTION
        )
    return ExpectileResult(
        value, a, iterations, termination, final_residual, trace
    )
