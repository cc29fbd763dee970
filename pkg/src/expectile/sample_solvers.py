"""Finite-termination solvers specialized to empirical samples.

Both sample maps are piecewise in x with breakpoints at the observations,
so the whole iteration state is captured by k, the number of observations
at or below the current point.  The two-sided map is constant on each piece,
turning the iteration into a walk over finitely many cells; the one-sided
map is linear on each piece, so a frozen partition can be solved in closed
form.  Either way the exact sample expectile is produced after finitely
many steps rather than approximated.

Both solvers run the lower branch only (level < 1/2).  Levels above 1/2 are
handled by :func:`expectile.solvers.solve_reflected` on the negated sample,
and level 1/2 is the sample mean; :func:`expectile.api.solve` wires all of
that up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import AlphaLevel, EmpiricalDistribution, as_alpha
from .maps import foc_residual
from .solvers import (
    DEFAULT_CONFIG,
    ExpectileResult,
    IterationTrace,
    Method,
    SolverConfig,
    Termination,
    _degenerate_result,
)

__all__ = [
    "AlphaBranchMismatch",
    "TailPartition",
    "sample_one_sided_map",
    "sample_two_sided_map",
    "solve_sample_one_sided",
    "solve_sample_two_sided",
]


class AlphaBranchMismatch(ValueError):
    """Sample solvers run the lower branch only; reflect levels >= 1/2 first."""


@dataclass(frozen=True)
class TailPartition:
    """Sample partition induced by a point: lower count and strict upper-tail sum."""

    count_le: int
    tail_sum: float

    @classmethod
    def at(cls, d: EmpiricalDistribution, x: float) -> "TailPartition":
        k = d.count_le(x)
        return cls(k, d.tail_sum(k))


def _require_lower_branch(alpha: float | AlphaLevel) -> AlphaLevel:
    a = as_alpha(alpha)
    if a.value >= 0.5:
        raise AlphaBranchMismatch(
            f"level {a.value} is not below 1/2; solve the negated sample "
            f"at level {1.0 - a.value} and negate the result"
        )
    return a


def sample_two_sided_map(
    alpha: float | AlphaLevel, d: EmpiricalDistribution, x: float
) -> float:
    """Weighted average of the sample, upper tail weighted a, lower 1 - a.

    Piecewise constant in x: the value depends only on how many
    observations lie at or below x, so it is constant on every interval
    between consecutive distinct observations (closed on the left).
    """
    a = as_alpha(alpha).value
    n = d.count
    k = d.count_le(x)
    s_lo = d.prefix_sum(k)
    s_hi = d.prefix_sums[-1] - s_lo
    return (a * s_hi + (1.0 - a) * s_lo) / (a * (n - k) + (1.0 - a) * k)


def sample_one_sided_map(
    alpha: float | AlphaLevel, d: EmpiricalDistribution, x: float
) -> float:
    """One-sided contraction on a sample; increasing and piecewise linear.

    Equals the sample mean for x at or beyond the largest observation, and
    never exceeds the mean on the lower branch.
    """
    a = _require_lower_branch(alpha).value
    n = d.count
    k = d.count_le(x)
    s_hi = d.tail_sum(k)
    return d.mean() + (2.0 * a - 1.0) / (n * (1.0 - a)) * (s_hi - (n - k) * x)


def _stable_partition_value(
    a: float, d: EmpiricalDistribution, k: int
) -> float:
    # closed-form fixed point of the one-sided map with the upper tail frozen
    # at the observations above the k smallest
    n = d.count
    two_am1 = 2.0 * a - 1.0
    n_1a = n * (1.0 - a)
    return (two_am1 * d.tail_sum(k) + n_1a * d.mean()) / (
        n_1a + (n - k) * two_am1
    )


def solve_sample_one_sided(
    alpha: float | AlphaLevel,
    d: EmpiricalDistribution,
    x0: float | None = None,
    config: SolverConfig | None = None,
) -> ExpectileResult:
    """One-sided iteration with a closed-form exit once the tail freezes.

    After each step the partition at the new iterate is frozen and the fixed
    point of the resulting linear map computed directly.  The solver returns
    that candidate, flagged ``finite_termination``, once it is consistent
    with its own partition: either it falls in the same cell, or (when the
    expectile coincides with an observation) the candidate re-derived from
    the candidate's cell agrees to rounding.  The recorded trace ends with
    the accepted candidate.
    """
    a = _require_lower_branch(alpha)
    av = a.value
    cfg = config or DEFAULT_CONFIG
    degenerate = _degenerate_result(a, d, cfg, Method.SAMPLE_ONE_SIDED)
    if degenerate is not None:
        return degenerate
    x = d.mean() if x0 is None else float(x0)
    tol = cfg.tolerance
    residual_scale = 1.0 + abs(d.mean())
    iterates = [x]
    residuals = [foc_residual(a, x, d)]
    iterations = cfg.max_iterations
    termination = Termination.MAX_ITERATIONS_HIT
    value = x
    for i in range(1, cfg.max_iterations + 1):
        x_next = sample_one_sided_map(a, d, x)
        iterates.append(x_next)
        residuals.append(foc_residual(a, x_next, d))
        k = d.count_le(x_next)
        candidate = _stable_partition_value(av, d, k)
        k_candidate = d.count_le(candidate)
        consistent = k_candidate == k or (
            abs(_stable_partition_value(av, d, k_candidate) - candidate)
            <= 1e-12 * (1.0 + abs(candidate))
        )
        if consistent:
            value = candidate
            iterations = i
            termination = Termination.FINITE_TERMINATION
            iterates.append(candidate)
            residuals.append(foc_residual(a, candidate, d))
            break
        if (
            abs(x_next - x) <= tol * max(1.0, abs(x))
            and abs(residuals[-1]) <= tol * residual_scale
        ):
            value = x_next
            iterations = i
            termination = Termination.TOLERANCE_MET
            break
        x = x_next
    else:
        value = iterates[-1]
    trace = (
        IterationTrace(tuple(iterates), tuple(residuals), Method.SAMPLE_ONE_SIDED)
        if cfg.record_trace
        else None
    )
    return ExpectileResult(
        value, a, iterations, termination, residuals[-1], trace
    )


def solve_sample_two_sided(
    alpha: float | AlphaLevel,
    d: EmpiricalDistribution,
    x0: float | None = None,
    config: SolverConfig | None = None,
) -> ExpectileResult:
    """Weighted-average iteration on a sample; at most N + 1 steps.

    The map is constant between consecutive observations, so two successive
    iterates falling in the same cell pin the fixed point exactly; otherwise
    every step after the first moves down at least one cell, and a sample of
    N points has at most N cells to move through.
    """
    a = _require_lower_branch(alpha)
    av = a.value
    cfg = config or DEFAULT_CONFIG
    degenerate = _degenerate_result(a, d, cfg, Method.SAMPLE_TWO_SIDED)
    if degenerate is not None:
        return degenerate
    n = d.count
    total = d.prefix_sums[-1]
    x = d.mean() if x0 is None else float(x0)
    k = d.count_le(x)
    tol = cfg.tolerance
    residual_scale = 1.0 + abs(d.mean())
    iterates = [x]
    residuals = [foc_residual(a, x, d)]
    iterations = cfg.max_iterations
    termination = Termination.MAX_ITERATIONS_HIT
    previous = math.nan
    for i in range(1, cfg.max_iterations + 1):
        s_lo = d.prefix_sum(k)
        s_hi = total - s_lo
        x_next = (av * s_hi + (1.0 - av) * s_lo) / (
            av * (n - k) + (1.0 - av) * k
        )
        k_next = d.count_le(x_next)
        iterates.append(x_next)
        residuals.append(foc_residual(a, x_next, d))
        if k_next == k:
            iterations = i
            termination = Termination.FINITE_TERMINATION
            break
        if x_next == previous:
            # rounding can make the iteration alternate across a breakpoint
            # when the expectile is exactly an observation; the straddled
            # observation is then the exact root
            root = d.values[min(k, k_next)]
            iterates.append(root)
            residuals.append(foc_residual(a, root, d))
            iterations = i
            termination = Termination.FINITE_TERMINATION
            break
        if (
            abs(x_next - x) <= tol * max(1.0, abs(x))
            and abs(residuals[-1]) <= tol * residual_scale
        ):
            iterations = i
            termination = Termination.TOLERANCE_MET
            break
        previous = x
        x = x_next
        k = k_next
    trace = (
        IterationTrace(tuple(iterates), tuple(residuals), Method.SAMPLE_TWO_SIDED)
        if cfg.record_trace
        else None
    )
    return ExpectileResult(
        iterates[-1], a, iterations, termination, residuals[-1], trace
    )
