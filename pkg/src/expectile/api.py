"""Single entry point dispatching to the five solver routes."""

from __future__ import annotations

from .distributions import (
    AlphaLevel,
    DistributionOracle,
    EmpiricalDistribution,
    UnsupportedOracle,
    as_alpha,
)
from .sample_solvers import solve_sample_one_sided, solve_sample_two_sided
from .solvers import (
    DEFAULT_CONFIG,
    ExpectileResult,
    Method,
    SolverConfig,
    Termination,
    _mean_result,
    solve_bisection,
    solve_one_sided,
    solve_reflected,
    solve_two_sided,
)

__all__ = ["solve"]


def solve(
    alpha: float | AlphaLevel,
    d: DistributionOracle,
    method: Method | str = Method.TWO_SIDED,
    x0: float | None = None,
    config: SolverConfig | None = None,
) -> ExpectileResult:
    """Compute the expectile of ``d`` at the given level with one method.

    Sample methods require an :class:`EmpiricalDistribution`.  Levels above
    1/2 are routed through the negated distribution for the two-sided and
    sample methods; level 1/2 returns the mean directly.  ``x0`` defaults to
    the mean and is ignored by bisection.
    """
    m = Method(method)
    a = as_alpha(alpha)
    cfg = config or DEFAULT_CONFIG
    if m is Method.ONE_SIDED:
        return solve_one_sided(a, d, x0=x0, config=cfg)
    if m is Method.TWO_SIDED:
        return solve_two_sided(a, d, x0=x0, config=cfg)
    if m is Method.BISECTION:
        return solve_bisection(a, d, config=cfg)
    if not isinstance(d, EmpiricalDistribution):
        raise UnsupportedOracle(
            f"{m.value} requires an empirical distribution, "
            f"got {type(d).__name__}"
        )
    inner = (
        solve_sample_one_sided
        if m is Method.SAMPLE_ONE_SIDED
        else solve_sample_two_sided
    )
    if a.value == 0.5:
        start = d.mean() if x0 is None else float(x0)
        return _mean_result(a, d, start, cfg, m, Termination.FINITE_TERMINATION)
    if a.value > 0.5:
        return solve_reflected(a, d, x0=x0, config=cfg, inner=inner)
    return inner(a, d, x0=x0, config=cfg)
