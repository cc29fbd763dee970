"""Expectile computation via fixed-point iterations.

Expectiles generalize the mean the way quantiles generalize the median:
the expectile at level a minimizes an asymmetric quadratic loss.  This
package computes them through a one-sided contraction iteration, a
two-sided weighted-average iteration, exact finite-termination algorithms
for empirical samples, and an independent bisection oracle.
"""

from .api import solve
from .distributions import (
    AlphaLevel,
    AnalyticDistribution,
    DistributionOracle,
    EmpiricalDistribution,
    EmptySample,
    NonFiniteDatum,
    NormalDistribution,
    OracleEvaluation,
    PointMassDistribution,
    UniformDistribution,
    UnsupportedOracle,
    as_alpha,
    make_empirical,
)
from .maps import (
    MapEvaluation,
    asymmetric_loss,
    foc_residual,
    one_sided_evaluation,
    one_sided_map,
    residual_weight,
    two_sided_evaluation,
    two_sided_map,
    two_sided_map_quotient,
    two_sided_map_tail,
)
from .sample_solvers import (
    AlphaBranchMismatch,
    TailPartition,
    sample_one_sided_map,
    sample_two_sided_map,
    solve_sample_one_sided,
    solve_sample_two_sided,
)
from .solvers import (
    DEFAULT_CONFIG,
    BracketingFailed,
    ExpectileResult,
    IterationTrace,
    Method,
    SolverConfig,
    Termination,
    solve_bisection,
    solve_one_sided,
    solve_reflected,
    solve_two_sided,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaBranchMismatch",
    "AlphaLevel",
    "AnalyticDistribution",
    "BracketingFailed",
    "DEFAULT_CONFIG",
    "DistributionOracle",
    "EmpiricalDistribution",
    "EmptySample",
    "ExpectileResult",
    "IterationTrace",
    "MapEvaluation",
    "Method",
    "NonFiniteDatum",
    "NormalDistribution",
    "OracleEvaluation",
    "PointMassDistribution",
    "SolverConfig",
    "TailPartition",
    "Termination",
    "UniformDistribution",
    "UnsupportedOracle",
    "as_alpha",
    "asymmetric_loss",
    "foc_residual",
    "make_empirical",
    "one_sided_evaluation",
    "one_sided_map",
    "residual_weight",
    "sample_one_sided_map",
    "sample_two_sided_map",
    "solve",
    "solve_bisection",
    "solve_one_sided",
    "solve_reflected",
    "solve_sample_one_sided",
    "solve_sample_two_sided",
    "solve_two_sided",
    "two_sided_evaluation",
    "two_sided_map",
    "two_sided_map_quotient",
    "two_sided_map_tail",
]
