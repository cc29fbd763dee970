"""Scalar fixed-point maps and the first-order condition behind expectiles.

For level ``a`` the expectile of X is the minimizer of the asymmetric
quadratic loss ``(1-a) E(X-x)-^2 + a E(X-x)+^2``; setting its derivative to
zero gives the first-order-condition (FOC) residual

    r(x) = a E(X - x)+ - (1 - a) E(X - x)-

whose unique root is the expectile.  Two fixed-point rearrangements follow:

* one-sided: eliminate one partial moment via E(X-x)+ - E(X-x)- = E X - x.
  The resulting map is a contraction with ratio (1 - 2a)/(1 - a) below
  level 1/2, mirrored to (2a - 1)/a above it.
* two-sided: divide the residual by the probability weight
  w(x) = a P(X > x) + (1 - a) P(X <= x), giving the step x + r(x)/w(x).
  The same value is an a-weighted average of the two tail contributions;
  the increment form is evaluated here because it stays exact at the fixed
  point, while the weighted-average quotient cancels catastrophically for
  large |x|.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distributions import (
    AlphaLevel,
    DistributionOracle,
    OracleEvaluation,
    as_alpha,
)

__all__ = [
    "MapEvaluation",
    "asymmetric_loss",
    "foc_residual",
    "one_sided_evaluation",
    "one_sided_map",
    "residual_weight",
    "two_sided_evaluation",
    "two_sided_map",
    "two_sided_map_quotient",
    "two_sided_map_tail",
]


@dataclass(frozen=True)
class MapEvaluation:
    """One map application: input point, mapped value and diagnostics.

    ``weight`` always lies in [min(a, 1-a), max(a, 1-a)], so the two-sided
    step is well defined everywhere.
    """

    x: float
    value: float
    residual: float
    weight: float


def _residual(ev: OracleEvaluation, a: float) -> float:
    return a * ev.upm - (1.0 - a) * ev.lpm


def _weight(ev: OracleEvaluation, a: float) -> float:
    return a * ev.survival + (1.0 - a) * ev.cdf


def foc_residual(
    alpha: float | AlphaLevel, x: float, d: DistributionOracle
) -> float:
    """a E(X-x)+ - (1-a) E(X-x)-, decreasing in x and zero at the expectile."""
    return _residual(d.evaluate(x), as_alpha(alpha).value)


def residual_weight(
    alpha: float | AlphaLevel, x: float, d: DistributionOracle
) -> float:
    """a P(X > x) + (1-a) P(X <= x), the denominator of the two-sided step."""
    return _weight(d.evaluate(x), as_alpha(alpha).value)


def asymmetric_loss(
    alpha: float | AlphaLevel, x: float, d: DistributionOracle
) -> float:
    """Asymmetric quadratic loss (1-a) E(X-x)-^2 + a E(X-x)+^2.

    A testing oracle rather than a hot path: for laws with a finite second
    moment the expectile is this function's unique minimizer.  Raises
    :class:`UnsupportedOracle` when the oracle has no second partial
    moments.
    """
    a = as_alpha(alpha).value
    upper2, lower2 = d.second_partial_moments(x)
    return (1.0 - a) * lower2 + a * upper2


def one_sided_evaluation(
    alpha: float | AlphaLevel, x: float, d: DistributionOracle
) -> MapEvaluation:
    """Apply the one-sided contraction, with residual and weight at ``x``."""
    a = as_alpha(alpha).value
    ev = d.evaluate(x)
    m = d.mean()
    if a == 0.5:
        value = m
    elif a < 0.5:
        value = m + (2.0 * a - 1.0) / (1.0 - a) * ev.upm
    else:
        value = m + (2.0 * a - 1.0) / a * ev.lpm
    return MapEvaluation(x, value, _residual(ev, a), _weight(ev, a))


def one_sided_map(
    alpha: float | AlphaLevel, x: float, d: DistributionOracle
) -> float:
    """Contraction whose unique fixed point is the expectile of ``d``."""
    return one_sided_evaluation(alpha, x, d).value


def two_sided_evaluation(
    alpha: float | AlphaLevel, x: float, d: DistributionOracle
) -> MapEvaluation:
    """Apply the two-sided map x + r(x)/w(x), with residual and weight."""
    a = as_alpha(alpha).value
    ev = d.evaluate(x)
    r = _residual(ev, a)
    w = _weight(ev, a)
    value = d.mean() if a == 0.5 else x + r / w
    if __debug__:
        m = d.mean()
        quotient = (a * ev.upe + (1.0 - a) * (m - ev.upe)) / w
        amplitude = abs(ev.upe) + abs(m - ev.upe)
        assert abs(quotient - value) <= 1e-12 * (
            1.0 + abs(x) + amplitude / w
        ), "two-sided map forms diverged"
    return MapEvaluation(x, value, r, w)


def two_sided_map(
    alpha: float | AlphaLevel, x: float, d: DistributionOracle
) -> float:
    """Two-sided fixed-point map; equals the expectile exactly at its root."""
    return two_sided_evaluation(alpha, x, d).value


def two_sided_map_quotient(
    alpha: float | AlphaLevel, x: float, d: DistributionOracle
) -> float:
    """Weighted-average form (a E[X 1{X>x}] + (1-a) E[X 1{X<=x}]) / w(x).

    Algebraically identical to :func:`two_sided_map`; kept as a cross-check
    because it loses precision near the fixed point for large thresholds.
    """
    a = as_alpha(alpha).value
    ev = d.evaluate(x)
    m = d.mean()
    return (a * ev.upe + (1.0 - a) * (m - ev.upe)) / _weight(ev, a)


def two_sided_map_tail(
    alpha: float | AlphaLevel, x: float, d: DistributionOracle
) -> float:
    """Tail-anchored rearrangement of the two-sided map.

    ((2a-1) E[X 1{X>x}] + (1-a) E X) / ((2a-1) P(X > x) + 1 - a); the third
    algebraically equivalent form, exercised by the equivalence tests.
    """
    a = as_alpha(alpha).value
    ev = d.evaluate(x)
    num = (2.0 * a - 1.0) * ev.upe + (1.0 - a) * d.mean()
    den = (2.0 * a - 1.0) * ev.survival + (1.0 - a)
    return num / den
