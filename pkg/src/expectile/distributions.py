"""Distribution oracles supplying the expectations expectile formulas consume.

Every solver in this package is written against :class:`DistributionOracle`,
which answers five questions about a law at an arbitrary threshold ``x``:

====================  =================================
``upm``               upper partial moment, E(X - x)+
``lpm``               lower partial moment, E(X - x)-
``survival``          P(X > x)
``cdf``               P(X <= x)
``upe``               upper partial expectation, E[X 1{X > x}]
====================  =================================

Tie convention everywhere: the upper tail is strict (``X > x``), the lower
tail inclusive (``X <= x``).  Implementations: an empirical sample backed by
prefix sums (one binary search per query) and three analytic families
(normal, uniform, point mass).

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, NamedTuple

__all__ = [
    "AlphaLevel",
    "AnalyticDistribution",
    "DistributionOracle",
    "EmpiricalDistribution",
    "EmptySample",
    "NonFiniteDatum",
    "NormalDistribution",
    "OracleEvaluation",
    "PointMassDistribution",
    "UniformDistribution",
    "UnsupportedOracle",
    "as_alpha",
    "make_empirical",
]

_SQRT_2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class EmptySample(ValueError):
    """An empirical distribution was requested from zero observations."""


class NonFiniteDatum(ValueError):
    """Sample data contained a NaN or an infinity."""


class UnsupportedOracle(TypeError):
    """The oracle cannot supply a capability the operation requires."""


@dataclass(frozen=True)
class AlphaLevel:
    """Asymmetry level of an expectile, strictly between 0 and 1.

    Level 0.5 gives the plain mean; levels below 0.5 penalize the lower
    tail more, levels above 0.5 the upper tail.
    """

    value: float

    def __post_init__(self) -> None:
        v = self.value
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValueError(f"alpha must be a real number, got {v!r}")
        if not math.isfinite(v):
            raise ValueError(f"alpha must be finite, got {v!r}")
        if not 0.0 < v < 1.0:
            raise ValueError(f"alpha must lie strictly inside (0, 1), got {v}")
        object.__setattr__(self, "value", float(v))

    @property
    def complement(self) -> float:
        return 1.0 - self.value


def as_alpha(alpha: float | AlphaLevel) -> AlphaLevel:
    """Coerce a bare number to a validated :class:`AlphaLevel`."""
    if isinstance(alpha, AlphaLevel):
        return alpha
    return AlphaLevel(float(alpha))


class OracleEvaluation(NamedTuple):
    """All five tail quantities of an oracle at a single threshold."""

    upm: float
    lpm: float
    survival: float
    cdf: float
    upe: float


class DistributionOracle(ABC):
    """Provider of the tail expectations the expectile maps are built from."""

    @abstractmethod
    def mean(self) -> float:
        """E X."""

    @abstractmethod
    def evaluate(self, x: float) -> OracleEvaluation:
        """All five tail quantities at threshold ``x`` in one call."""

    @abstractmethod
    def negated(self) -> "DistributionOracle":
        """The law of -X, with tie handling mirrored exactly.

        Negation swaps the roles of the tails: P(-X > x) counts the mass
        strictly below -x, so implementations must preserve atom placement.
        """

    def upper_partial_moment(self, x: float) -> float:
        return self.evaluate(x).upm

    def lower_partial_moment(self, x: float) -> float:
        return self.evaluate(x).lpm

    def survival(self, x: float) -> float:
        return self.evaluate(x).survival

    def cdf(self, x: float) -> float:
        return self.evaluate(x).cdf

    def upper_partial_expectation(self, x: float) -> float:
        return self.evaluate(x).upe

    def support_bounds(self) -> tuple[float, float] | None:
        """Essential range (lower, upper), or None when unbounded."""
        return None

    def second_partial_moments(self, x: float) -> tuple[float, float]:
        """(E(X - x)+^2, E(X - x)-^2), the optional loss-oracle capability."""
        raise UnsupportedOracle(
            f"{type(self).__name__} does not provide second partial moments"
        )


@dataclass(frozen=True)
class EmpiricalDistribution(DistributionOracle):
    """Sorted sample with prefix sums; every query costs one binary search.

    ``prefix_sums[k]`` holds ``values[0] + ... + values[k]`` accumulated
    left to right, so tail sums are differences of stored partials and
    results reproduce a plain sorted-order summation bit for bit.
    Duplicates keep their multiplicity.
    """

    values: tuple[float, ...]
    prefix_sums: tuple[float, ...]
    count: int

    def mean(self) -> float:
        # constant samples: accumulation can land an ulp off the value,
        # whose exact mean the constant is
        if self.values[0] == self.values[-1]:
            return self.values[0]
        return self.prefix_sums[-1] / self.count

    def count_le(self, x: float) -> int:
        """Number of observations at or below ``x``."""
        return bisect_right(self.values, x)

    def count_lt(self, x: float) -> int:
        """Number of observations strictly below ``x``."""
        return bisect_left(self.values, x)

    def prefix_sum(self, k: int) -> float:
        """Sum of the ``k`` smallest observations."""
        return self.prefix_sums[k - 1] if k > 0 else 0.0

    def tail_sum(self, k: int) -> float:
        """Sum of the observations above the ``k`` smallest."""
        return self.prefix_sums[-1] - self.prefix_sum(k)

    def evaluate(self, x: float) -> OracleEvaluation:
        n = self.count
        k = bisect_right(self.values, x)
        survival = (n - k) / n
        cdf = k / n
        upe = (self.prefix_sums[-1] - self.prefix_sum(k)) / n
        upm = upe - x * survival
        lpm = upm - self.mean() + x
        return OracleEvaluation(upm, lpm, survival, cdf, upe)

    def support_bounds(self) -> tuple[float, float]:
        return (self.values[0], self.values[-1])

    def negated(self) -> "EmpiricalDistribution":
        return make_empirical([-v for v in self.values])

    def second_partial_moments(self, x: float) -> tuple[float, float]:
        k = self.count_le(x)
        upper = 0.0
        for v in self.values[k:]:
            upper += (v - x) * (v - x)
        lower = 0.0
        for v in self.values[:k]:
            lower += (x - v) * (x - v)
        return upper / self.count, lower / self.count


def make_empirical(data: Iterable[float]) -> EmpiricalDistribution:
    """Sort, validate and prefix-sum raw observations."""
    values = [float(v) for v in data]
    if not values:
        raise EmptySample("need at least one observation")
    for v in values:
        if not math.isfinite(v):
            raise NonFiniteDatum(f"observation {v!r} is not finite")
    values.sort()
    running = 0.0
    prefix = []
    for v in values:
        running += v
        prefix.append(running)
    return EmpiricalDistribution(tuple(values), tuple(prefix), len(values))


@dataclass(frozen=True)
class NormalDistribution(DistributionOracle):
    """Gaussian law with mean ``mu`` and standard deviation ``sigma`` > 0.

    Partial moments in closed form: with t = (x - mu)/sigma, phi the
    standard normal density and S the standard survival function,

        E(X - x)+ = sigma * phi(t) + (mu - x) * S(t).
    """

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise ValueError("normal parameters must be finite")
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def mean(self) -> float:
        return self.mu

    def evaluate(self, x: float) -> OracleEvaluation:
        t = (x - self.mu) / self.sigma
        survival = 0.5 * math.erfc(t / _SQRT_2)
        cdf = 0.5 * math.erfc(-t / _SQRT_2)
        density = _INV_SQRT_2PI * math.exp(-0.5 * t * t)
        upm = self.sigma * density + (self.mu - x) * survival
        lpm = upm - (self.mu - x)
        upe = upm + x * survival
        return OracleEvaluation(upm, lpm, survival, cdf, upe)

    def negated(self) -> "NormalDistribution":
        return NormalDistribution(-self.mu, self.sigma)

    def second_partial_moments(self, x: float) -> tuple[float, float]:
        t = (x - self.mu) / self.sigma
        survival = 0.5 * math.erfc(t / _SQRT_2)
        cdf = 0.5 * math.erfc(-t / _SQRT_2)
        density = _INV_SQRT_2PI * math.exp(-0.5 * t * t)
        s2 = self.sigma * self.sigma
        upper = s2 * ((1.0 + t * t) * survival - t * density)
        lower = s2 * ((1.0 + t * t) * cdf + t * density)
        # extreme-tail cancellation can round a vanishing moment negative
        return max(upper, 0.0), max(lower, 0.0)


@dataclass(frozen=True)
class UniformDistribution(DistributionOracle):
    """Uniform law on the interval [lower, upper]."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError("uniform bounds must be finite")
        if not self.lower < self.upper:
            raise ValueError(
                f"need lower < upper, got [{self.lower}, {self.upper}]"
            )

    def mean(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def evaluate(self, x: float) -> OracleEvaluation:
        a, b = self.lower, self.upper
        if x <= a:
            survival, cdf, upm = 1.0, 0.0, self.mean() - x
        elif x >= b:
            survival, cdf, upm = 0.0, 1.0, 0.0
        else:
            width = b - a
            survival = (b - x) / width
            cdf = (x - a) / width
            upm = (b - x) * (b - x) / (2.0 * width)
        lpm = upm - (self.mean() - x)
        upe = upm + x * survival
        return OracleEvaluation(upm, lpm, survival, cdf, upe)

    def support_bounds(self) -> tuple[float, float]:
        return (self.lower, self.upper)

    def negated(self) -> "UniformDistribution":
        return UniformDistribution(-self.upper, -self.lower)

    def second_partial_moments(self, x: float) -> tuple[float, float]:
        a, b = self.lower, self.upper
        w3 = 3.0 * (b - a)
        if x <= a:
            upper = ((b - x) ** 3 - (a - x) ** 3) / w3
        elif x < b:
            upper = (b - x) ** 3 / w3
        else:
            upper = 0.0
        if x >= b:
            lower = ((x - a) ** 3 - (x - b) ** 3) / w3
        elif x > a:
            lower = (x - a) ** 3 / w3
        else:
            lower = 0.0
        return upper, lower


@dataclass(frozen=True)
class PointMassDistribution(DistributionOracle):
    """Degenerate law concentrated at a single point."""

    location: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.location):
            raise ValueError("point mass location must be finite")

    def mean(self) -> float:
        return self.location

    def evaluate(self, x: float) -> OracleEvaluation:
        c = self.location
        if c > x:
            return OracleEvaluation(c - x, 0.0, 1.0, 0.0, c)
        return OracleEvaluation(0.0, x - c, 0.0, 1.0, 0.0)

    def support_bounds(self) -> tuple[float, float]:
        return (self.location, self.location)

    def negated(self) -> "PointMassDistribution":
        return PointMassDistribution(-self.location)

    def second_partial_moments(self, x: float) -> tuple[float, float]:
        d = self.location - x
        if d > 0.0:
            return d * d, 0.0
        return 0.0, d * d


AnalyticDistribution = (
    NormalDistribution | UniformDistribution | PointMassDistribution
)
