"""
Exact moment accumulation for Monte Carlo statistics.

Samples are integers that can span tens of orders of magnitude, so sums and sums of
squares are kept as Python ints and every derived statistic is an exact Fraction
until it is rendered.
"""

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Optional

from core.numbers import exact_sqrt


@dataclass
class MomentAccumulator:
    """
    Running n, sum, sum of squares, min and max of integer samples.

    Merging is associative and commutative, so per-worker accumulators can be combined
    in any order without changing a digit.
    """
    n: int = 0
    sum: int = 0
    sum_sq: int = 0
    min: Optional[int] = None
    max: Optional[int] = None

    def add(self, x: int) -> None:
        self.n += 1
        self.sum += x
        self.sum_sq += x * x
        if self.min is None or x < self.min:
            self.min = x
        if self.max is None or x > self.max:
            self.max = x

    def extend(self, values: Iterable[int]) -> "MomentAccumulator":
        for x in values:
            self.add(x)
        return self

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """Return a new accumulator holding both sample sets."""
        mins = [m for m in (self.min, other.min) if m is not None]
        maxs = [m for m in (self.max, other.max) if m is not None]
        return MomentAccumulator(
            n=self.n + other.n,
            sum=self.sum + other.sum,
            sum_sq=self.sum_sq + other.sum_sq,
            min=min(mins) if mins else None,
            max=max(maxs) if maxs else None,
        )

    @property
    def mean(self) -> Fraction:
        if self.n == 0:
            raise ValueError("mean of an empty sample")
        return Fraction(self.sum, self.n)

    @property
    def variance(self) -> Fraction:
        """Unbiased sample variance (sum_sq - sum^2/n) / (n - 1); zero for n == 1."""
        if self.n == 0:
            raise ValueError("variance of an empty sample")
        if self.n == 1:
            return Fraction(0)
        return Fraction(self.n * self.sum_sq - self.sum * self.sum, self.n * (self.n - 1))

    @property
    def mean_variance(self) -> Fraction:
        """Squared standard error of the mean."""
        return self.variance / self.n

    def stddev(self) -> Decimal:
        return exact_sqrt(self.variance)

    def stderr(self) -> Decimal:
        return exact_sqrt(self.mean_variance)


def merge_all(accumulators: Iterable[MomentAccumulator]) -> MomentAccumulator:
    total = MomentAccumulator()
    for acc in accumulators:
        total = total.merge(acc)
    return total
