# census/series.py
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

Number = Union[int, Fraction]


@dataclass(frozen=True)
class TruncatedSeries:
    """
    Power series c_0 + c_1 z + ... + c_order z^order with exact rational
    coefficients. Arithmetic drops everything above the smaller order.
    """

    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise ValueError("a series keeps at least its constant term")
        object.__setattr__(self, "coefficients", tuple(Fraction(c) for c in self.coefficients))

    @classmethod
    def from_terms(cls, terms: Mapping[int, Number], order: int) -> TruncatedSeries:
        """Polynomial given as {exponent: coefficient}; terms above `order` are dropped."""
        if order < 0:
            raise ValueError("order must be >= 0")
        coeffs = [Fraction(0)] * (order + 1)
        for k, c in terms.items():
            if k < 0:
                raise ValueError("negative exponents are not series terms")
            if k <= order:
                coeffs[k] += c
        return cls(tuple(coeffs))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, n: int) -> Fraction:
        if not 0 <= n <= self.order:
            raise IndexError(f"coefficient {n} outside 0..{self.order}")
        return self.coefficients[n]

    def _pair(self, other: TruncatedSeries) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        n = min(self.order, other.order) + 1
        return self.coefficients[:n], other.coefficients[:n]

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        a, b = self._pair(other)
        return TruncatedSeries(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        a, b = self._pair(other)
        return TruncatedSeries(tuple(x - y for x, y in zip(a, b)))

    def __mul__(self, other: TruncatedSeries | Number) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(tuple(c * other for c in self.coefficients))
        a, b = self._pair(other)
        out = [Fraction(0)] * len(a)
        for i, x in enumerate(a):
            if x:
                for j in range(len(a) - i):
                    out[i + j] += x * b[j]
        return TruncatedSeries(tuple(out))

    __rmul__ = __mul__

    def divide_by_z(self, k: int) -> TruncatedSeries:
        """Exact division by z^k; the order drops by k."""
        if not 0 <= k <= self.order:
            raise ValueError(f"cannot divide a series of order {self.order} by z^{k}")
        if any(self.coefficients[:k]):
            raise ValueError(f"series is not divisible by z^{k}")
        return TruncatedSeries(self.coefficients[k:])

    def sqrt(self) -> TruncatedSeries:
        """
        The series y with y^2 = self and y_0 = 1, from
        2 y_0 y_k = c_k - sum(y_i y_(k-i) for 0 < i < k).
        """
        if self.coefficients[0] != 1:
            raise ValueError("square roots need constant term 1")
        c = self.coefficients
        y = [Fraction(1)]
        for k in range(1, len(c)):
            acc = c[k]
            for i in range(1, k):
                acc -= y[i] * y[k - i]
            y.append(acc / 2)
        return TruncatedSeries(tuple(y))

    @property
    def valuation(self) -> int | None:
        """Exponent of the first non-zero coefficient, None for the zero series."""
        for k, c in enumerate(self.coefficients):
            if c:
                return k
        return None

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients)

    def integers(self) -> tuple[int, ...]:
        if not self.is_integral:
            raise ValueError("series has non-integer coefficients")
        return tuple(int(c) for c in self.coefficients)
