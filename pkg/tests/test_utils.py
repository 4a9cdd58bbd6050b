# tests/test_utils.py
from __future__ import annotations

from fractions import Fraction

from utils import compression_ratio, fmt_fraction, fmt_ratio


def test_fmt_fraction():
    assert fmt_fraction(Fraction(5, 6)) == "0.833333333333 (5/6)"
    assert fmt_fraction(Fraction(4, 2)) == "2"
    assert fmt_fraction(Fraction(3, 2), 1) == "1.5 (3/2)"


def test_compression_ratio():
    assert compression_ratio(5, 10) == 0.5
    assert compression_ratio(0, 0) is None
    assert fmt_ratio(5, 9) == "55.6%"
    assert fmt_ratio(1, 0) == "—"
