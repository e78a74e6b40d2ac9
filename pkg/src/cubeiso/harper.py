"""Exact minimum edge boundary at fixed cardinality (Harper's theorem)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cube_core import CubeSet, check_dimension, edge_boundary


def digit_sum(j: int) -> int:
    """Number of ones in the binary expansion of ``j``."""
    if j < 0:
        raise ValueError("digit_sum is defined for non-negative integers")
    return j.bit_count()


@dataclass(frozen=True)
class HarperValue:
    n: int
    m: int
    numerator: int

    @property
    def exact(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.n)

    @property
    def value(self) -> float:
        return self.numerator / (1 << self.n)

    @property
    def t(self) -> Fraction:
        return Fraction(self.m, 1 << self.n)


def _check_m(n: int, m: int) -> None:
    check_dimension(n)
    if not 0 <= m <= 1 << n:
        raise ValueError(f"cardinality must satisfy 0 <= m <= 2**n, got m={m}, n={n}")


def harper_min(n: int, m: int) -> HarperValue:
    """``min_{|A|=m} |∇A|`` as ``n*m - 2 * sum_{j<m} s(j)`` over ``2**n``."""
    _check_m(n, m)
    inner = sum(j.bit_count() for j in range(1, m))
    return HarperValue(n, m, n * m - 2 * inner)


def harper_table(n: int) -> list[HarperValue]:
    """All ``harper_min(n, m)`` for ``m = 0..2**n`` with a running digit sum."""
    check_dimension(n)
    rows = []
    inner = 0
    for m in range(0, (1 << n) + 1):
        if m >= 2:
            inner += (m - 1).bit_count()
        rows.append(HarperValue(n, m, n * m - 2 * inner))
    return rows


def harper_set(n: int, m: int) -> CubeSet:
    """Initial segment ``{0, ..., m-1}``; its boundary is checked against the formula."""
    _check_m(n, m)
    A = CubeSet(n, (1 << m) - 1)
    expected = harper_min(n, m).numerator
    got = edge_boundary(A)
    if got != expected:
        raise RuntimeError(f"initial segment boundary {got} != Harper value {expected} (n={n}, m={m})")
    return A
