"""Exact arithmetic in the field Q(√2) and polynomials over it."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction, "QSqrt2"]


@total_ordering
class QSqrt2:
    """The number ``a + b√2`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a: int | Fraction = 0, b: int | Fraction = 0) -> None:
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def coerce(cls, x: Number) -> QSqrt2:
        if isinstance(x, QSqrt2):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        return NotImplemented

    def __repr__(self) -> str:
        return f"QSqrt2({self.a}, {self.b})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt2"

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __eq__(self, other: object) -> bool:
        other = QSqrt2.coerce(other)  # type: ignore[arg-type]
        if other is NotImplemented:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def sign(self) -> int:
        """Exact sign of ``a + b√2``, decided by comparing ``a**2`` and ``2 b**2``."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: the term with larger square wins
        lead = a * a - 2 * b * b
        if lead == 0:
            return 0  # unreachable for rationals, since √2 is irrational
        return (1 if a > 0 else -1) if lead > 0 else (1 if b > 0 else -1)

    def __lt__(self, other: Number) -> bool:
        return (self - other).sign() < 0

    def __add__(self, other: Number) -> QSqrt2:
        other = QSqrt2.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QSqrt2(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self) -> QSqrt2:
        return QSqrt2(-self.a, -self.b)

    def __sub__(self, other: Number) -> QSqrt2:
        other = QSqrt2.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QSqrt2(self.a - other.a, self.b - other.b)

    def __rsub__(self, other: Number) -> QSqrt2:
        return -self + other

    def __mul__(self, other: Number) -> QSqrt2:
        other = QSqrt2.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QSqrt2(self.a * other.a + 2 * self.b * other.b, self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def conjugate(self) -> QSqrt2:
        return QSqrt2(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 2 * self.b * self.b

    def inverse(self) -> QSqrt2:
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt2)")
        c = self.conjugate()
        return QSqrt2(c.a / nrm, c.b / nrm)

    def __truediv__(self, other: Number) -> QSqrt2:
        other = QSqrt2.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: Number) -> QSqrt2:
        return QSqrt2.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> QSqrt2:
        if k < 0:
            return self.inverse() ** (-k)
        out, base = QSqrt2(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * 2**0.5


SQRT2 = QSqrt2(0, 1)


class Poly:
    """Polynomial with Q(√2) coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number]) -> None:
        cs = [QSqrt2.coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[QSqrt2, ...] = tuple(cs)

    @classmethod
    def x(cls) -> Poly:
        return cls([0, 1])

    @classmethod
    def const(cls, c: Number) -> Poly:
        return cls([c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            other = Poly.const(other)  # type: ignore[arg-type]
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    @staticmethod
    def _lift(other) -> Poly:
        return other if isinstance(other, Poly) else Poly.const(other)

    def __add__(self, other) -> Poly:
        other = Poly._lift(other)
        size = max(len(self.coeffs), len(other.coeffs))
        zero = QSqrt2(0)
        return Poly(
            (self.coeffs[i] if i < len(self.coeffs) else zero) + (other.coeffs[i] if i < len(other.coeffs) else zero)
            for i in range(size)
        )

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> Poly:
        return self + (-Poly._lift(other))

    def __rsub__(self, other) -> Poly:
        return Poly._lift(other) - self

    def __mul__(self, other) -> Poly:
        other = Poly._lift(other)
        if not self.coeffs or not other.coeffs:
            return Poly([])
        out = [QSqrt2(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        """Horner evaluation; works for QSqrt2, Fraction, int, float and Poly arguments."""
        if isinstance(x, float):
            acc = 0.0
            for c in reversed(self.coeffs):
                acc = acc * x + float(c)
            return acc
        acc = Poly([]) if isinstance(x, Poly) else QSqrt2(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> Poly:
        return Poly(c * i for i, c in enumerate(self.coeffs) if i > 0)

    def divmod(self, divisor: Poly) -> tuple[Poly, Poly]:
        if not divisor.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [QSqrt2(0)] * max(0, len(rem) - len(divisor.coeffs) + 1)
        lead = divisor.coeffs[-1]
        for shift in range(len(quot) - 1, -1, -1):
            c = rem[shift + len(divisor.coeffs) - 1] / lead
            quot[shift] = c
            for i, d in enumerate(divisor.coeffs):
                rem[shift + i] = rem[shift + i] - c * d
        return Poly(quot), Poly(rem)


def poly_from_roots(lead: Number, roots: Sequence[Number]) -> Poly:
    out = Poly.const(lead)
    for r in roots:
        out = out * Poly([-QSqrt2.coerce(r), 1])
    return out
