"""Hamming-ball constructions: moment decay for small exponents and ball partitions.

For even ``n`` the ball ``B(0, n/2)`` has ``h = n/2`` on the sphere ``S(0, n/2)`` and zero
elsewhere, so ``E h^beta = (n/2)^beta * C(n, n/2) / 2^n``. For ``beta < 1/2`` this tends
to 0 while the measure stays near 1/2, so no bound of the form ``E h^beta >= c`` at
measure 1/2 can hold below exponent 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cube_core import CubeSet, check_dimension, h_profile, hamming_ball, hamming_sphere, moment, power_table
from .extremal_search import Partition

CLOSED_FORM_MAX_N = 60


@dataclass(frozen=True)
class DecayRow:
    n: int
    beta: float
    sphere_count: int  # C(n, n/2)
    value: float

    @property
    def sphere_measure(self) -> Fraction:
        return Fraction(self.sphere_count, 1 << self.n)

    def to_dict(self) -> dict:
        return {"n": self.n, "beta": self.beta, "sphere_count": self.sphere_count, "value": self.value}


def ball_moment_closed_form(n: int, beta: float) -> DecayRow:
    """``(n/2)^beta * C(n, n/2) / 2^n`` with the binomial in exact integers."""
    if n <= 0 or n % 2:
        raise ValueError("closed form needs even n >= 2")
    if n > CLOSED_FORM_MAX_N:
        raise ValueError(f"closed form supports n <= {CLOSED_FORM_MAX_N}")
    count = math.comb(n, n // 2)
    return DecayRow(n, beta, count, (n / 2) ** beta * float(Fraction(count, 1 << n)))


def ball_moment_direct(n: int, beta: float) -> float:
    return moment(hamming_ball(n, 0, n / 2), beta).value


def decay_table(beta: float, ns=range(2, CLOSED_FORM_MAX_N + 1, 2)) -> list[DecayRow]:
    return [ball_moment_closed_form(n, beta) for n in ns]


def decay_threshold(rows: list[DecayRow]) -> int | None:
    """Smallest ``n`` in the table after which the values strictly decrease, or None."""
    start = None
    for prev, row in zip(rows, rows[1:]):
        if row.value < prev.value:
            start = prev.n if start is None else start
        else:
            start = None
    return start


def ball_partition(n: int, center: int = 0) -> Partition:
    """``A = B(a, (n-1)/2)``, ``W = S(a, (n+1)/2)`` and ``B`` the rest, for odd ``n``."""
    check_dimension(n)
    if n % 2 == 0:
        raise ValueError("ball partition needs odd n")
    a = hamming_ball(n, center, (n - 1) // 2)
    w = hamming_sphere(n, center, (n + 1) // 2)
    b = CubeSet(n, CubeSet.full(n).mask & ~(a.mask | w.mask))
    return Partition(a, b, w)


def half_ball_measure(n: int) -> Fraction:
    """``mu(B(a, (n-1)/2))`` in exact arithmetic; equal to 1/2 for odd ``n``."""
    if n % 2 == 0:
        raise ValueError("needs odd n")
    return Fraction(sum(math.comb(n, k) for k in range((n + 1) // 2)), 1 << n)


def wall_ratio(n: int, beta: float, K: float = 1.0) -> float:
    """``K |W| n^beta / 2^(n-1)`` for the ball partition, using ``|W| = C(n, (n+1)/2)``."""
    if n % 2 == 0:
        raise ValueError("needs odd n")
    return K * math.comb(n, (n + 1) // 2) * n**beta / 2 ** (n - 1)


def ratio_table(beta: float, K: float = 1.0, ns=range(1, 26, 2)) -> list[dict]:
    return [{"n": n, "beta": beta, "K": K, "ratio": wall_ratio(n, beta, K)} for n in ns]


@dataclass(frozen=True)
class SeparationCheck:
    n: int
    beta: float
    K: float
    cut_edges: int
    wall_size: int
    margin: float
    moment_on_b: float
    moment_on_w: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def separation_lower_bound_check(partition: Partition, beta: float, K: float) -> SeparationCheck:
    """``|∇(A,B)| + K n^beta |W| - 2^(n-1)`` and the split of ``E h_{B∪W}^beta`` over ``B`` and ``W``.

    Requires ``mu(A) = 1/2``.
    """
    n = partition.n
    if partition.a.cardinality * 2 != 1 << n:
        raise ValueError("separation check needs mu(A) = 1/2")
    cut = partition.cut_edges()
    wall = partition.w.cardinality
    rest = partition.a.complement()
    prof = moment_split(rest, partition.b, partition.w, beta)
    return SeparationCheck(
        n=n,
        beta=beta,
        K=K,
        cut_edges=cut,
        wall_size=wall,
        margin=cut + K * n**beta * wall - 2 ** (n - 1),
        moment_on_b=prof[0],
        moment_on_w=prof[1],
    )


def moment_split(S: CubeSet, part1: CubeSet, part2: CubeSet, beta: float) -> tuple[float, float]:
    """``E h_S^beta 1_{part}`` for two pieces of ``S``."""
    n = S.n
    values = h_profile(S).values
    table = power_table(n, beta)
    out = []
    for part in (part1, part2):
        sel = values[part.members()]
        out.append(math.fsum(table[sel].tolist()) / (1 << n))
    return out[0], out[1]


__all__ = [
    "DecayRow",
    "SeparationCheck",
    "ball_moment_closed_form",
    "ball_moment_direct",
    "ball_partition",
    "decay_table",
    "decay_threshold",
    "half_ball_measure",
    "moment_split",
    "ratio_table",
    "separation_lower_bound_check",
    "wall_ratio",
]
