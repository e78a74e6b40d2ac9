import math
from fractions import Fraction

import numpy as np
import pytest

from cubeiso import appendix_partitions as ap
from cubeiso.cube_core import CubeSet, popcounts, subcube
from cubeiso.extremal_search import Partition, min_partition_functional


def test_closed_form_examples():
    assert ap.ball_moment_closed_form(2, 1).value == 0.5
    assert ap.ball_moment_closed_form(4, 0).value == 0.375
    assert ap.ball_moment_closed_form(24, 0.4).value < ap.ball_moment_closed_form(4, 0.4).value
    with pytest.raises(ValueError):
        ap.ball_moment_closed_form(5, 0.4)
    with pytest.raises(ValueError):
        ap.ball_moment_closed_form(62, 0.4)


@pytest.mark.parametrize("n", range(2, 13, 2))
@pytest.mark.parametrize("beta", [0.0, 0.3, 0.4, 0.5, 1.0])
def test_closed_form_matches_direct_moment(n, beta):
    assert ap.ball_moment_closed_form(n, beta).value == pytest.approx(ap.ball_moment_direct(n, beta), abs=1e-12)


def test_decay_table_below_one_half():
    rows = ap.decay_table(0.4)
    assert ap.decay_threshold(rows) is not None
    assert ap.decay_threshold(ap.decay_table(0.6)) is None
    values = [r.value for r in rows]
    assert values[-1] < values[0]
    assert rows[0].sphere_measure == Fraction(1, 2)


def test_half_ball_measure_is_exact():
    for n in range(1, 26, 2):
        assert ap.half_ball_measure(n) == Fraction(1, 2)
    with pytest.raises(ValueError):
        ap.half_ball_measure(4)


@pytest.mark.parametrize("n", [1, 3, 5, 7, 9])
def test_ball_partition_structure(n):
    part = ap.ball_partition(n)
    assert part.a.measure == Fraction(1, 2)
    assert part.w.cardinality == math.comb(n, (n - 1) // 2)
    assert part.cut_edges() == 0
    pc = popcounts(n)
    dist = pc[np.bitwise_xor.outer(np.array(part.a.vertices()), np.array(part.b.vertices() or [0]))]
    if part.b.cardinality:
        assert dist.min() >= 2


def test_ball_partition_n3():
    part = ap.ball_partition(3)
    assert part.a.cardinality == 4 and part.w.cardinality == 3
    assert part.functional(0.53, 1.0) == pytest.approx(3 * 3**0.53)
    check = ap.separation_lower_bound_check(part, 0.53, 1.0)
    assert check.margin == pytest.approx(3 * 3**0.53 - 4)
    assert check.margin == pytest.approx(1.37, abs=0.005)
    # h of B ∪ W vanishes on B (it only touches W) and is 1 on each W vertex here
    assert check.moment_on_b == 0
    assert check.moment_on_w == pytest.approx(3 * 2**0.53 / 8)
    with pytest.raises(ValueError):
        ap.ball_partition(4)


def test_separation_check_half_cube():
    n = 4
    a = subcube(n, 1)
    part = Partition(a, a.complement(), CubeSet.empty(n))
    assert ap.separation_lower_bound_check(part, 0.53, 1.0).margin == 0
    bad = Partition(subcube(n, 2), subcube(n, 2).complement(), CubeSet.empty(n))
    with pytest.raises(ValueError):
        ap.separation_lower_bound_check(bad, 0.53, 1.0)


def test_exhaustive_partition_margin_nonnegative():
    value, part = min_partition_functional(4, 0.53, 1.0)
    assert ap.separation_lower_bound_check(part, 0.53, 1.0).margin >= 0
    assert value == 8


def test_wall_ratio_table():
    rows = ap.ratio_table(0.4)
    assert [r["n"] for r in rows] == list(range(1, 26, 2))
    assert rows[1]["ratio"] == pytest.approx(3 * 3**0.4 / 4)
    # at a small exponent the ball partition beats the half-cube for large n
    assert min(r["ratio"] for r in ap.ratio_table(0.1)) < 1
