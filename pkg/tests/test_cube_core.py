import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeiso.cube_core import (
    CubeSet,
    Side,
    batch_moments,
    batch_profiles,
    edge_boundary,
    h_complement_profile,
    h_profile,
    hamming_ball,
    hamming_sphere,
    is_hamming_ball,
    is_subcube,
    moment,
    subcube,
    w_profile,
)


def naive_h(A: CubeSet) -> list[int]:
    """Neighbour counts straight from the definition, one vertex at a time."""
    out = []
    for v in range(1 << A.n):
        if v in A:
            out.append(sum(1 for j in range(A.n) if (v ^ (1 << j)) not in A))
        else:
            out.append(0)
    return out


@st.composite
def cube_sets(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    mask = draw(st.integers(0, (1 << (1 << n)) - 1))
    return CubeSet(n, mask)


@given(cube_sets())
def test_h_matches_definition(A):
    assert h_profile(A).values.tolist() == naive_h(A)


@given(cube_sets())
def test_two_sided_is_sum_of_one_sided(A):
    assert np.array_equal(w_profile(A).values, h_profile(A).values + h_profile(A.complement()).values)
    assert h_complement_profile(A) == h_profile(A.complement())


@given(cube_sets())
def test_edge_count_seen_from_both_sides(A):
    assert edge_boundary(A) == edge_boundary(A.complement())
    assert w_profile(A).total() == 2 * edge_boundary(A)


@given(cube_sets(), st.data())
def test_moments_invariant_under_cube_symmetries(A, data):
    perm = data.draw(st.permutations(range(A.n)))
    flip = data.draw(st.integers(0, (1 << A.n) - 1))
    B = A.transform(perm, flip)
    assert B.cardinality == A.cardinality
    for side in Side:
        assert moment(B, 0.53, side).value == moment(A, 0.53, side).value


@given(cube_sets(max_n=8))
def test_hex_round_trip(A):
    assert CubeSet.from_hex(A.to_hex()) == A


@given(cube_sets(max_n=5))
def test_batch_kernels_match_single_set(A):
    masks = np.array([A.mask], dtype=np.uint64)
    single = {Side.H: h_profile(A), Side.H_COMPLEMENT: h_complement_profile(A), Side.W: w_profile(A)}
    for side, prof in single.items():
        assert np.array_equal(batch_profiles(A.n, masks, side)[0], prof.values)
        assert batch_moments(A.n, masks, 0.7, side)[0] == pytest.approx(moment(A, 0.7, side).value, abs=1e-15)


def test_beta_one_keeps_exact_numerator():
    A = CubeSet.from_vertices(3, [0, 1, 2])
    m = moment(A, 1)
    assert m.exact == Fraction(edge_boundary(A), 8)
    assert m.value == float(m.exact)
    assert moment(A, 0.5).exact is None


def test_zero_power_convention_counts_vertex_boundary():
    A = hamming_ball(4, 0, 1)
    assert moment(A, 0).value == float(h_profile(A).support.measure)
    assert moment(CubeSet.full(4), 0).value == 0.0


@pytest.mark.parametrize("n", range(1, 9))
def test_subcube_profile_is_constant(n):
    for k in range(n + 1):
        A = subcube(n, k)
        assert A.measure == Fraction(1, 2**k)
        assert set(h_profile(A).values[A.members()].tolist()) == {k}
        assert moment(A, 0.6).value == pytest.approx(2.0**-k * (k**0.6 if k else 0), abs=1e-15)


def test_hamming_ball_radius_and_sphere():
    assert hamming_ball(4, 0, 1.7) == hamming_ball(4, 0, 1)
    assert hamming_ball(4, 5, 9) == CubeSet.full(4)
    assert hamming_ball(5, 3, 2).cardinality == 1 + 5 + 10
    assert hamming_sphere(5, 0, 2).cardinality == math.comb(5, 2)


def test_shape_recognisers():
    assert is_subcube(subcube(4, 2).transform([2, 0, 3, 1], 0b1010))
    assert not is_subcube(CubeSet.from_vertices(3, [0, 3]))
    assert is_hamming_ball(hamming_ball(4, 9, 1))
    assert not is_hamming_ball(CubeSet.from_vertices(3, [0, 1, 2, 4, 7]))
    assert not is_subcube(CubeSet.empty(3))


def test_from_members_and_vertices_agree():
    for n in range(1, 5):
        for verts in itertools.combinations(range(1 << n), min(3, 1 << n)):
            A = CubeSet.from_vertices(n, verts)
            members = np.zeros(1 << n, dtype=bool)
            members[list(verts)] = True
            assert CubeSet.from_members(n, members) == A
            assert A.vertices() == list(verts)


def test_invalid_inputs_are_rejected():
    with pytest.raises(ValueError):
        CubeSet(2, 1 << 4)
    with pytest.raises(ValueError):
        CubeSet(25, 0)
    with pytest.raises(ValueError):
        CubeSet.from_vertices(2, [4])
    with pytest.raises(ValueError):
        CubeSet.from_hex("3:ff")
    with pytest.raises(ValueError):
        CubeSet.from_hex("n=4:ff")
    with pytest.raises(ValueError):
        subcube(3, 4)
    with pytest.raises(ValueError):
        moment(CubeSet.full(2), -1)
    with pytest.raises(ValueError):
        CubeSet(3, 1).transform([0, 0, 1])
