import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import cubeiso.extremal_search as es
from cubeiso.cube_core import CubeSet, Side, moment, subcube
from cubeiso.errors import ResourceRefusal
from cubeiso.extremal_search import (
    Partition,
    SearchCache,
    canonical_form,
    colex_unrank,
    gosper_next,
    iter_fixed_popcount,
    min_moment,
    min_partition_functional,
    orbit_representatives,
    symmetry_table,
)


def combos_as_masks(universe, m):
    return sorted(sum(1 << i for i in c) for c in itertools.combinations(range(universe), m))


@pytest.mark.parametrize("universe,m", [(5, 2), (8, 3), (8, 1), (6, 6), (7, 0)])
def test_enumeration_is_ascending_and_complete(universe, m):
    assert list(iter_fixed_popcount(universe, m)) == combos_as_masks(universe, m)


@given(st.integers(1, 16), st.data())
def test_unrank_and_ranges(universe, data):
    m = data.draw(st.integers(1, universe))
    total = math.comb(universe, m)
    rank = data.draw(st.integers(0, total - 1))
    x = colex_unrank(m, rank)
    assert x.bit_count() == m
    if rank + 1 < total:
        assert gosper_next(x) == colex_unrank(m, rank + 1)
    cut = data.draw(st.integers(0, total))
    joined = list(iter_fixed_popcount(universe, m, 0, cut)) + list(iter_fixed_popcount(universe, m, cut))
    assert joined == list(iter_fixed_popcount(universe, m))


def test_symmetry_group_size():
    for n in range(1, 5):
        table = symmetry_table(n)
        assert table.shape == (math.factorial(n) * 2**n, 1 << n)
        assert all(sorted(row) == list(range(1 << n)) for row in table.tolist())


def test_canonical_form_examples():
    # vertex strings x1x2 with x1 the high bit: {x2 = 1} = {01, 11} maps to {x1 = 0} = {00, 01}
    assert canonical_form(CubeSet.from_vertices(2, [1, 3])) == CubeSet.from_vertices(2, [0, 1])
    assert canonical_form(CubeSet.from_vertices(3, [5])) == CubeSet.from_vertices(3, [0])


@given(st.integers(1, 4), st.data())
def test_canonical_form_is_orbit_invariant(n, data):
    A = CubeSet(n, data.draw(st.integers(0, (1 << (1 << n)) - 1)))
    perm = data.draw(st.permutations(range(n)))
    flip = data.draw(st.integers(0, (1 << n) - 1))
    c = canonical_form(A)
    assert canonical_form(A.transform(perm, flip)) == c
    assert c.mask <= A.mask
    assert moment(c, 0.53).value == moment(A, 0.53).value


@pytest.mark.parametrize("n", [2, 3])
def test_orbit_representatives_cover_all_orbits(n):
    for size in range((1 << n) + 1):
        brute = {canonical_form(CubeSet(n, m)).mask for m in combos_as_masks(1 << n, size)}
        assert orbit_representatives(n, size).tolist() == sorted(brute)


def test_small_examples():
    res = min_moment(2, 1, 1.0)
    assert res.min_value == 0.5
    assert len(res.witnesses) == 4
    res = min_moment(4, 4, 0.5849625007211562)
    assert res.min_value == pytest.approx(0.375, abs=1e-12)
    assert res.witness_is_subcube
    assert res.sets_examined == math.comb(16, 4)


@pytest.mark.parametrize("n,m,beta,side", [(3, 3, 0.5, "h"), (4, 5, 0.53, "h"), (4, 8, 0.53, "w"), (4, 11, 0.7, "h"), (3, 6, 1.0, "h_complement")])
def test_symmetry_reduction_agrees_with_exhaustive(n, m, beta, side):
    full = min_moment(n, m, beta, side)
    reduced = min_moment(n, m, beta, side, "symmetry_reduced")
    assert reduced.min_value == pytest.approx(full.min_value, abs=1e-12)
    assert reduced.sets_examined < full.sets_examined
    assert all(moment(w, beta, side).value == pytest.approx(full.min_value, abs=1e-12) for w in reduced.witnesses)


def test_witnesses_do_not_depend_on_range_split(monkeypatch):
    base = min_moment(4, 6, 0.6, witness_cap=5)
    monkeypatch.setattr(es, "CHUNK", 37)
    split = min_moment(4, 6, 0.6, witness_cap=5)
    assert split == base
    assert [w.mask for w in base.witnesses] == sorted(w.mask for w in base.witnesses)


def test_parallel_matches_serial(monkeypatch):
    monkeypatch.setattr(es, "CHUNK", 512)
    assert min_moment(4, 5, 0.6, workers=2) == min_moment(4, 5, 0.6)


def test_budget_refusal_and_override():
    with pytest.raises(ResourceRefusal):
        min_moment(4, 8, 0.5, budget=100)
    assert min_moment(4, 8, 0.5, budget=100, override_budget=True).sets_examined == 12870
    with pytest.raises(ResourceRefusal):
        min_moment(5, 3, 0.5)
    with pytest.raises(ResourceRefusal):
        min_moment(5, 16, 0.5, method="symmetry_reduced")
    with pytest.raises(ValueError):
        min_moment(3, 9, 0.5)
    with pytest.raises(ValueError):
        min_moment(3, 2, 0.5, method="annealing")


def test_symmetry_reduced_handles_small_sets_at_n5():
    res = min_moment(5, 4, 0.5849625007211562, method="symmetry_reduced")
    assert res.min_value == pytest.approx(moment(subcube(5, 3), 0.5849625007211562).value, abs=1e-12)
    assert res.witness_is_subcube


def test_cache_round_trip(tmp_path):
    cache = SearchCache(tmp_path / "c.jsonl")
    first = min_moment(3, 3, 0.6, cache=cache)
    again = min_moment(3, 3, 0.6, cache=cache)
    recomputed = min_moment(3, 3, 0.6)
    assert again == first == recomputed
    assert len((tmp_path / "c.jsonl").read_text().splitlines()) == 1
    assert cache.get(3, 3, 0.6, "w", "exhaustive") is None


# -- partitions ---------------------------------------------------------------


def brute_force_partition(n, beta, K):
    N = 1 << n
    best = math.inf
    for labels in itertools.product("ABW", repeat=N):
        if labels.count("A") != N // 2:
            continue
        part = Partition.from_labels(n, "".join(labels))
        best = min(best, part.functional(beta, K))
    return best


@pytest.mark.parametrize("n,beta,K", [(1, 0.53, 1.0), (2, 0.53, 1.0), (2, 0.4, 0.3), (3, 0.53, 1.0), (3, 0.2, 0.25), (3, 0.9, 0.1)])
def test_partition_minimum_matches_brute_force(n, beta, K):
    value, part = min_partition_functional(n, beta, K)
    assert value == pytest.approx(brute_force_partition(n, beta, K), abs=1e-12)
    assert part.functional(beta, K) == value
    assert part.a.cardinality == 1 << (n - 1)


def test_partition_half_cube_is_optimal():
    for n in range(1, 5):
        value, part = min_partition_functional(n, 0.53, 1.0)
        assert value == 2 ** (n - 1)
        assert part.w.cardinality == 0
    assert min_partition_functional(3, 0.53, 0.0)[0] == 0


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition.from_labels(2, "AAB")
    with pytest.raises(ValueError):
        Partition(CubeSet(2, 0b0011), CubeSet(2, 0b0110), CubeSet(2, 0b1000))
    with pytest.raises(ValueError):
        Partition(CubeSet(2, 0b0011), CubeSet(2, 0b0100), CubeSet(2, 0))
    part = Partition.from_labels(2, "ABBW")
    assert part.labels == "ABBW"
    assert part.cut_edges() == 2
    with pytest.raises(ResourceRefusal):
        min_partition_functional(5, 0.5, 1.0)
