import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeiso import boolean_fourier as bf
from cubeiso.cube_core import CubeSet, h_profile, w_profile
from cubeiso.errors import ResourceRefusal

dims = st.integers(1, 10)


def random_function(n, seed, d=None):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(1 << n) if d is None else (1 << n, d))


def naive_coefficients(f):
    """``E f(x) x^S`` by direct summation."""
    n = bf.dimension_of(f)
    return np.array([np.mean(f * bf.character(n, S)) for S in range(1 << n)])


@given(st.integers(1, 6), st.integers(0, 2**32))
def test_transform_matches_direct_sum(n, seed):
    f = random_function(n, seed)
    assert np.allclose(bf.walsh_transform(f), naive_coefficients(f), atol=1e-12)


@given(dims, st.integers(0, 2**32))
def test_parseval_and_round_trip(n, seed):
    f = random_function(n, seed)
    c = bf.walsh_transform(f)
    assert math.fsum((c**2).tolist()) == pytest.approx(math.fsum((f**2).tolist()) / f.size, abs=1e-12)
    assert np.max(np.abs(bf.inverse_walsh(c) - f)) < 1e-12


def test_vector_valued_transform():
    f = random_function(5, 3, d=3)
    c = bf.walsh_transform(f)
    for k in range(3):
        assert np.allclose(c[:, k], bf.walsh_transform(f[:, k]), atol=1e-15)
    with pytest.raises(ValueError):
        bf.walsh_transform(np.zeros((8, 9)))
    with pytest.raises(ValueError):
        bf.walsh_transform(np.zeros(6))


def test_transform_examples():
    n = 4
    c = bf.walsh_transform(bf.parity(n))
    assert c[-1] == 1 and np.count_nonzero(c) == 1
    c = bf.walsh_transform(np.full(8, 2.5))
    assert c[0] == 2.5 and np.count_nonzero(c) == 1
    c = bf.walsh_transform(bf.majority(3))
    assert c.tolist() == [0, 0.5, 0.5, 0, 0.5, 0, 0, -0.5]


@given(st.integers(1, 8), st.integers(0, 2**32), st.data())
def test_partial_difference_acts_as_projection(n, seed, data):
    j = data.draw(st.integers(0, n - 1))
    f = random_function(n, seed)
    S = np.arange(1 << n)
    expected = np.where(S >> j & 1, bf.walsh_transform(f), 0.0)
    assert np.allclose(bf.walsh_transform(bf.partial_difference(f, j)), expected, atol=1e-12)


def test_partial_difference_examples():
    d = bf.dictator(3, 0)
    assert np.array_equal(bf.partial_difference(d, 0), d)  # D_1 x_1 = x_1, so |D_1 x_1| = 1
    assert np.all(bf.partial_difference(d, 1) == 0)
    p = bf.parity(4)
    assert all(np.array_equal(bf.partial_difference(p, j), p) for j in range(4))
    half = CubeSet.from_members(3, (np.arange(8) & 1) == 1)
    assert np.all(np.abs(bf.partial_difference(bf.indicator(half), 0)) == 0.5)
    with pytest.raises(ValueError):
        bf.partial_difference(d, 3)


def test_gradient_examples():
    grad, _ = bf.gradient_norms(bf.parity(5))
    assert np.allclose(grad, math.sqrt(5))
    grad2, _ = bf.gradient_squares(bf.indicator(CubeSet.from_vertices(1, [0])))
    assert grad2.tolist() == [0.25, 0.25]


@given(st.integers(1, 10), st.data())
def test_indicator_gradients_are_boundary_counts(n, data):
    A = CubeSet(n, data.draw(st.integers(0, (1 << (1 << n)) - 1)))
    grad2, mono2 = bf.gradient_squares(bf.indicator(A))
    assert np.array_equal(4 * mono2, h_profile(A).values)
    assert np.array_equal(4 * grad2, w_profile(A).values)


@given(st.integers(1, 8), st.integers(0, 2**32), st.floats(0, 3), st.floats(0, 3))
def test_heat_semigroup_law(n, seed, s, t):
    f = random_function(n, seed)
    assert np.allclose(bf.heat(bf.heat(f, s), t), bf.heat(f, s + t), atol=1e-12)


@given(st.integers(1, 8), st.integers(0, 2**32), st.floats(0, 3))
def test_heat_contracts_every_norm(n, seed, t):
    f = random_function(n, seed)
    g = bf.heat(f, t)
    for p in (1, 2, math.inf):
        assert bf.norm(g, p) <= bf.norm(f, p) + 1e-12


def test_heat_examples():
    f = random_function(5, 1)
    assert np.allclose(bf.heat(f, 0), f, atol=1e-15)
    assert np.allclose(bf.heat(bf.parity(4), 0.3), math.exp(-1.2) * bf.parity(4))
    with pytest.raises(ValueError):
        bf.heat(f, -0.1)


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_semigroup_identity_on_characters(t):
    for n in range(1, 6):
        for S in range(1 << n):
            assert bf.check_semigroup_identity(bf.character(n, S), t) < 1e-12


def test_semigroup_identity_random_and_constant():
    assert bf.check_semigroup_identity(random_function(5, 7), 0.3) < 1e-9
    assert bf.check_semigroup_identity(np.full(16, 3.0), 0.4) == 0
    assert bf.check_semigroup_identity(random_function(4, 2, d=2), 0.7) < 1e-9
    with pytest.raises(ValueError):
        bf.check_semigroup_identity(np.ones(4), 0)
    with pytest.raises(ResourceRefusal):
        bf.check_semigroup_identity(np.ones(128), 0.5)


def test_talagrand_examples():
    assert bf.talagrand_Df_norm(bf.dictator(4), 1.0) == pytest.approx(1.0)
    assert bf.talagrand_Df_norm(bf.dictator(4), 1.7) == pytest.approx(1.0)
    assert bf.talagrand_Df_norm(bf.parity(2), 1.0) == pytest.approx(1.0)
    assert bf.talagrand_Df_norm(bf.parity(6), 2.0) == pytest.approx(math.sqrt(6))
    with pytest.raises(ValueError):
        bf.talagrand_Df_norm(bf.parity(2), 3.0)
    with pytest.raises(ResourceRefusal):
        bf.talagrand_Df_norm(np.ones(1 << 14), 1.0)


def test_talagrand_at_p2_is_gradient_l2():
    # orthogonality of the x'_j: E|sum x'_j v_j|^2 = |v|^2, also for vector values
    for f in (random_function(6, 4), random_function(5, 5, d=3)):
        D = bf.all_partial_differences(f)
        expected = math.sqrt(np.sum(D**2) / f.shape[0])
        assert bf.talagrand_Df_norm(f, 2.0) == pytest.approx(expected, rel=1e-12)


def test_talagrand_monotone_in_p_and_matches_monte_carlo():
    f = random_function(7, 11)
    values = [bf.talagrand_Df_norm(f, p) for p in (1.0, 1.25, 1.5, 2.0)]
    assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))
    for p, exact in zip((1.0, 1.5), (values[0], values[2])):
        est, se = bf.talagrand_Df_norm_mc(f, p, samples=50_000, seed=3)
        assert abs(est - exact) <= 4 * se
    assert bf.talagrand_Df_norm_mc(f, 1.0, samples=1000, seed=9) == bf.talagrand_Df_norm_mc(f, 1.0, samples=1000, seed=9)


def test_spectral_stats_examples():
    s = bf.spectral_stats(bf.parity(4))
    assert s.variance == 1 and s.tails == (1, 1, 1, 1, 1, 0)
    assert bf.spectral_stats(bf.majority(3)).W == pytest.approx(0.75, abs=1e-12)


@given(st.integers(1, 8), st.integers(0, 2**32))
def test_tails_non_increasing(n, seed):
    s = bf.spectral_stats(random_function(n, seed))
    assert all(a >= b - 1e-15 for a, b in zip(s.tails, s.tails[1:]))
    assert s.tail(n + 5) == 0


@pytest.mark.parametrize("name", bf.MONOTONE_CORPUS)
def test_monotone_functions_W_at_most_variance(name):
    f = bf.corpus(name)
    s = bf.spectral_stats(f)
    singletons = bf.walsh_transform(f)[[1 << j for j in range(s.n)]]
    assert s.W == pytest.approx(float(np.sum(singletons**2)), abs=1e-12)
    assert s.W <= s.variance + 1e-12


def test_fbound_examples():
    for f in (bf.dictator(5), bf.parity(1), bf.parity(6)):
        r = bf.fbound_ratio(f, 1.0)
        assert r.ratio == 1.0
    r = bf.fbound_ratio(bf.parity(6), 1.0)
    assert r.lhs == math.sqrt(6) and r.argmax_d == 6
    assert bf.fbound_ratio(np.ones(8), 1.0).ratio == math.inf
    with pytest.raises(ValueError):
        bf.fbound_ratio(random_function(3, 1), 1.0)


def test_noise_sensitivity():
    assert bf.noise_sensitivity(bf.dictator(4), 0.1) == pytest.approx(0.1)
    assert bf.noise_sensitivity(bf.parity(3), 0.5) == pytest.approx(0.5)
    # Maj3 stays equal unless at least two of the three coordinates are rerandomised and flipped
    d = 0.2
    f = bf.majority(3)
    assert bf.noise_sensitivity(f, d) == pytest.approx((1 - (0.75 * (1 - 2 * d) + 0.25 * (1 - 2 * d) ** 3)) / 2)


@pytest.mark.parametrize("name", bf.STANDARD_CORPUS)
@pytest.mark.parametrize("t", [0.1, 1.0])
def test_hypercontractive_ratio(name, t):
    report = bf.noise_stability_suite(bf.corpus(name), 1.0, 2.0, t)
    assert report["hypercontractive_ok"]
    assert report["stability_ratio"] >= 0


def test_noise_suite_edge_cases():
    rep = bf.noise_stability_suite(np.full(8, 1.0), 1.0, 2.0, 0.5)
    assert rep["drift"] == 0 and rep["stability_ratio"] == 0
    rep = bf.noise_stability_suite(bf.dictator(3), 2.0, 2.0, 40.0)
    assert rep["drift"] == pytest.approx(1.0)
    assert bf.noise_stability_suite(random_function(4, 2), 1.0, 2.0, 0.3)["hypercontractive_ok"]
    with pytest.raises(ValueError):
        bf.noise_stability_suite(np.zeros(8))
    with pytest.raises(ValueError):
        bf.noise_stability_suite(bf.dictator(3), q=3.0)


def test_corpus_generation():
    assert np.array_equal(bf.half_cube_function(4), bf.dictator(4))
    t = bf.tribes(4, 2)
    assert np.sum(t == -1) == 7  # 16 - 3*3 inputs with some block all true
    assert np.sum(bf.corpus("ball5") == -1) == 16
    with pytest.raises(ValueError):
        bf.majority(4)
    with pytest.raises(ValueError):
        bf.corpus("nonsense3")
