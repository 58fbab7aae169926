import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpfactor.errors import NotFound
from lpfactor.signs import (POWER_FORM_C0, khintchine_moment_check, khintchine_tail_exact,
                            khintchine_tail_mc, balanced_sign_search, rademacher_matrix,
                            random_sign_matrix, sylvester_hadamard)


def enumerate_tail(coeffs, threshold):
    hits = [abs(np.dot(s, coeffs)) > threshold
            for s in itertools.product([-1, 1], repeat=len(coeffs))]
    return sum(hits) / len(hits)


def test_hadamard_small():
    assert sylvester_hadamard(0).tolist() == [[1]]
    assert sylvester_hadamard(1).tolist() == [[1, 1], [1, -1]]


@pytest.mark.parametrize("k", range(0, 9))
def test_hadamard_orthogonal(k):
    H = sylvester_hadamard(k).astype(np.int64)
    assert np.array_equal(H @ H.T, (1 << k) * np.eye(1 << k, dtype=np.int64))


def test_hadamard_range():
    with pytest.raises(ValueError):
        sylvester_hadamard(17)
    with pytest.raises(ValueError):
        sylvester_hadamard(-1)


def test_rademacher_small():
    assert rademacher_matrix(1).tolist() == [[1, -1]]
    assert rademacher_matrix(2).tolist() == [[1, 1, -1, -1], [1, -1, 1, -1]]


@pytest.mark.parametrize("n", [1, 3, 6, 10])
def test_rademacher_matches_sine_definition(n):
    # r_i(t) = sign(sin(2^i pi t)) at atom midpoints
    mids = (np.arange(1 << n) + 0.5) / (1 << n)
    ref = np.sign(np.sin(np.outer(2.0 ** np.arange(1, n + 1), np.pi * mids)))
    assert np.array_equal(rademacher_matrix(n), ref)


@pytest.mark.parametrize("n", [1, 4, 9, 12])
def test_rademacher_columns_distinct(n):
    R = rademacher_matrix(n)
    assert len({tuple(c) for c in R.T}) == 1 << n


def test_rademacher_range():
    with pytest.raises(ValueError):
        rademacher_matrix(21)


def test_random_sign_matrix():
    a = random_sign_matrix(5, 7, seed=3)
    assert np.array_equal(a, random_sign_matrix(5, 7, seed=3))
    assert set(np.unique(a)) <= {-1, 1}
    assert random_sign_matrix(1, 1, seed=0)[0, 0] in (-1, 1)
    assert abs(random_sign_matrix(100, 100, seed=12).mean()) < 0.2


def test_tail_exact_examples():
    c = [0.5] * 4
    assert enumerate_tail(c, 1.5) == 0.125
    est = khintchine_tail_exact(c, 1.5)
    assert est.empirical_probability == 0.125
    assert est.method == "exact"
    assert khintchine_tail_exact(c, 2).empirical_probability == 0
    assert khintchine_tail_exact([0.3, -1.2, 2.0], -1).empirical_probability == 1


def test_tail_exact_bounds_recorded():
    c = np.ones(9)
    est = khintchine_tail_exact(c, 4.0)
    assert est.bound_hoeffding == pytest.approx(2 * math.exp(-16 / 18))
    alpha2 = 16 / (math.log(9) * 9)
    assert est.bound_power_form == pytest.approx(9 ** (-POWER_FORM_C0 * alpha2))
    assert est.c0 == pytest.approx(1 / (2 * math.e))


def test_tail_exact_limit():
    with pytest.raises(ValueError):
        khintchine_tail_exact(np.ones(21), 1.0)


@pytest.mark.parametrize("seed", range(5))
def test_tail_exact_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=rng.integers(1, 11))
    thr = float(rng.uniform(0, np.abs(c).sum()))
    assert khintchine_tail_exact(c, thr).empirical_probability == enumerate_tail(c, thr)


def test_tail_mc_examples():
    assert khintchine_tail_mc([1.0], 0.5, trials=1000, seed=1).empirical_probability == 1.0
    est = khintchine_tail_mc([0.5] * 4, 1.5, trials=100_000, seed=7)
    assert est.empirical_probability == pytest.approx(0.125, abs=0.004)
    c = np.array([0.2, -0.7, 1.1])
    assert khintchine_tail_mc(c, np.abs(c).sum() + 1, 5000, 2).empirical_probability == 0.0


def test_tail_mc_deterministic():
    a = khintchine_tail_mc(np.ones(30), 5.0, 20_000, seed=4)
    assert a == khintchine_tail_mc(np.ones(30), 5.0, 20_000, seed=4)


@pytest.mark.parametrize("n", [4, 10, 16])
def test_mc_within_three_standard_errors(n):
    c = np.linspace(1, 2, n)
    thr = 1.2 * math.sqrt(np.sum(c**2))
    exact = khintchine_tail_exact(c, thr).empirical_probability
    mc = khintchine_tail_mc(c, thr, 100_000, seed=n).empirical_probability
    assert abs(mc - exact) <= 3 * math.sqrt(exact * (1 - exact) / 100_000)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=10),
       st.floats(0, 10), st.integers(0, 1023))
def test_hoeffding_dominates_exact(coeffs, thr, mask):
    c = np.array(coeffs)
    if np.sum(c**2) == 0:
        return
    est = khintchine_tail_exact(c, thr)
    assert est.empirical_probability <= est.bound_hoeffding
    # sign symmetry
    flips = np.array([-1.0 if (mask >> i) & 1 else 1.0 for i in range(c.size)])
    assert khintchine_tail_exact(c * flips, thr).empirical_probability == est.empirical_probability


def test_moment_examples():
    for q in (1.0, 3.0, 7.5):
        moment, ratio = khintchine_moment_check([2.5], q, trials=100, seed=0)
        assert moment == pytest.approx(1.0)
        assert ratio == pytest.approx(1 / math.sqrt(q))
    moment, _ = khintchine_moment_check([1.0, 2.0, -3.0, 0.5], 2, trials=1000, seed=0)
    assert moment == pytest.approx(1.0)


def test_moment_q2_monte_carlo_near_one():
    moment, _ = khintchine_moment_check(np.ones(40), 2, trials=50_000, seed=5)
    assert moment == pytest.approx(1.0, abs=0.02)


@pytest.mark.parametrize("q", [4, 8])
def test_moment_n16_against_enumeration(q):
    c = np.full(16, 0.25)  # unit l2 norm
    sums = np.array([np.dot(s, c) for s in itertools.product([-1, 1], repeat=16)])
    exact = np.mean(np.abs(sums) ** q) ** (1 / q)
    moment, ratio = khintchine_moment_check(np.ones(16), q, trials=1 << 16, seed=0)
    assert moment == pytest.approx(exact, rel=1e-12)
    assert ratio <= 1.1
    mc_moment, mc_ratio = khintchine_moment_check(np.ones(16), q, trials=20_000, seed=1)
    assert mc_moment == pytest.approx(exact, rel=0.05)
    assert mc_ratio <= 1.1


def test_sign_search_examples():
    eps, frac = balanced_sign_search(np.zeros((5, 9)), 1.0, samples=20, seed=0)
    assert frac == 1.0 and eps.shape == (5,) and set(np.abs(eps)) == {1}
    _, frac = balanced_sign_search(np.eye(6), 1.0, samples=50, seed=1)
    assert frac == 1.0


@pytest.mark.parametrize("seed", range(5))
def test_sign_search_random_signs_good_fraction(seed):
    F = random_sign_matrix(8, 64, seed=seed).astype(float)
    eps, frac = balanced_sign_search(F, 2.0, samples=200, seed=seed)
    assert frac >= 0.75
    bound = 1.25 * 2.0 * math.sqrt(8 * math.log(8))
    assert np.max(np.abs(eps @ F)) <= bound


def test_sign_search_not_found():
    with pytest.raises(NotFound):
        balanced_sign_search(np.full((3, 4), 100.0), 0.01, samples=10, seed=0)
