import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subgauss.biased import (
    SubsetMeasure, bounded_differences_check, exact_weights, hoeffding_check, measure_of, popcounts,
    sample_masks, subset_sums,
)
from subgauss.errors import CapacityError, DomainError


def test_total_mass_one():
    assert measure_of(SubsetMeasure.exact(2, 0.5), lambda H: True) == 1.0


@pytest.mark.parametrize("n", range(1, 11))
@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.9])
def test_weights_sum_to_one(n, p):
    assert abs(math.fsum(exact_weights(n, p)) - 1.0) <= 1e-12


@given(st.integers(1, 10), st.floats(0.05, 0.95), st.data())
def test_contains_index_has_mass_p(n, p, data):
    i = data.draw(st.integers(0, n - 1))
    assert measure_of(SubsetMeasure.exact(n, p), lambda H: i in H) == pytest.approx(p, abs=1e-12)


def test_single_subset_weight():
    # {1,3} in 1-based terms is {0,2} here
    assert measure_of(SubsetMeasure.exact(3, 0.3), lambda H: H == {0, 2}) == pytest.approx(0.063, abs=1e-15)


def test_exact_cap():
    with pytest.raises(CapacityError):
        SubsetMeasure.exact(25, 0.5)


def test_bad_p():
    with pytest.raises(DomainError):
        SubsetMeasure.exact(3, 1.0)


def test_sampled_deterministic_and_partition_invariant():
    a = sample_masks(10, 0.3, 1000, seed=7)
    b = np.concatenate([sample_masks(10, 0.3, 400, seed=7), sample_masks(10, 0.3, 600, seed=7, start=400)])
    assert np.array_equal(a, b)
    assert np.array_equal(a, sample_masks(10, 0.3, 1000, seed=7))
    assert not np.array_equal(a, sample_masks(10, 0.3, 1000, seed=8))


@pytest.mark.parametrize("seed", range(5))
def test_sampled_close_to_exact(seed):
    n, p, count = 8, 0.35, 20000
    pred = lambda masks: popcounts(masks) >= 3
    exact = measure_of(SubsetMeasure.exact(n, p), pred, vectorized=True)
    samp = measure_of(SubsetMeasure.sampled(n, p, count, seed), pred, vectorized=True)
    assert abs(samp - exact) <= 3 * math.sqrt(exact * (1 - exact) / count)


def test_subset_sums_bruteforce(rng):
    c = rng.normal(size=6)
    masks = np.arange(64, dtype=np.uint64)
    want = [sum(c[i] for i in range(6) if (m >> i) & 1) for m in range(64)]
    assert np.allclose(subset_sums(c, masks), want, atol=1e-14)


def test_hoeffding_examples():
    r = hoeffding_check([1, 1], 0.5, 2)
    assert r.lhs == 0 and r.rhs == pytest.approx(2 * math.exp(-4)) and r.holds
    r = hoeffding_check([1], 0.5, 0.5)
    assert r.lhs == 1 and r.rhs == pytest.approx(2 * math.exp(-0.5)) and r.holds
    r = hoeffding_check([1] * 10, 0.5, 5)
    assert r.lhs == pytest.approx(2 / 1024) and r.rhs == pytest.approx(2 * math.exp(-5)) and r.holds


def test_hoeffding_zero_vector():
    with pytest.raises(DomainError):
        hoeffding_check([0, 0], 0.5, 1)


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=12).filter(lambda c: any(c)),
       st.floats(0.05, 0.95), st.floats(0.01, 2.0))
def test_hoeffding_holds(c, p, t):
    assert hoeffding_check(c, p, t).holds


def _table(fn, n):
    return np.array([fn({i for i in range(n) if (m >> i) & 1}) for m in range(1 << n)], dtype=float)


def test_bounded_differences_examples():
    r = bounded_differences_check(_table(len, 2), [1, 1], 0.5, 2)
    assert r.lhs == 0 and r.rhs == pytest.approx(2 * math.exp(-4))
    r = bounded_differences_check(np.full(8, 3.0), [1, 0, 0], 0.4, 0.1)
    assert r.lhs == 0
    r = bounded_differences_check(_table(len, 2), [1, 1], 0.5, 1)
    assert r.lhs == 0.5 and r.rhs == pytest.approx(2 * math.exp(-1)) and r.holds


def test_bounded_differences_premise():
    with pytest.raises(DomainError, match="i=1"):
        bounded_differences_check(_table(lambda H: 2.0 * (1 in H), 2), [1, 1], 0.5, 1)


@given(st.integers(1, 8), st.floats(0.05, 0.95), st.floats(0.05, 2.0), st.data())
def test_bounded_differences_holds(n, p, t, data):
    vals = data.draw(st.lists(st.floats(-1, 1), min_size=1 << n, max_size=1 << n))
    f = np.array(vals)
    masks = np.arange(1 << n)
    c = np.array([np.abs(f[masks | (1 << i)] - f[masks]).max() for i in range(n)])
    if not c.any():
        return
    assert bounded_differences_check(f, c, p, t).holds
