import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import RAD, random_vectors, scalar_dists
from subgauss.dist import (
    Cancellation, ConvexCombination, Example42, Example51Vector, Explicit, Product, RandomVector,
    ScalarDist, build_random_vector, pushforward, spec_from_json, spec_to_json,
)
from subgauss.errors import CapacityError, DomainError


def point_vector(x):
    return RandomVector([1.0], [x])


def test_product_of_two_rademachers():
    X = build_random_vector(Product((RAD, RAD)))
    assert X.n_atoms == 4
    assert np.allclose(X.probs, 0.25)
    assert {tuple(x) for x in X.points} == set(itertools.product((-1.0, 1.0), repeat=2))


def test_cancellation_pattern():
    # T = {0} in 0-based indexing: X_0 = Z, X_1 = -Z
    X = build_random_vector(Cancellation(RAD, 2, frozenset({0})))
    assert sorted(X.atoms) == [(0.5, (-1.0, 1.0)), (0.5, (1.0, -1.0))]


def test_convex_of_opposite_constants_is_origin():
    spec = ConvexCombination((0.5, 0.5), (Explicit(point_vector([1, 1])), Explicit(point_vector([-1, -1]))))
    X = build_random_vector(spec)
    assert X.atoms == [(1.0, (0.0, 0.0))]


def test_pushforward_sum_of_rademachers():
    X = build_random_vector(Product((RAD, RAD)))
    assert pushforward(X, [1, 1]).atoms == [(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]


def test_pushforward_cancellation_vanishes():
    X = build_random_vector(Cancellation(RAD, 2, frozenset({0})))
    assert pushforward(X, [1, 1]).atoms == [(0.0, 1.0)]


@given(random_vectors())
def test_pushforward_zero_direction(X):
    assert pushforward(X, np.zeros(X.dim)).atoms == [(0.0, 1.0)]


def test_pushforward_dimension_mismatch():
    with pytest.raises(DomainError):
        pushforward(build_random_vector(Product((RAD,))), [1, 1])


def test_atom_cap():
    with pytest.raises(CapacityError):
        build_random_vector(Product((RAD,) * 5), cap=16)


def test_entries_outside_box_rejected():
    with pytest.raises(DomainError):
        RandomVector([1.0], [[1.5, 0.0]])


def test_probabilities_must_sum_to_one():
    with pytest.raises(DomainError):
        RandomVector([0.5, 0.4], [[0.0], [1.0]])


def test_scalar_merges_and_sorts():
    D = ScalarDist([(1.0, 0.25), (-1.0, 0.5), (1.0, 0.25)])
    assert D.atoms == [(-1.0, 0.5), (1.0, 0.5)]


@given(st.lists(scalar_dists(3), min_size=1, max_size=4), st.data())
def test_product_marginals_recovered(margs, data):
    X = build_random_vector(Product(tuple(margs)))
    i = data.draw(st.integers(0, len(margs) - 1))
    e = np.zeros(len(margs))
    e[i] = 1.0
    got = pushforward(X, e)
    assert np.array_equal(got.values, margs[i].values)
    assert np.allclose(got.probs, margs[i].probs, atol=1e-14)


@given(random_vectors())
def test_single_part_convex_is_identity(X):
    Y = build_random_vector(ConvexCombination((1.0,), (Explicit(X),)))
    assert np.array_equal(Y.points, X.points)
    assert np.allclose(Y.probs, X.probs, atol=1e-15)


@given(scalar_dists(), st.integers(1, 8))
def test_cancelling_direction_cancels(base, n):
    X = build_random_vector(Example42(n, base))
    theta = np.ones(n + 1)
    theta[0] = n
    assert pushforward(X, theta).atoms == [(0.0, 1.0)]


@given(random_vectors())
def test_vector_invariants(X):
    assert abs(X.probs.sum() - 1.0) <= 1e-12
    assert np.all(np.abs(X.points) <= 1.0)


def test_diagonal_vector_is_diagonal():
    X = build_random_vector(Example51Vector(3, 2, RAD))
    assert X.dim == 5
    assert all(len(set(x)) == 1 for _, x in X.atoms)


@pytest.mark.parametrize("spec", [
    Product((RAD, ScalarDist.uniform([-1, 0, 1]))),
    Cancellation(RAD, 3, frozenset({1})),
    ConvexCombination((0.25, 0.75), (Product((RAD, RAD)), Cancellation(RAD, 2, frozenset()))),
    Example42(3, RAD),
    Example51Vector(3, 2, RAD),
])
def test_spec_json_roundtrip(spec):
    a = build_random_vector(spec)
    b = build_random_vector(spec_from_json(spec_to_json(spec)))
    assert np.array_equal(a.points, b.points) and np.allclose(a.probs, b.probs)


def test_malformed_spec():
    with pytest.raises(DomainError):
        spec_from_json({"kind": "product"})
    with pytest.raises(DomainError):
        spec_from_json({"kind": "nope"})
