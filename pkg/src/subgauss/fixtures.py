"""Seeded random fixtures for the verification battery.

Every fixture is a pure function of (master seed, family, index), so any
single instance can be regenerated in isolation.
"""

from __future__ import annotations

import itertools
import zlib

import numpy as np

from subgauss.directional import Direction
from subgauss.dist import Cancellation, Product, RandomVector, ScalarDist, build_random_vector
from subgauss.hypergraph import Hypergraph

MAX_ATOMS = 64
P_RANGE = (0.15, 0.9)
GRID = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])


def fixture_rng(seed: int, family: str, index: int) -> np.random.Generator:
    return np.random.default_rng([seed & (2**64 - 1), zlib.crc32(family.encode()), index])


def random_scalar(rng: np.random.Generator, max_atoms: int = 4) -> ScalarDist:
    k = int(rng.integers(1, max_atoms + 1))
    if rng.random() < 0.5:
        vals = rng.choice(GRID, size=k, replace=False) if k <= GRID.size else rng.uniform(-1, 1, k)
    else:
        vals = rng.uniform(-1.0, 1.0, size=k)
    if k == 1 and vals[0] == 0.0:
        vals = np.array([1.0])
    probs = rng.dirichlet(np.ones(k))
    return ScalarDist.from_arrays(vals, probs)


def _product(rng: np.random.Generator, n: int, max_atoms: int) -> RandomVector:
    budget = max_atoms
    margs = []
    for _ in range(n):
        cap = 1
        while cap * 2 <= budget and cap < 4:
            cap *= 2
        if cap > 1 and rng.random() < 0.7:
            m = random_scalar(rng, cap)
        else:
            m = ScalarDist.point_mass(float(rng.choice(GRID)))
        budget //= m.support_size
        margs.append(m)
    order = rng.permutation(n)
    return build_random_vector(Product([margs[i] for i in order]))


def _explicit(rng: np.random.Generator, n: int, max_atoms: int) -> RandomVector:
    A = int(rng.integers(1, max_atoms + 1))
    if rng.random() < 0.5:
        pts = rng.choice(GRID, size=(A, n))
    else:
        pts = rng.uniform(-1.0, 1.0, size=(A, n))
    return RandomVector(rng.dirichlet(np.ones(A)), pts)


def _cancellation(rng: np.random.Generator, n: int, max_atoms: int) -> RandomVector:
    T = frozenset(int(i) for i in np.flatnonzero(rng.random(n) < 0.5))
    return build_random_vector(Cancellation(random_scalar(rng, min(max_atoms, 6)), n, T))


def random_vector(rng: np.random.Generator, n: int, max_atoms: int = MAX_ATOMS) -> RandomVector:
    """A [-1,1]^n vector with at most ``max_atoms`` atoms, from a mix of families."""
    kind = rng.random()
    if kind < 0.35:
        return _product(rng, n, max_atoms)
    if kind < 0.75:
        return _explicit(rng, n, max_atoms)
    return _cancellation(rng, n, max_atoms)


def random_direction(rng: np.random.Generator, n: int) -> Direction:
    kind = rng.random()
    if kind < 0.4:
        c = rng.normal(size=n)
    elif kind < 0.6:
        c = rng.integers(-3, 4, size=n).astype(float)
    elif kind < 0.8:
        c = np.ones(n)
    else:
        c = rng.normal(size=n) * 0.1
        c[int(rng.integers(n))] = 1.0 + rng.random() * 3.0
    if not np.any(c):
        c[0] = 1.0
    return Direction(c)


def random_p(rng: np.random.Generator) -> float:
    return float(rng.uniform(*P_RANGE))


def random_hypergraph(rng: np.random.Generator, n: int, d: int) -> Hypergraph:
    edges = list(itertools.combinations(range(n), d))
    keep = rng.random(len(edges)) < rng.uniform(0.2, 1.0)
    if rng.random() < 0.5:
        w = rng.normal(size=len(edges))
    else:
        w = rng.choice([-1.0, 1.0], size=len(edges))
    return Hypergraph(n, d, {e: float(x) for e, x, k in zip(edges, w, keep) if k})
