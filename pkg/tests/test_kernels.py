import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subgauss import kernels
from subgauss.biased import all_masks

BACKENDS = kernels.available_backends()
needs_two = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")


def _problem(seed, n=6, atoms=10, d=2):
    rng = np.random.default_rng(seed)
    pts = rng.choice([-1.0, -0.5, 0.0, 0.5, 1.0], size=(atoms, n))
    probs = rng.dirichlet(np.ones(atoms))
    theta = rng.normal(size=n)
    edges = np.array([sum(1 << i for i in e) for e in itertools.combinations(range(n), d)], dtype=np.uint64)
    weights = rng.normal(size=edges.shape[0])
    return pts, probs, theta, edges, weights, all_masks(n)


def test_backend_names():
    assert "python" in BACKENDS
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@needs_two
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree(seed):
    pts, probs, theta, edges, weights, masks = _problem(seed)
    c, py = kernels.get_backend("cython"), kernels.get_backend("python")
    assert np.allclose(c.linear_values(pts, theta, masks), py.linear_values(pts, theta, masks), atol=1e-14)
    assert np.allclose(c.linear_psi2(pts, probs, theta, masks), py.linear_psi2(pts, probs, theta, masks),
                       rtol=1e-11, atol=0)
    assert np.allclose(c.hom_values(pts, edges, weights, masks), py.hom_values(pts, edges, weights, masks),
                       atol=1e-13)
    assert np.allclose(c.hom_psi2(pts, probs, edges, weights, masks),
                       py.hom_psi2(pts, probs, edges, weights, masks), rtol=1e-11, atol=0)
    assert np.array_equal(c.delta_vertex(edges, weights, 6, masks), py.delta_vertex(edges, weights, 6, masks))


def _brute_delta(edges, weights, n, h):
    out = np.zeros(n)
    inside = [(e, w) for e, w in zip(edges.tolist(), weights.tolist()) if e & h == e]
    for i in range(n):
        if not (h >> i) & 1:
            continue
        best = 0.0
        for x in itertools.product((-1.0, 1.0), repeat=n):
            s = sum(w * np.prod([x[j] for j in range(n) if (e >> j) & 1 and j != i])
                    for e, w in inside if (e >> i) & 1)
            best = max(best, abs(s))
        out[i] = 2 * best
    return out


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("d", [1, 2, 3])
def test_delta_vertex_bruteforce(backend, d):
    pts, probs, theta, edges, weights, masks = _problem(d, n=5, d=d)
    k = kernels.get_backend(backend)
    got = k.delta_vertex(edges, weights, 5, masks)
    for h in (31, 0b10110, 0b00111, 0):
        assert np.allclose(got[h], _brute_delta(edges, weights, 5, h), atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_linear_values_bruteforce(backend):
    pts, probs, theta, edges, weights, masks = _problem(9)
    got = kernels.get_backend(backend).linear_values(pts, theta, masks)
    for h in range(64):
        want = pts @ np.where([(h >> i) & 1 for i in range(6)], theta, 0.0)
        assert np.allclose(got[h], want, atol=1e-14)


@pytest.mark.parametrize("backend", BACKENDS)
def test_cancellation_snaps_to_zero(backend):
    pts = np.array([[0.1, 0.2, -0.3]])
    vals = kernels.get_backend(backend).linear_values(pts, np.ones(3), np.array([7], dtype=np.uint64))
    assert vals[0, 0] == 0.0


@pytest.mark.parametrize("backend", BACKENDS)
def test_psi2_rows_zero_and_tiny(backend):
    k = kernels.get_backend(backend)
    vals = np.array([[0.0, 0.0], [1e-300, -1e-300], [1.0, -1.0]])
    norms, _ = k.psi2_rows(vals, np.array([0.5, 0.5]))
    assert norms[0] == 0.0
    assert norms[1] == pytest.approx(1e-300 / np.sqrt(np.log(2)), rel=1e-11)
    assert norms[2] == pytest.approx(1 / np.sqrt(np.log(2)), rel=1e-11)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_partition_invariance(threads, seed):
    pts, probs, theta, edges, weights, masks = _problem(seed % 1000)
    one = kernels.map_masks(kernels.linear_psi2, masks, 1, points=pts, probs=probs, theta=theta)
    many = kernels.map_masks(kernels.linear_psi2, masks, threads, points=pts, probs=probs, theta=theta)
    assert np.array_equal(one, many)


def test_threads_env_default(monkeypatch):
    monkeypatch.setenv("SUBGAUSS_THREADS", "3")
    assert kernels.default_threads() == 3
    monkeypatch.setenv("SUBGAUSS_THREADS", "junk")
    assert kernels.default_threads() == 1
