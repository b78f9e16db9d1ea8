import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import RAD, SQRT_LN2, prob, random_vectors
from subgauss.biased import SubsetMeasure
from subgauss.directional import (
    Direction, HereditaryParams, concentration_report, cor411_check, decomposition_identity_check,
    directional_constant, example42_closed_form, good_set_measure, hereditary_constants,
    hereditary_theorem_check, restrict_direction, restricted_norm_identity, subvector_spectrum,
)
from subgauss.dist import Cancellation, Example42, Product, RandomVector, build_random_vector
from subgauss.psi2 import psi2
from subgauss.report import all_hold
from subgauss.suite import example42_reports

CANCEL = build_random_vector(Cancellation(RAD, 2, frozenset({0})))
R = 1 / SQRT_LN2


def test_restrict_examples():
    assert restrict_direction([3, 4, 5], {0, 2}) == Direction([3, 0, 5])
    assert restrict_direction([3, 4, 5], 0).is_zero()
    assert restrict_direction([3, 4, 5], 0b111) == Direction([3, 4, 5])


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=8))
def test_norms_match_naive(c):
    th = Direction(c)
    assert th.norm2 == pytest.approx(math.hypot(*c), rel=1e-12, abs=0)
    assert th.norm_inf == max(abs(x) for x in c)


def test_directional_constant_examples():
    X = build_random_vector(Product((RAD, RAD)))
    assert directional_constant(X, [1, 1]) == pytest.approx(2 / math.sqrt(math.log(3)) / math.sqrt(2), abs=1e-9)
    assert directional_constant(CANCEL, [1, 1]) == 0.0
    assert directional_constant(X, [0, 0]) == 0.0


def test_spectrum_cancellation():
    spec = subvector_spectrum(CANCEL, [1, 1], SubsetMeasure.exact(2, 0.5))
    assert np.allclose(spec.psi2, [0, R, R, 0], atol=1e-12)
    assert spec.mean == pytest.approx(R / 2, abs=1e-12)


def test_spectrum_zero_direction():
    spec = subvector_spectrum(CANCEL, [0, 0], SubsetMeasure.exact(2, 0.5))
    assert np.all(spec.psi2 == 0) and spec.mean == 0


def test_spectrum_point_mass():
    X = RandomVector([1.0], [[1.0, 1.0]])
    spec = subvector_spectrum(X, [1, 1], SubsetMeasure.exact(2, 0.5))
    assert np.allclose(spec.psi2, np.array([0, 1, 1, 2]) * R, rtol=1e-12)
    assert spec.mean == pytest.approx(R, rel=1e-12)


@given(random_vectors(4), prob)
def test_spectrum_record_invariant(X, p):
    theta = np.arange(1, X.dim + 1, dtype=float)
    for rec in subvector_spectrum(X, theta, SubsetMeasure.exact(X.dim, p)):
        if rec.restricted_norm > 0:
            assert abs(rec.kstar * rec.restricted_norm - rec.psi2) <= 1e-9
        assert rec.psi2 == pytest.approx(directional_constant(X, restrict_direction(theta, rec.H))
                                         * rec.restricted_norm, rel=1e-10, abs=1e-15)


def test_good_set_examples():
    m = SubsetMeasure.exact(2, 0.5)
    assert good_set_measure(CANCEL, [1, 1], m, 1.0) == 0.5
    assert good_set_measure(CANCEL, [1, 1], m, 100.0) == 1.0


@given(random_vectors(4), st.lists(st.floats(-2, 2), min_size=4, max_size=4),
       st.floats(0.1, 10) | st.floats(-10, -0.1), prob)
def test_scale_invariance(X, coords, c, p):
    theta = np.array(coords[:X.dim])
    # subnormal coordinates do not scale exactly (5e-324 * 0.5 == 0)
    theta[np.abs(theta) < 1e-300] = 0.0
    # atoms closer than the 1e-15 merge tolerance fuse, so stay well above it
    if np.abs(theta).max() < 1e-6:
        return
    assert directional_constant(X, c * theta) == pytest.approx(directional_constant(X, theta), rel=1e-9)
    m = SubsetMeasure.exact(X.dim, p)
    a = subvector_spectrum(X, theta, m).kstar
    b = subvector_spectrum(X, c * theta, m).kstar
    assert np.allclose(a, b, rtol=1e-9, atol=1e-300)


@given(random_vectors(4), prob, st.floats(0.1, 3), st.floats(0.1, 3))
def test_good_measure_monotone(X, p, C1, C2):
    spec = subvector_spectrum(X, np.ones(X.dim), SubsetMeasure.exact(X.dim, p))
    lo, hi = sorted((C1, C2))
    assert np.all(spec.good(hi)[spec.good(lo)])
    assert spec.good_measure(lo) <= spec.good_measure(hi)


@given(random_vectors(5), st.lists(st.floats(-3, 3), min_size=5, max_size=5), prob)
def test_decomposition_identity(X, coords, p):
    reps = decomposition_identity_check(X, coords[:X.dim], p)
    assert reps[0].lhs <= 1e-12 and all_hold(reps)


def test_decomposition_single_coordinate():
    X = build_random_vector(Product((RAD,)))
    reps = decomposition_identity_check(X, [1.0], 0.3)
    assert reps[0].lhs <= 1e-15 and all_hold(reps)


def test_decomposition_zero_direction():
    reps = decomposition_identity_check(CANCEL, [0, 0], 0.4)
    assert reps[0].lhs == 0 and all_hold(reps)


def bruteforce_norm_identity(theta, p):
    n = len(theta)
    tot = 0.0
    for H in itertools.product((0, 1), repeat=n):
        k = sum(H)
        tot += p ** k * (1 - p) ** (n - k) * sum(t * t for t, h in zip(theta, H) if h)
    return tot


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8), prob)
def test_restricted_norm_identity(theta, p):
    r = restricted_norm_identity(theta, p)
    assert r.holds
    assert r.lhs == pytest.approx(bruteforce_norm_identity(theta, p), rel=1e-12, abs=1e-12)


def test_restricted_norm_example():
    r = restricted_norm_identity([1, 1], 0.5)
    assert r.lhs == 1.0 and r.rhs == 1.0


def test_constants_examples():
    assert hereditary_constants(1, 0.5, gamma=1).C_part2 == pytest.approx(2 * (1 + math.sqrt(math.log(2))))
    c = hereditary_constants(1, 0.5, eta=0.25)
    assert c.C_part1 == pytest.approx(288.0)
    assert c.alpha_41 == pytest.approx(0.5 / math.sqrt(2 * math.log(16)), abs=1e-12)
    assert c.alpha_41 == pytest.approx(0.21234, abs=1e-5)


def test_concentration_rhs_value():
    X = build_random_vector(Product((RAD, RAD)))
    reps = concentration_report(X, [1, 1], SubsetMeasure.exact(2, 0.5), HereditaryParams(lam=8 * math.sqrt(2)))
    r = [r for r in reps if r.name == "prop4_3"][0]
    assert r.rhs == pytest.approx(0.1875, abs=1e-12)


def test_mean_bound_cancellation():
    reps = concentration_report(CANCEL, [1, 1], SubsetMeasure.exact(2, 0.5), HereditaryParams(K=1 / math.sqrt(2)))
    r = [r for r in reps if r.name == "cor4_4"][0]
    assert r.lhs == pytest.approx(R / 2, abs=1e-12) and r.rhs == pytest.approx(12.0) and r.holds


@given(random_vectors(5), prob, st.sampled_from([8 * math.sqrt(2), 16.0]))
def test_reports_hold(X, p, lam):
    theta = np.linspace(1, 2, X.dim)
    m = SubsetMeasure.exact(X.dim, p)
    params = HereditaryParams(lam=lam, gamma=0.7, eta=min(0.1, p / 2))
    assert all_hold(concentration_report(X, theta, m, params))
    assert all_hold(hereditary_theorem_check(X, theta, m, params))


def test_heredity_gamma_one():
    X = build_random_vector(Product((RAD,) * 3))
    reps = hereditary_theorem_check(X, [1, 1, 1], SubsetMeasure.exact(3, 0.5), HereditaryParams(K=5.0, gamma=1.0))
    r = [r for r in reps if r.name == "prop3_1"][0]
    assert r.skipped is None and r.holds
    # Rademacher marginals have psi_2 = R > 1, which scales the deviation term by R
    assert r.params["lipschitz_scale"] == pytest.approx(R, rel=1e-12)
    assert r.rhs == pytest.approx((5.0 + R * math.sqrt(math.log(2))) / 0.5, rel=1e-12)
    assert r.params["premise"] == pytest.approx(1.0)


def test_heredity_premise_failure_is_skip():
    X = build_random_vector(Product((RAD,) * 3))
    reps = hereditary_theorem_check(X, [1, 1, 1], SubsetMeasure.exact(3, 0.5), HereditaryParams(K=0.01, gamma=1.0))
    r = [r for r in reps if r.name == "prop3_1"][0]
    assert r.skipped == "premise not satisfied" and r.holds is None


def test_cancellation_formula_matches_enumeration():
    n, p, C = 8, 0.5, 2.0
    X = build_random_vector(Example42(n, RAD))
    theta = np.ones(n + 1)
    theta[0] = n
    exact = good_set_measure(X, theta, SubsetMeasure.exact(n + 1, p), C)
    assert exact == pytest.approx(example42_closed_form(n, p, C, R), abs=1e-12)


def test_cancellation_desk_scale_value():
    reps, spec = example42_reports(20, 0.5, 3.0, RAD, None)
    want = 0.5 + 0.5 * sum(math.comb(20, k) for k in range(7)) / 2 ** 20
    assert spec.good_measure(3.0) == pytest.approx(want, abs=1e-9)
    assert all_hold(reps)
    assert len(spec) == 2 ** 21


def test_good_set_theorem_on_cancelling_vector():
    X = build_random_vector(Example42(10, RAD))
    theta = np.ones(11)
    theta[0] = 10
    reps = hereditary_theorem_check(X, theta, SubsetMeasure.exact(11, 0.5), HereditaryParams(eta=0.1))
    r = [r for r in reps if r.name == "thm4_1"][0]
    assert r.rhs == pytest.approx(0.4) and r.holds


def test_flat_direction_rademacher():
    X = build_random_vector(Product((RAD,) * 10))
    r = cor411_check(X, SubsetMeasure.exact(10, 0.5), 2.0)
    K = r.params["K"]
    assert r.rhs == pytest.approx(1 - 2 * math.exp(-2 * math.log(2) * 4 * (K + 1) ** 2) - 2 * math.exp(-0.25 * 10 / 2))
    assert r.holds


def test_sampled_spectrum():
    X = build_random_vector(Product((RAD,) * 4))
    spec = subvector_spectrum(X, np.ones(4), SubsetMeasure.sampled(4, 0.5, 500, 1))
    assert len(spec) == 500 and abs(spec.weights.sum() - 1) < 1e-12


def test_spectrum_csv(tmp_path):
    spec = subvector_spectrum(CANCEL, [1, 1], SubsetMeasure.exact(2, 0.5))
    spec.to_csv(tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "H_mask,weight,psi2,restricted_norm,kstar"
    assert [int(l.split(",")[0]) for l in lines[1:]] == [0, 1, 2, 3]
    assert float(lines[2].split(",")[2]) == spec.psi2[1]


def test_spectrum_csv_wide_masks_exact(tmp_path):
    from subgauss.directional import Spectrum
    masks = np.array([0, 2 ** 60 + 1, 2 ** 63 + 3], dtype=np.uint64)
    ones = np.ones(3) / 3
    spec = Spectrum(masks=masks, weights=ones, psi2=ones, restricted_norm=ones, n=64, p=0.5)
    spec.to_csv(tmp_path / "w.csv")
    rows = (tmp_path / "w.csv").read_text().splitlines()[1:]
    assert [int(r.split(",")[0]) for r in rows] == [0, 2 ** 60 + 1, 2 ** 63 + 3]
    assert float(rows[1].split(",")[4]) == spec.kstar[1]
