import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from conftest import RAD, scalar_dists
from subgauss.dist import ScalarDist
from subgauss.psi2 import moment, psi2, psi2_from_dyadic_tails, psi2_norm, tail_duality_check


def brent_psi2(D: ScalarDist) -> float:
    f = lambda s: float(np.sum(D.probs * np.exp(np.minimum((D.values / s) ** 2, 700.0)))) - 2.0
    hi = D.max_abs() / math.sqrt(math.log(2.0)) * 1.0001
    return brentq(f, 1e-3 * hi, hi, xtol=1e-15, rtol=1e-14)


def test_point_mass_zero():
    r = psi2_norm(ScalarDist.point_mass(0.0))
    assert r.norm == 0.0


def test_rademacher_closed_form():
    assert psi2(RAD) == pytest.approx(1 / math.sqrt(math.log(2)), abs=1e-9)


def test_uniform_three_point():
    assert psi2(ScalarDist.uniform([-1, 0, 1])) == pytest.approx(1 / math.sqrt(math.log(2.5)), abs=1e-9)


@pytest.mark.parametrize("c", [-3.0, -0.25, 0.5, 1.0])
def test_constant(c):
    assert psi2(ScalarDist.point_mass(c)) == pytest.approx(abs(c) / math.sqrt(math.log(2)), abs=1e-9)


@given(scalar_dists())
def test_matches_brent(D):
    # subnormal scales cannot resolve relative perturbations
    if D.max_abs() < 1e-300:
        return
    assert psi2(D) == pytest.approx(brent_psi2(D), rel=1e-10)


@given(scalar_dists())
def test_moment_oracle(D):
    s = psi2(D)
    if D.max_abs() < 1e-300:
        return
    assert moment(D, s * (1 + 1e-6)) < 2.0
    assert moment(D, s * (1 - 1e-6)) > 2.0
    assert abs(moment(D, s) - 2.0) <= 1e-9


@given(scalar_dists(), st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3))
def test_homogeneity(D, c):
    assert psi2(D.scaled(c)) == pytest.approx(abs(c) * psi2(D), rel=1e-9, abs=1e-12)


@given(scalar_dists())
def test_linf_bound(D):
    assert psi2(D) <= D.max_abs() / math.sqrt(math.log(2.0)) * (1 + 1e-12)


@given(scalar_dists(3), scalar_dists(3))
def test_triangle_on_independent_sum(D, E):
    assert psi2(D.convolve(E)) <= psi2(D) + psi2(E) + 1e-9


def test_tail_duality_rademacher():
    reps = tail_duality_check(RAD, 1 / math.sqrt(math.log(2)))
    a = [r for r in reps if r.name == "tail_from_norm"][0]
    assert a.lhs == 1.0 and a.rhs == pytest.approx(1.0, abs=1e-12) and a.holds
    b = [r for r in reps if r.name == "norm_from_tails"][0]
    assert b.rhs == pytest.approx(2.0804, abs=1e-4) and b.holds


def test_tail_duality_zero_vacuous():
    reps = tail_duality_check(ScalarDist.point_mass(0.0), 1.0)
    assert all(r.holds for r in reps)
    assert [r.name for r in reps] == ["norm_from_tails"]


@given(scalar_dists(), st.floats(0.2, 3.0))
def test_tail_duality_always_holds(D, K):
    assert all(r.holds is not False for r in tail_duality_check(D, K))


def test_dyadic_rademacher():
    assert not psi2_from_dyadic_tails(RAD, 1.0, 1.0).hypothesis_holds
    r = psi2_from_dyadic_tails(RAD, 1.0, 2.0)
    assert r.hypothesis_holds and r.bound == pytest.approx(4 * math.sqrt(3)) and r.holds


def test_dyadic_zero():
    r = psi2_from_dyadic_tails(ScalarDist.point_mass(0.0), 0.5, 0.1)
    assert r.hypothesis_holds and r.psi2 == 0.0 and r.holds


@given(scalar_dists(), st.floats(0.05, 1.0), st.floats(0.1, 3.0))
def test_dyadic_conclusion(D, R, C):
    assert psi2_from_dyadic_tails(D, R, C).holds
