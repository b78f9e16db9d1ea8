"""Partially subgaussian vectors: gaussian tails required only beyond a level tau.

X is (K, tau)-partially subgaussian at theta when
P(|<theta, X>| >= t) <= 2 exp(-t^2 / (K^2 |theta|_2^2)) for every t >= tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from subgauss import kernels
from subgauss.biased import INCLUSION_TOL, SubsetMeasure, subset_sums
from subgauss.directional import MIN_K, SQRT2, Direction, as_direction, directional_constant
from subgauss.dist import RandomVector, pushforward
from subgauss.errors import DomainError
from subgauss.report import BoundReport

SQRT_LN2 = math.sqrt(math.log(2.0))
CHUNK_CELLS = 1 << 20


@dataclass(frozen=True)
class PartialParams:
    K: float
    tau: float
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.K <= 0 or self.tau <= 0:
            raise DomainError("K and tau must be positive")
        if not 0 < self.alpha <= 1:
            raise DomainError("alpha must lie in (0, 1]")


def _row_constants(vals: np.ndarray, probs: np.ndarray, norms: np.ndarray, tau: float) -> np.ndarray:
    """Least partial constant for each row of values (rows with zero norm give 0).

    Walking the magnitudes in decreasing order, the running probability mass
    is the tail at that magnitude.  Tied magnitudes only underestimate before
    the last of the tie, so the row maximum is exact.
    """
    mags = np.abs(vals)
    order = np.argsort(-mags, axis=1, kind="stable")
    s = np.take_along_axis(mags, order, axis=1)
    tail = np.cumsum(probs[order], axis=1)
    ok = (s >= tau) & (s > 0)
    denom = np.sqrt(np.log(2.0 / np.minimum(tail, 1.0)))
    cand = np.where(ok, s / denom, 0.0)
    out = cand.max(axis=1) if cand.shape[1] else np.zeros(cand.shape[0])
    pos = norms > 0
    res = np.zeros_like(out)
    res[pos] = out[pos] / norms[pos]
    return res


def partial_constant(X: RandomVector, theta, tau: float) -> float:
    """Least K with P(|<theta,X>| >= t) <= 2 exp(-t^2/(K |theta|)^2) for all t >= tau.

    Tails are constant on each gap between atom magnitudes while the
    constraint tightens with t, so only magnitudes >= tau need checking.
    """
    theta = as_direction(theta)
    if theta.is_zero():
        raise DomainError("theta must be nonzero")
    if tau <= 0:
        raise DomainError("tau must be positive")
    D = pushforward(X, theta)
    return float(_row_constants(D.values[None, :], D.probs, np.array([theta.norm2]), tau)[0])


def eq_5_10_bound(K: float, eta: float, p: float, n: int) -> float:
    """1 - 3 exp(-p^2 eta^2 n / 2K^2) - 2 exp(-p^2 n / 2)."""
    return 1.0 - 3.0 * math.exp(-p * p * eta * eta * n / (2.0 * K * K)) - 2.0 * math.exp(-p * p * n / 2.0)


def restricted_partial_constants(X: RandomVector, theta: Direction, m: SubsetMeasure,
                                 tau: float, threads: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(weights, partial constant of theta_H at level tau) over the measure's subsets."""
    masks, weights = m.support()
    norms = theta.restricted_norms(masks)

    rows = max(1, CHUNK_CELLS // max(X.n_atoms, 1))

    def block(masks):
        out = []
        for lo in range(0, masks.shape[0], rows):
            part = masks[lo:lo + rows]
            vals = kernels.linear_values(X.points, theta.coords, part)
            nm = theta.restricted_norms(part)
            out.append(_row_constants(vals, X.probs, nm, tau))
        return np.concatenate(out) if out else np.zeros(0)

    ks = kernels.map_masks(block, masks, threads)
    ks[norms == 0] = 0.0
    return weights, ks


def prop_5_3_check(X: RandomVector, theta, m: SubsetMeasure, params: PartialParams,
                   threads: int | None = None) -> list[BoundReport]:
    """Good-set lower bounds for the restricted partial constants.

    theta is normalized to unit length, with tau scaled along with it.
    """
    theta = as_direction(theta)
    m.require_exact()
    if theta.dim != X.dim or m.n != X.dim:
        raise DomainError("vector, direction and measure dimensions must agree")
    if theta.is_zero():
        raise DomainError("theta must be nonzero")
    p = m.p
    K, alpha = params.K, params.alpha
    scale = theta.norm2
    unit = theta.normalized()
    tau = params.tau / scale
    base = {"n": m.n, "p": p, "K": K, "tau": tau, "alpha": alpha}
    kp = partial_constant(X, unit, tau)
    names = [("prop5_3_small", "Eq (5.8)"), ("prop5_3_large", "Eq (5.9)")]
    if kp > K + INCLUSION_TOL:
        return [BoundReport.skip(nm, an, "premise not satisfied", **base, partial_constant=kp)
                for nm, an in names]
    if K < MIN_K:
        raise DomainError("K must be at least 1/sqrt(2)")
    if tau < max(1.0 / p, SQRT2 * K) * (1 - 1e-12):
        raise DomainError(f"tau/|theta|_2 = {tau!r} is below max(1/p, sqrt(2) K)")

    weights, ks = restricted_partial_constants(X, unit, m, 2.0 * p * tau, threads)
    ninf = unit.norm_inf
    tail = 3.0 * math.exp(-p * p * tau * tau / (2.0 * K * K))
    reports = []
    small_lhs = math.fsum(weights[ks <= 2.0 * K / p + INCLUSION_TOL])
    if ninf <= alpha * (1 + 1e-12):
        rhs = 1.0 - tail - 2.0 * math.exp(-p * p / (2.0 * alpha * alpha))
        reports.append(BoundReport("prop5_3_small", "Eq (5.8)", small_lhs, rhs, sense=">=",
                                   params={**base, "C": 2.0 * K / p, "theta_inf": ninf}))
    if ninf >= alpha * (1 - 1e-12):
        C = 2.0 * SQRT2 * K / alpha
        lhs = math.fsum(weights[ks <= C + INCLUSION_TOL])
        reports.append(BoundReport("prop5_3_large", "Eq (5.9)", lhs, p - tail, sense=">=",
                                   params={**base, "C": C, "theta_inf": ninf}))
    c = theta.coords
    if np.all(c == c[0]):
        n = m.n
        eta = params.tau / (abs(float(c[0])) * n)  # tau = eta * n at the direction (1, ..., 1)
        reports.append(BoundReport("eq5_10", "Eq (5.10)", small_lhs, eq_5_10_bound(K, eta, p, n),
                                   sense=">=", params={**base, "eta": eta}))
    return reports


def partial_consistency_check(X: RandomVector, theta, tau: float) -> list[BoundReport]:
    """partial <= full constant, and full <= sqrt(3) max(partial, tau / (sqrt(ln 2) |theta|))."""
    theta = as_direction(theta)
    kp = partial_constant(X, theta, tau)
    kd = directional_constant(X, theta)
    bound = math.sqrt(3.0) * max(kp, tau / (SQRT_LN2 * theta.norm2))
    params = {"tau": tau, "partial": kp, "full": kd}
    return [BoundReport("partial_below_full", "Eq (5.7)", kp, kd, params=params, tol=1e-9),
            BoundReport("full_from_partial", "Prop 2.1(b)", kd, bound, params=params, tol=1e-9)]
