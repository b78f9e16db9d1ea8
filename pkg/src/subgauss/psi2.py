"""Exact psi_2 (Orlicz) norm of finitely supported random variables.

For a nonzero X the map s -> E exp((X/s)^2) is continuous and strictly
decreasing on (0, inf), so the norm is its unique crossing of 2 and can be
found by bisection.  This module is the scalar reference; the batched kernels
in :mod:`subgauss.kernels` reproduce it over many subsets at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from subgauss.dist import ScalarDist
from subgauss.report import BoundReport

SQRT_LN2 = math.sqrt(math.log(2.0))
RTOL = 1e-12
MAX_ITER = 200
EXP_CAP = 700.0


@dataclass(frozen=True)
class Psi2Result:
    norm: float
    iterations: int
    bracket: tuple[float, float]


def moment(D: ScalarDist, s: float) -> float:
    """E exp((X/s)^2), with exponents capped at 700 to avoid overflow."""
    return _moment(D.values.tolist(), D.probs.tolist(), s)


def _moment(vals: list[float], probs: list[float], s: float) -> float:
    return math.fsum(p * math.exp(min((v / s) * (v / s), EXP_CAP)) for v, p in zip(vals, probs))


def psi2_norm(D: ScalarDist, rtol: float = RTOL) -> Psi2Result:
    """inf{s > 0 : E exp((X/s)^2) <= 2}, to relative tolerance ``rtol``.

    The upper bracket is ||X||_inf / sqrt(ln 2), which always satisfies the
    moment condition; the lower bracket halves from there until it fails.
    """
    mx = D.max_abs()
    if mx == 0.0:
        return Psi2Result(0.0, 0, (0.0, 0.0))
    # homogeneity: bisect on X / ||X||_inf, then scale back
    vals, probs = (D.values / mx).tolist(), D.probs.tolist()
    hi = 1.0 / SQRT_LN2
    lo = 0.5 * hi
    it = 1
    while _moment(vals, probs, lo) <= 2.0:
        hi, lo = lo, 0.5 * lo
        it += 1
        if it > MAX_ITER:
            raise RuntimeError("psi2 lower bracket search did not terminate")
    while hi - lo > rtol * hi:
        it += 1
        if it > MAX_ITER:
            raise RuntimeError("psi2 bisection exceeded the iteration cap")
        mid = 0.5 * (lo + hi)
        if _moment(vals, probs, mid) <= 2.0:
            hi = mid
        else:
            lo = mid
    return Psi2Result(hi * mx, it, (lo * mx, hi * mx))


def psi2(D: ScalarDist) -> float:
    return psi2_norm(D).norm


def linf_bound(D: ScalarDist) -> float:
    """||X||_inf / sqrt(ln 2), an upper bound for the psi_2 norm."""
    return D.max_abs() / SQRT_LN2


def tail_bound(t: float, scale: float) -> float:
    """2 exp(-t^2 / scale^2), with the scale -> 0 limit taken as 0."""
    if scale == 0.0:
        return 0.0
    return 2.0 * math.exp(-(t / scale) * (t / scale))


def tail_duality_check(D: ScalarDist, K: float) -> list[BoundReport]:
    """Tail bound from the norm, and the norm bound from a tail hypothesis.

    Tails of a finite distribution are constant between consecutive atom
    magnitudes while the gaussian profile decreases, so comparing at the
    magnitudes themselves decides the hypothesis for every t > 0.
    """
    if K <= 0:
        raise ValueError("K must be positive")
    norm = psi2(D)
    reports = []
    for t in D.magnitudes().tolist():
        reports.append(BoundReport(
            "tail_from_norm", "Prop 2.1(a)", D.tail(t), tail_bound(t, norm),
            params={"t": t, "psi2": norm},
        ))
    hyp = all(D.tail(t) <= tail_bound(t, K) + 1e-12 for t in D.magnitudes().tolist())
    if hyp:
        reports.append(BoundReport(
            "norm_from_tails", "Prop 2.1(b)", norm, math.sqrt(3.0) * K, params={"K": K},
        ))
    else:
        reports.append(BoundReport.skip(
            "norm_from_tails", "Prop 2.1(b)", "tail hypothesis fails", K=K,
        ))
    return reports


@dataclass(frozen=True)
class DyadicTailResult:
    hypothesis_holds: bool
    bound: float
    psi2: float

    @property
    def holds(self) -> bool:
        """Conclusion psi_2 <= bound (vacuously true when the hypothesis fails)."""
        return (not self.hypothesis_holds) or self.psi2 <= self.bound + 1e-12


def psi2_from_dyadic_tails(D: ScalarDist, R: float, C: float) -> DyadicTailResult:
    """Norm bound sqrt(3) max{2C, R/sqrt(ln 2)} from tails at the points 2^j R.

    Only j with 2^j R <= ||X||_inf need checking; beyond that the tail is 0.
    """
    if R <= 0 or C <= 0:
        raise ValueError("R and C must be positive")
    mx = D.max_abs()
    ok = True
    t = R
    while t <= mx:
        if D.tail(t) > tail_bound(t, C) + 1e-12:
            ok = False
            break
        t *= 2.0
    bound = math.sqrt(3.0) * max(2.0 * C, R / SQRT_LN2)
    return DyadicTailResult(ok, bound, psi2(D))
