"""Subgaussian constants of a random vector along restricted directions.

For a direction theta and a subset H, theta_H keeps the coordinates in H and
zeroes the rest.  The *spectrum* of (X, theta) is the table
H -> ||<theta_H, X>||_psi2 over all subsets, weighted by the p-biased
measure; every inequality checked here is evaluated exactly from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from subgauss import kernels
from subgauss.biased import (
    INCLUSION_TOL, SubsetMeasure, mask_to_set, reaches, set_to_mask, subset_sums, within,
)
from subgauss.dist import RandomVector, ScalarDist, linear_image, pushforward
from subgauss.errors import DomainError
from subgauss.psi2 import psi2
from subgauss.report import BoundReport

LN2 = math.log(2.0)
SQRT2 = math.sqrt(2.0)
MIN_K = 1.0 / SQRT2
LAMBDA_MIN = 8.0 * SQRT2
TINY_K = 1e-12
EPS = float(np.finfo(float).eps)

# Joint supports larger than this use the convolution route when the
# coordinates are known to be independent.
PRODUCT_ROUTE_MIN_ATOMS = 4096


class Direction:
    """A vector theta in R^n."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence[float]):
        arr = np.array(coords, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("a direction needs at least one coordinate")
        if not np.all(np.isfinite(arr)):
            raise DomainError("direction coordinates must be finite")
        arr.setflags(write=False)
        self.coords = arr

    @classmethod
    def flat(cls, n: int) -> Direction:
        return cls(np.ones(n))

    @property
    def dim(self) -> int:
        return int(self.coords.shape[0])

    @property
    def norm2(self) -> float:
        return math.hypot(*self.coords.tolist())

    def restricted_norms(self, masks: np.ndarray) -> np.ndarray:
        """||theta_H||_2 for each mask (hypot accumulation, immune to underflow)."""
        masks = np.asarray(masks, dtype=np.uint64)
        out = np.zeros(masks.shape[0])
        for i, t in enumerate(self.coords.tolist()):
            if t:
                bit = ((masks >> np.uint64(i)) & np.uint64(1)).astype(bool)
                out[bit] = np.hypot(out[bit], t)
        return out

    @property
    def norm_inf(self) -> float:
        return float(np.abs(self.coords).max())

    def is_zero(self) -> bool:
        return not np.any(self.coords)

    def restrict(self, H) -> Direction:
        return restrict_direction(self, H)

    def scaled(self, c: float) -> Direction:
        return Direction(self.coords * c)

    def normalized(self) -> Direction:
        norm = self.norm2
        if norm == 0:
            raise DomainError("cannot normalize the zero direction")
        return Direction(self.coords / norm)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return linear_image(points, self.coords)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Direction):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def __hash__(self) -> int:
        return hash(self.coords.tobytes())

    def __repr__(self) -> str:
        return f"Direction({self.coords.tolist()})"


def as_direction(theta) -> Direction:
    return theta if isinstance(theta, Direction) else Direction(theta)


def restrict_direction(theta, H) -> Direction:
    """theta_H; ``H`` is a mask or an iterable of 0-based indices."""
    theta = as_direction(theta)
    mask = int(H) if isinstance(H, (int, np.integer)) else set_to_mask(H)
    if mask >> theta.dim:
        raise DomainError("H must be a subset of range(n)")
    keep = np.array([(mask >> i) & 1 for i in range(theta.dim)], dtype=float)
    return Direction(theta.coords * keep)


def example42_direction(n: int) -> Direction:
    """(n, 1, ..., 1) in R^(n+1)."""
    coords = np.ones(n + 1)
    coords[0] = n
    return Direction(coords)


def directional_constant(X: RandomVector, theta) -> float:
    """Least K with ||<theta, X>||_psi2 <= K ||theta||_2 (0 for theta = 0)."""
    theta = as_direction(theta)
    if theta.dim != X.dim:
        raise DomainError(f"direction has dimension {theta.dim}, vector {X.dim}")
    if theta.is_zero():
        return 0.0
    return psi2(pushforward(X, theta)) / theta.norm2


# ---------------------------------------------------------------------------
# Spectrum


@dataclass(frozen=True)
class SpectrumRecord:
    H: int
    weight: float
    psi2: float
    restricted_norm: float
    kstar: float


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Per-subset psi_2 data for a vector and a direction (or functional)."""

    masks: np.ndarray
    weights: np.ndarray
    psi2: np.ndarray
    restricted_norm: np.ndarray
    n: int
    p: float

    @property
    def kstar(self) -> np.ndarray:
        out = np.zeros_like(self.psi2)
        pos = self.restricted_norm > 0
        out[pos] = self.psi2[pos] / self.restricted_norm[pos]
        return out

    @property
    def mean(self) -> float:
        """E_{H ~ mu_p} of the psi_2 column."""
        return math.fsum(self.weights * self.psi2)

    def __len__(self) -> int:
        return int(self.masks.shape[0])

    def __iter__(self) -> Iterator[SpectrumRecord]:
        return self.records()

    def records(self) -> Iterator[SpectrumRecord]:
        ks = self.kstar
        for h, w, g, r, k in zip(self.masks.tolist(), self.weights.tolist(), self.psi2.tolist(),
                                 self.restricted_norm.tolist(), ks.tolist()):
            yield SpectrumRecord(h, w, g, r, k)

    def measure(self, flags: np.ndarray) -> float:
        return math.fsum(self.weights[np.asarray(flags, dtype=bool)])

    def good(self, C: float) -> np.ndarray:
        """Subsets whose constant is at most C (ties resolved toward inclusion)."""
        return self.kstar <= C + INCLUSION_TOL

    def good_measure(self, C: float) -> float:
        return self.measure(self.good(C))

    def quantile_constant(self, gamma: float) -> float:
        """Smallest C with mu_p{kstar <= C} >= gamma."""
        ks = self.kstar
        order = np.argsort(ks, kind="stable")
        cum = np.cumsum(self.weights[order])
        idx = int(np.searchsorted(cum, gamma - 1e-15))
        return float(ks[order[min(idx, ks.size - 1)]])

    def to_csv(self, path) -> None:
        header = "H_mask,weight,psi2,restricted_norm,kstar"
        cols = [self.weights, self.psi2, self.restricted_norm, self.kstar]
        if self.masks.size == 0 or int(self.masks.max()) < 2 ** 53:
            # masks survive the float round trip exactly
            table = np.column_stack([self.masks.astype(float), *cols])
            np.savetxt(path, table, fmt=["%d"] + ["%.17g"] * 4, delimiter=",", header=header, comments="")
            return
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for h, *vals in zip(self.masks.tolist(), *(c.tolist() for c in cols)):
                fh.write(f"{h}," + ",".join(format(v, ".17g") for v in vals) + "\n")


def _product_route_psi2(marginals: Sequence[ScalarDist], theta: np.ndarray,
                        masks: np.ndarray) -> np.ndarray:
    """psi_2 of sum_{i in H} theta_i X_i for independent X_i, by convolution.

    Subsets that share the multiset {(theta_i, law of X_i)} share a
    distribution, so each distinct multiset is convolved and solved once.
    """
    distinct: list[ScalarDist] = []
    law_id = []
    for m in marginals:
        for k, d in enumerate(distinct):
            if d == m:
                law_id.append(k)
                break
        else:
            law_id.append(len(distinct))
            distinct.append(m)
    maxabs = [m.max_abs() for m in marginals]
    dists: dict[tuple, ScalarDist] = {(): ScalarDist.point_mass(0.0)}
    norms: dict[tuple, float] = {}

    def law(key: tuple) -> ScalarDist:
        if key not in dists:
            th, lid = key[-1]
            dists[key] = law(key[:-1]).convolve(distinct[lid].scaled(th))
        return dists[key]

    out = np.empty(masks.shape[0])
    n = theta.shape[0]
    th_list = theta.tolist()
    for r, h in enumerate(masks.tolist()):
        idx = [i for i in range(n) if (h >> i) & 1 and th_list[i] != 0.0]
        key = tuple(sorted((th_list[i], law_id[i]) for i in idx))
        if key not in norms:
            d = law(key)
            scale = math.fsum(abs(th_list[i]) * maxabs[i] for i in idx)
            vals = np.where(np.abs(d.values) <= len(idx) * EPS * scale, 0.0, d.values)
            norms[key] = float(kernels.psi2_rows(vals[None, :], d.probs)[0][0])
        out[r] = norms[key]
    return out


def linear_psi2_table(X: RandomVector, theta: Direction, masks: np.ndarray,
                      threads: int | None = None) -> np.ndarray:
    """||<theta_H, X>||_psi2 for each mask."""
    if X.marginals is not None and X.n_atoms > PRODUCT_ROUTE_MIN_ATOMS:
        return _product_route_psi2(X.marginals, theta.coords, masks)
    return kernels.map_masks(kernels.linear_psi2, masks, threads,
                             points=X.points, probs=X.probs, theta=theta.coords)


def subvector_spectrum(X: RandomVector, theta, m: SubsetMeasure,
                       threads: int | None = None) -> Spectrum:
    """Spectrum over every subset (exact mode) or over the sampled subsets."""
    theta = as_direction(theta)
    if theta.dim != X.dim or m.n != X.dim:
        raise DomainError("vector, direction and measure dimensions must agree")
    masks, weights = m.support()
    g = linear_psi2_table(X, theta, masks, threads)
    rn = theta.restricted_norms(masks)
    return Spectrum(masks, weights, g, rn, m.n, m.p)


def good_set_measure(X: RandomVector, theta, m: SubsetMeasure, C: float,
                     threads: int | None = None) -> float:
    """mu_p{H : X is C-subgaussian at theta_H}."""
    if C <= 0:
        raise DomainError("C must be positive")
    return subvector_spectrum(X, theta, m, threads).good_measure(C)


# ---------------------------------------------------------------------------
# Identities


def decomposition_identity_check(X: RandomVector, theta, p: float) -> list[BoundReport]:
    """<theta, x> = p^-1 sum_H mu_p(H) <theta_H, x> atomwise, plus its norm corollary."""
    theta = as_direction(theta)
    m = SubsetMeasure.exact(X.dim, p)
    masks, weights = m.support()
    vals = kernels.linear_values(X.points, theta.coords, masks)  # (masks, atoms)
    direct = linear_image(X.points, theta.coords)
    err = 0.0
    for a in range(X.n_atoms):
        avg = math.fsum(weights * vals[:, a]) / p
        err = max(err, abs(avg - direct[a]))
    reports = [BoundReport("decomposition_identity", "Eq (3.3)", err, 0.0, sense="==",
                           params={"n": X.dim, "p": p, "atoms": X.n_atoms})]
    spec = subvector_spectrum(X, theta, m)
    full = 0.0 if theta.is_zero() else psi2(pushforward(X, theta))
    reports.append(BoundReport("decomposition_norm", "Eq (3.4)", p * full, spec.mean,
                               params={"n": X.dim, "p": p}))
    return reports


def restricted_norm_identity(theta, p: float) -> BoundReport:
    """E_{H ~ mu_p} ||theta_H||_2^2 = p ||theta||_2^2."""
    theta = as_direction(theta)
    m = SubsetMeasure.exact(theta.dim, p)
    masks, weights = m.support()
    sq = subset_sums(theta.coords ** 2, masks)
    lhs = math.fsum(weights * sq)
    rhs = p * math.fsum(theta.coords ** 2)
    return BoundReport("restricted_norm_identity", "Eq (4.36)", lhs, rhs, sense="==",
                       params={"n": theta.dim, "p": p})


# ---------------------------------------------------------------------------
# Constants


@dataclass(frozen=True)
class HereditaryConstants:
    C_part2: float | None
    C_part1: float | None
    lambda_41: float | None
    alpha_41: float | None


def constant_part2(K: float, p: float, gamma: float) -> float:
    """p^-1 (K + sqrt(ln(2/gamma)))."""
    return (K + math.sqrt(math.log(2.0 / gamma))) / p


def constant_part1(K: float, p: float, eta: float) -> float:
    """18 (K+1)/p log2(4/eta)."""
    return 18.0 * (K + 1.0) / p * math.log2(4.0 / eta)


def hereditary_constants(K: float, p: float, gamma: float | None = None,
                         eta: float | None = None) -> HereditaryConstants:
    """Closed-form constants of the two directions of the hereditary theorem."""
    if K <= 0:
        raise DomainError("K must be positive")
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    c2 = None
    if gamma is not None:
        if not 0 < gamma <= 1:
            raise DomainError("gamma must lie in (0, 1]")
        c2 = constant_part2(K, p, gamma)
    c1 = lam = alpha = None
    if eta is not None:
        if not 0 < eta < p:
            raise DomainError("eta must lie in (0, p)")
        c1 = constant_part1(K, p, eta)
        lam = math.sqrt(math.log2(4.0 / eta) / 2.0) / (K + 1.0)
        alpha = p / math.sqrt(2.0 * math.log(4.0 / eta))
        first = math.sqrt(2.0 / p) * (12.0 + lam) * (K + 1.0)
        second = (12.0 + lam) * (K + 1.0) / alpha
        if not first <= second * (1 + 1e-12) or not second <= c1 * (1 + 1e-12):
            raise RuntimeError("constant chain for the main theorem failed")
    return HereditaryConstants(c2, c1, lam, alpha)


@dataclass(frozen=True)
class HereditaryParams:
    """Knobs for the report builders.

    ``K`` None means "derive from the data": the least valid constant
    K*(theta), raised to 1/sqrt(2) for statements that need it.  ``alpha``
    None means ||theta/|theta|_2||_inf, where both dichotomy branches apply.
    ``t`` None means ||theta||_2 / 2.
    """

    K: float | None = None
    gamma: float = 0.5
    eta: float = 0.1
    lam: float = LAMBDA_MIN
    alpha: float | None = None
    t: float | None = None
    C: float | None = None
    extra: dict = field(default_factory=dict)


def _tail_gaussian(lam: float, K: float) -> float:
    return 2.0 * math.exp(-2.0 * LN2 * lam * lam * K * K)


def _resolve_K(params: HereditaryParams, kstar: float, floor: float) -> tuple[float | None, str | None]:
    if params.K is None:
        return max(kstar, floor), None
    if params.K < kstar * (1 - 1e-12):
        return None, f"K={params.K!r} is below K*(theta)={kstar!r}"
    if params.K < floor:
        return None, f"K={params.K!r} is below {floor!r}"
    return params.K, None


def lipschitz_vector(X: RandomVector, theta: Direction) -> np.ndarray:
    """c_i = |theta_i| * ||X_i||_psi2, the bounded-difference constants of the spectrum."""
    return np.array([abs(t) * psi2(X.marginal(i)) if t else 0.0
                     for i, t in enumerate(theta.coords.tolist())])


def concentration_report(X: RandomVector, theta, m: SubsetMeasure,
                         params: HereditaryParams = HereditaryParams(),
                         spectrum: Spectrum | None = None) -> list[BoundReport]:
    """Concentration of the spectrum around its mean, and its reverse triangle bounds."""
    theta = as_direction(theta)
    m.require_exact()
    spec = spectrum or subvector_spectrum(X, theta, m)
    p = m.p
    reports = [restricted_norm_identity(theta, p)]
    names = ["lemma3_4", "prop4_3", "cor4_4", "cor4_5", "lemma4_6"]
    anchors = ["Eq (3.6)", "Eq (4.5)", "Eq (4.6)", "Eq (4.8)", "Eq (4.9)"]
    if theta.is_zero():
        return reports + [BoundReport.skip(nm, an, "zero direction")
                          for nm, an in zip(names, anchors)]
    norm = theta.norm2
    g, w = spec.psi2, spec.weights
    M = spec.mean
    kstar = directional_constant(X, theta)
    base = {"n": m.n, "p": p}

    c = lipschitz_vector(X, theta)
    cn = math.hypot(*c.tolist())
    t = params.t if params.t is not None else 0.5 * norm
    lhs = spec.measure(reaches(np.abs(g - M), t))
    rhs = 2.0 * math.exp(-2.0 * (t / cn) * (t / cn)) if cn > 0 else 0.0
    reports.append(BoundReport("lemma3_4", "Eq (3.6)", lhs, rhs,
                               params={**base, "t": t, "c_norm": cn}))

    K, why = _resolve_K(params, kstar, MIN_K)
    if K is None:
        return reports + [BoundReport.skip(nm, an, why) for nm, an in zip(names[1:4], anchors[1:4])] + \
            _lemma46(spec, p, max(kstar, TINY_K), norm, base)
    kp = {**base, "K": K, "kstar": kstar}

    lam = params.lam
    if lam >= LAMBDA_MIN * (1 - 1e-15):
        lhs = spec.measure(reaches(g, lam * K * norm))
        rhs = 3.0 * math.exp(-LN2 / 32.0 * lam * lam)
        reports.append(BoundReport("prop4_3", "Eq (4.5)", lhs, rhs, params={**kp, "lambda": lam}))
    else:
        reports.append(BoundReport.skip("prop4_3", "Eq (4.5)", "lambda below 8*sqrt(2)", **kp))

    reports.append(BoundReport("cor4_4", "Eq (4.6)", M, 12.0 * K * norm, params=kp))
    full = kstar * norm
    if full >= norm / SQRT2:
        reports.append(BoundReport("cor4_4_relative", "Eq (4.7)", M, 12.0 * full, params=kp))

    if lam > 0:
        lhs = spec.measure(reaches(g, (12.0 + lam) * K * norm))
        reports.append(BoundReport("cor4_5", "Eq (4.8)", lhs, _tail_gaussian(lam, K),
                                   params={**kp, "lambda": lam}))
    reports.extend(_lemma46(spec, p, K, norm, base))
    return reports


def _lemma46(spec: Spectrum, p: float, K: float, norm: float, base: dict) -> list[BoundReport]:
    Q = max(2.0 * p * K, SQRT2)
    Mp = max(4.0 * math.sqrt(2.0 * LN2) * p * K, 4.0 * math.sqrt(LN2))
    lhs = spec.measure(within(spec.psi2, math.sqrt(3.0 / LN2) * Mp * norm))
    rhs = 1.0 - 3.0 * math.exp(-Mp * Mp / (2.0 * Q * Q))
    return [BoundReport("lemma4_6", "Eq (4.9)", lhs, rhs, sense=">=",
                        params={**base, "K": K, "M": Mp, "Q": Q})]


def hereditary_theorem_check(X: RandomVector, theta, m: SubsetMeasure,
                             params: HereditaryParams = HereditaryParams(),
                             spectrum: Spectrum | None = None,
                             include_flat: bool = True) -> list[BoundReport]:
    """Both directions of the hereditary theorem and the l_inf dichotomy."""
    theta = as_direction(theta)
    m.require_exact()
    p = m.p
    base = {"n": m.n, "p": p}
    if theta.is_zero():
        reports = [BoundReport.skip(nm, an, "zero direction") for nm, an in
                   [("thm4_1", "Eq (4.2)"), ("prop3_1", "Prop 3.1"), ("prop4_8", "Eq (4.23)")]]
    else:
        spec = spectrum or subvector_spectrum(X, theta, m)
        kstar = directional_constant(X, theta)
        reports = [thm41_report(spec, kstar, p, params.eta, base),
                   prop31_report(X, theta, spec, kstar, p, params, base)]
        reports.extend(prop48_reports(spec, theta, kstar, p, params, base))
    if include_flat:
        c = theta.coords
        flat = spec if not theta.is_zero() and np.all(c == c[0]) else None
        reports.append(cor411_check(X, m, params.lam if params.lam > 0 else 2.0, spectrum=flat))
    return reports


def thm41_report(spec: Spectrum, kstar: float, p: float, eta: float, base: dict) -> BoundReport:
    if not 0 < eta < p:
        return BoundReport.skip("thm4_1", "Eq (4.2)", "eta must lie in (0, p)", **base, eta=eta)
    K = max(kstar, TINY_K)
    C = hereditary_constants(K, p, eta=eta).C_part1
    return BoundReport("thm4_1", "Eq (4.2)", spec.good_measure(C), p - eta, sense=">=",
                       params={**base, "K": K, "eta": eta, "C": C})


def prop31_report(X, theta, spec, kstar, p, params, base) -> BoundReport:
    gamma = params.gamma
    K = params.K if params.K is not None else max(spec.quantile_constant(gamma), TINY_K)
    premise = spec.good_measure(K)
    if K <= 0 or premise < gamma - 1e-12:
        return BoundReport.skip("prop3_1", "Prop 3.1", "premise not satisfied",
                                **base, K=K, gamma=gamma, premise=premise)
    # The statement assumes ||X_i||_psi2 <= 1; entries above that inflate the
    # deviation term by the exact Lipschitz constants.
    c = np.array([abs(t) * max(1.0, psi2(X.marginal(i))) if t else 0.0
                  for i, t in enumerate(theta.coords.tolist())])
    scale = math.hypot(*c.tolist()) / theta.norm2
    C = (K + scale * math.sqrt(math.log(2.0 / gamma))) / p
    return BoundReport("prop3_1", "Prop 3.1", kstar, C,
                       params={**base, "K": K, "gamma": gamma, "premise": premise,
                               "lipschitz_scale": scale})


def prop48_reports(spec, theta, kstar, p, params, base) -> list[BoundReport]:
    unit = theta.normalized()
    ninf = unit.norm_inf
    K, why = _resolve_K(params, kstar, MIN_K)
    alpha = params.alpha if params.alpha is not None else ninf
    lam = params.lam
    if K is None or lam <= 0 or not 0 < alpha <= 1:
        reason = why or "need lambda > 0 and alpha in (0, 1]"
        return [BoundReport.skip("prop4_8", "Eq (4.23)", reason, **base)]
    out = []
    kp = {**base, "K": K, "lambda": lam, "alpha": alpha, "theta_inf": ninf}
    if ninf <= alpha * (1 + 1e-12):
        thr = math.sqrt(2.0 / p) * (12.0 + lam) * K
        rhs = 1.0 - _tail_gaussian(lam, K) - 2.0 * math.exp(-p * p / (2.0 * alpha * alpha))
        out.append(BoundReport("prop4_8_small", "Eq (4.23)", spec.good_measure(thr), rhs,
                               sense=">=", params={**kp, "C": thr}))
    if ninf >= alpha * (1 - 1e-12):
        thr = (12.0 + lam) * K / alpha
        rhs = p - _tail_gaussian(lam, K)
        out.append(BoundReport("prop4_8_large", "Eq (4.24)", spec.good_measure(thr), rhs,
                               sense=">=", params={**kp, "C": thr}))
    return out


def cor411_check(X: RandomVector, m: SubsetMeasure, lam: float,
                 threads: int | None = None, spectrum: Spectrum | None = None) -> BoundReport:
    """Flat direction: good-set measure at sqrt(2/p)(12+lambda)(K+1) with K = K*(sigma)."""
    sigma = Direction.flat(X.dim)
    p, n = m.p, X.dim
    K = directional_constant(X, sigma)
    # the constants along any constant direction coincide with those along sigma
    spec = spectrum or subvector_spectrum(X, sigma, m, threads)
    thr = math.sqrt(2.0 / p) * (12.0 + lam) * (K + 1.0)
    rhs = 1.0 - _tail_gaussian(lam, K + 1.0) - 2.0 * math.exp(-p * p * n / 2.0)
    return BoundReport("cor4_11", "Eq (4.31)", spec.good_measure(thr), rhs, sense=">=",
                       params={"n": n, "p": p, "K": K, "lambda": lam, "C": thr})


def example42_closed_form(n: int, p: float, C: float, base_psi2: float) -> float:
    """Exact good-set measure for the high-cancellation vector of dimension n+1.

    With h = |H minus the first coordinate|, the constant is sqrt(h) psi2(Z)
    when the first coordinate is excluded and (n-h) psi2(Z)/sqrt(n^2+h) when
    it is included.
    """
    total = 0.0
    terms = []
    for h in range(n + 1):
        binom = math.comb(n, h)
        mass = binom * p ** h * (1.0 - p) ** (n - h)
        k_out = math.sqrt(h) * base_psi2
        k_in = (n - h) * base_psi2 / math.sqrt(n * n + h)
        if k_out <= C + INCLUSION_TOL:
            terms.append((1.0 - p) * mass)
        if k_in <= C + INCLUSION_TOL:
            terms.append(p * mass)
    total = math.fsum(terms)
    return total


def mask_set(mask: int) -> frozenset[int]:
    return mask_to_set(mask)
