"""Weighted uniform hypergraphs, their homomorphism densities and the Delta seminorm.

hom_W(x) = sum_e W(e) prod_{i in e} x_i.  The restriction W[H] keeps the
edges inside H, which is the same function as hom_W composed with the
coordinate projection onto H.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from subgauss import kernels
from subgauss.biased import (
    INCLUSION_TOL, SubsetMeasure, all_masks, cube_differences, exact_weights, reaches, set_to_mask, within,
)
from subgauss.directional import LAMBDA_MIN, LN2, MIN_K, SQRT2, TINY_K, HereditaryParams
from subgauss.dist import BOX_TOL, Example51Vector, RandomVector, ScalarDist, build_random_vector, pushforward
from subgauss.errors import CapacityError, DomainError
from subgauss.psi2 import psi2
from subgauss.report import BoundReport

DELTA_EXACT_CAP = 21
SQRT_LN2 = math.sqrt(LN2)


class Hypergraph:
    """A weighted d-uniform hypergraph on {0, ..., n-1}; zero weights are dropped."""

    __slots__ = ("n", "d", "edge_masks", "weights")

    def __init__(self, n: int, d: int, weights: Mapping[Any, float] | None = None):
        if n < 1 or not 1 <= d <= n:
            raise DomainError("need 1 <= d <= n")
        if n > 63:
            raise CapacityError("at most 63 vertices are supported")
        table: dict[int, float] = {}
        for edge, w in (weights or {}).items():
            e = sorted(int(i) for i in edge)
            if len(set(e)) != d or any(not 0 <= i < n for i in e):
                raise DomainError(f"edge {tuple(e)} is not a {d}-subset of range({n})")
            mask = set_to_mask(e)
            if mask in table:
                raise DomainError(f"edge {tuple(e)} given twice")
            if not math.isfinite(float(w)):
                raise DomainError("weights must be finite")
            if float(w) != 0.0:
                table[mask] = float(w)
        order = sorted(table)
        self.n = n
        self.d = d
        self.edge_masks = np.array(order, dtype=np.uint64)
        self.weights = np.array([table[k] for k in order], dtype=float)
        self.edge_masks.setflags(write=False)
        self.weights.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, d: int, edges: Iterable[Sequence[int]], weights: Iterable[float]) -> Hypergraph:
        edges = [tuple(e) for e in edges]
        weights = list(weights)
        if len(edges) != len(weights):
            raise DomainError("edges and weights differ in length")
        return cls(n, d, dict(zip(edges, weights)))

    @classmethod
    def complete(cls, n: int, d: int, weight: float = 1.0) -> Hypergraph:
        return cls(n, d, {e: weight for e in itertools.combinations(range(n), d)})

    @classmethod
    def linear(cls, theta: Sequence[float]) -> Hypergraph:
        """The d = 1 hypergraph whose density is <theta, x>."""
        return cls(len(theta), 1, {(i,): t for i, t in enumerate(theta)})

    @property
    def dim(self) -> int:
        return self.n

    @property
    def n_edges(self) -> int:
        return int(self.edge_masks.shape[0])

    def edges(self) -> list[tuple[int, ...]]:
        return [tuple(i for i in range(self.n) if (int(m) >> i) & 1) for m in self.edge_masks]

    def is_zero(self) -> bool:
        return self.n_edges == 0

    def weight(self, edge: Iterable[int]) -> float:
        mask = set_to_mask(edge)
        hit = np.flatnonzero(self.edge_masks == np.uint64(mask))
        return float(self.weights[hit[0]]) if hit.size else 0.0

    def restrict(self, H) -> Hypergraph:
        return restrict_hypergraph(self, H)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """hom_W at every row of ``points`` (kernel arithmetic, used for pushforwards)."""
        full = np.array([(1 << self.n) - 1], dtype=np.uint64)
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return kernels.hom_values(pts, self.edge_masks, self.weights, full)[0]

    def to_json(self) -> dict[str, Any]:
        return {"n": self.n, "d": self.d, "edges": [list(e) for e in self.edges()],
                "weights": self.weights.tolist()}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> Hypergraph:
        return cls.from_edges(int(obj["n"]), int(obj["d"]), obj.get("edges", []), obj.get("weights", []))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.n, self.d) == (other.n, other.d) and np.array_equal(self.edge_masks, other.edge_masks) \
            and np.array_equal(self.weights, other.weights)

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, d={self.d}, edges={self.n_edges})"


class HomDensity:
    """The functional x -> hom_W(x), usable with :func:`pushforward`."""

    def __init__(self, W: Hypergraph):
        self.W = W

    @property
    def dim(self) -> int:
        return self.W.n

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return self.W.evaluate(points)


def _as_mask(H) -> int:
    return int(H) if isinstance(H, (int, np.integer)) else set_to_mask(H)


def hom_eval(W: Hypergraph, x: Sequence[float]) -> float:
    """Exact (compensated) value of hom_W(x) for x in [-1, 1]^n."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != W.n:
        raise DomainError(f"x has dimension {x.shape[0]}, hypergraph {W.n}")
    if np.any(np.abs(x) > 1.0 + BOX_TOL):
        raise DomainError("x must lie in [-1, 1]^n")
    xs = x.tolist()
    return math.fsum(w * math.prod(xs[i] for i in e) for w, e in zip(W.weights.tolist(), W.edges()))


def restrict_hypergraph(W: Hypergraph, H) -> Hypergraph:
    """W[H]: the edges contained in H."""
    mask = _as_mask(H)
    if mask >> W.n:
        raise DomainError("H must be a subset of range(n)")
    h = np.uint64(mask)
    keep = (W.edge_masks & h) == W.edge_masks
    out = Hypergraph.__new__(Hypergraph)
    out.n, out.d = W.n, W.d
    out.edge_masks = W.edge_masks[keep]
    out.weights = W.weights[keep]
    return out


def project(x: Sequence[float], H) -> np.ndarray:
    """pi_H(x): zero the coordinates outside H."""
    x = np.array(x, dtype=float)
    mask = _as_mask(H)
    for i in range(x.shape[0]):
        if not (mask >> i) & 1:
            x[i] = 0.0
    return x


# ---------------------------------------------------------------------------
# Delta seminorm


@dataclass(frozen=True)
class DeltaProfile:
    per_i: np.ndarray
    seminorm: float
    mode: str  # "exact" (vertex enumeration) or "upper"


def _row_norms(a: np.ndarray) -> np.ndarray:
    """l_2 norm of each row (hypot accumulation, immune to underflow)."""
    out = np.zeros(a.shape[0])
    for j in range(a.shape[1]):
        out = np.hypot(out, a[:, j])
    return out


def _profile(per_i: np.ndarray, mode: str) -> DeltaProfile:
    return DeltaProfile(per_i, math.hypot(*per_i.tolist()), mode)


def delta_upper(W: Hypergraph) -> np.ndarray:
    """2 sum_{e containing i} |W(e)| for each i."""
    out = np.zeros(W.n)
    for m, w in zip(W.edge_masks.tolist(), W.weights.tolist()):
        for i in range(W.n):
            if (m >> i) & 1:
                out[i] += abs(w)
    return 2.0 * out


def delta_seminorm(W: Hypergraph, mode: str = "exact") -> DeltaProfile:
    """Per-coordinate oscillations Delta_i(hom_W) and their l_2 norm.

    hom_W is affine in each coordinate, so the supremum over the cube is
    reached at a vertex and equals 2 max |link_i| over the other coordinates.
    """
    if mode == "upper":
        return _profile(delta_upper(W), "upper")
    if mode != "exact":
        raise DomainError(f"unknown mode {mode!r}")
    if W.n > DELTA_EXACT_CAP:
        raise CapacityError(f"exact Delta needs n <= {DELTA_EXACT_CAP}; use mode='upper'")
    full = np.array([(1 << W.n) - 1], dtype=np.uint64)
    return _profile(kernels.delta_vertex(W.edge_masks, W.weights, W.n, full)[0], "exact")


def restricted_deltas(W: Hypergraph, masks: np.ndarray, threads: int | None = None) -> np.ndarray:
    """||hom_{W[H]}||_Delta for each mask (exact)."""
    if W.n > DELTA_EXACT_CAP:
        raise CapacityError(f"exact Delta needs n <= {DELTA_EXACT_CAP}")
    per = kernels.map_masks(kernels.delta_vertex, masks, threads,
                            edge_masks=W.edge_masks, weights=W.weights, n=W.n)
    return _row_norms(per)


def f_subgaussian_constant(X: RandomVector, W: Hypergraph) -> float:
    """psi_2(hom_W(X)) / ||hom_W||_Delta, with 0 for the zero function."""
    if X.dim != W.n:
        raise DomainError(f"vector has dimension {X.dim}, hypergraph {W.n}")
    g = psi2(pushforward(X, HomDensity(W)))
    if g == 0.0:
        return 0.0
    delta = delta_seminorm(W).seminorm
    if delta == 0.0:
        raise DomainError("hom_W is constant but hom_W(X) is not zero")
    return g / delta


# ---------------------------------------------------------------------------
# Spectrum of a hypergraph functional


@dataclass(frozen=True, eq=False)
class HyperSpectrum:
    masks: np.ndarray
    weights: np.ndarray
    psi2: np.ndarray
    n: int
    p: float
    d: int

    @property
    def mean(self) -> float:
        return math.fsum(self.weights * self.psi2)

    def measure(self, flags) -> float:
        return math.fsum(self.weights[np.asarray(flags, dtype=bool)])

    def to_csv(self, path) -> None:
        table = np.column_stack([self.masks.astype(float), self.weights, self.psi2])
        np.savetxt(path, table, fmt=["%d", "%.17g", "%.17g"], delimiter=",",
                   header="H_mask,weight,psi2", comments="")


def hyper_spectrum(X: RandomVector, W: Hypergraph, m: SubsetMeasure,
                   threads: int | None = None) -> HyperSpectrum:
    if X.dim != W.n or m.n != W.n:
        raise DomainError("vector, hypergraph and measure dimensions must agree")
    masks, weights = m.support()
    g = kernels.map_masks(kernels.hom_psi2, masks, threads, points=X.points, probs=X.probs,
                          edge_masks=W.edge_masks, weights=W.weights)
    return HyperSpectrum(masks, weights, g, m.n, m.p, W.d)


def restricted_constants(spec: HyperSpectrum, W: Hypergraph, threads: int | None = None) -> np.ndarray:
    """K_f*(X, W[H]) per subset; subsets with ||hom_{W[H]}||_Delta = 0 get 0."""
    deltas = restricted_deltas(W, spec.masks, threads)
    out = np.zeros_like(spec.psi2)
    pos = deltas > 0
    out[pos] = spec.psi2[pos] / deltas[pos]
    return out


# ---------------------------------------------------------------------------
# Checks


def averaging_identity_check(W: Hypergraph, x: Sequence[float], p: float) -> BoundReport:
    """p^d hom_W(x) = E_{H ~ mu_p} hom_{W[H]}(x)."""
    m = SubsetMeasure.exact(W.n, p)
    x = np.asarray(x, dtype=float).ravel()
    lhs = p ** W.d * hom_eval(W, x)
    masks, weights = m.support()
    vals = kernels.hom_values(x[None, :], W.edge_masks, W.weights, masks)[:, 0]
    rhs = math.fsum(weights * vals)
    return BoundReport("factA_1", "Eq (A.1)", abs(lhs - rhs), 0.0, sense="==",
                       params={"n": W.n, "d": W.d, "p": p, "lhs": lhs, "rhs": rhs})


def spectrum_lipschitz_check(X: RandomVector, W: Hypergraph,
                             spectrum: HyperSpectrum | None = None) -> BoundReport:
    """||H -> psi_2(hom_{W[H]}(X))||_Delta <= ||hom_W||_Delta / sqrt(ln 2)."""
    spec = spectrum or hyper_spectrum(X, W, SubsetMeasure.exact(W.n, 0.5))
    dg = cube_differences(spec.psi2, W.n)
    lhs = math.sqrt(math.fsum(dg * dg))
    rhs = delta_seminorm(W).seminorm / SQRT_LN2
    return BoundReport("factA_2", "Eq (A.3)", lhs, rhs, params={"n": W.n, "d": W.d})


def hyper_concentration_report(X: RandomVector, W: Hypergraph, m: SubsetMeasure,
                               params: HereditaryParams = HereditaryParams(),
                               spectrum: HyperSpectrum | None = None) -> list[BoundReport]:
    m.require_exact()
    spec = spectrum or hyper_spectrum(X, W, m)
    p, d = m.p, W.d
    pd = p ** d
    g, M = spec.psi2, spec.mean
    delta = delta_seminorm(W).seminorm
    full = psi2(pushforward(X, HomDensity(W)))
    base = {"n": W.n, "d": d, "p": p}
    reports = [BoundReport("factA_2_norm", "Eq (A.2)", pd * full, M, params=base)]

    kf = f_subgaussian_constant(X, W)
    K, why = _resolve(params.K, kf)
    if K is None:
        return reports + [BoundReport.skip(nm, an, why, **base) for nm, an in
                          [("lemmaA_3", "Eq (A.8)"), ("propA_4", "Eq (A.9)"), ("propA_4_core", "Eq (A.10)"),
                           ("corA_5", "Eq (A.21)"), ("corA_6", "Eq (A.22)")]]
    kp = {**base, "K": K, "kstar": kf, "delta": delta}
    lam = params.lam

    if delta == 0.0:
        why = "hom_W is identically zero"
        reports += [BoundReport.skip("lemmaA_3", "Eq (A.8)", why, **base),
                    BoundReport.skip("propA_4", "Eq (A.9)", why, **base)]
    else:
        t = params.t if params.t is not None else 0.5 * delta
        lhs = spec.measure(reaches(np.abs(g - M), t))
        rhs = 2.0 * math.exp(-2.0 * LN2 * (t / delta) * (t / delta))
        reports.append(BoundReport("lemmaA_3", "Eq (A.8)", lhs, rhs, params={**base, "t": t, "delta": delta}))
        if lam >= LAMBDA_MIN * (1 - 1e-15):
            lhs = spec.measure(reaches(g, lam * K * delta))
            reports.append(BoundReport("propA_4", "Eq (A.9)", lhs, 3.0 * math.exp(-LN2 / 32.0 * lam * lam),
                                       params={**kp, "lambda": lam}))
        else:
            reports.append(BoundReport.skip("propA_4", "Eq (A.9)", "lambda below 8*sqrt(2)", **kp))

    Q = max(2.0 * pd * K, SQRT2)
    Mp = max(4.0 * math.sqrt(2.0 * LN2) * pd * K, 4.0 * math.sqrt(LN2))
    lhs = spec.measure(within(g, math.sqrt(3.0 / LN2) * Mp * delta))
    reports.append(BoundReport("propA_4_core", "Eq (A.10)", lhs, 1.0 - 3.0 * math.exp(-Mp * Mp / (2.0 * Q * Q)),
                               sense=">=", params={**kp, "M": Mp, "Q": Q}))
    reports.append(BoundReport("corA_5", "Eq (A.21)", M, 12.0 * K * delta, params=kp))
    if delta == 0.0:
        reports.append(BoundReport.skip("corA_6", "Eq (A.22)", "hom_W is identically zero", **base))
    elif lam > 0:
        lhs = spec.measure(reaches(g, (12.0 + lam) * K * delta))
        rhs = 2.0 * math.exp(-2.0 * LN2 * lam * lam * K * K)
        reports.append(BoundReport("corA_6", "Eq (A.22)", lhs, rhs, params={**kp, "lambda": lam}))
    return reports


def _resolve(K: float | None, kstar: float) -> tuple[float | None, str | None]:
    if K is None:
        return max(kstar, MIN_K), None
    if K < kstar * (1 - 1e-12):
        return None, f"K={K!r} is below K_f*={kstar!r}"
    if K < MIN_K:
        return None, f"K={K!r} is below 1/sqrt(2)"
    return K, None


def hyper_constant(K: float, eta: float) -> float:
    """26/eta (K+1) sqrt(log2(4/eta)/2)."""
    if K <= 0 or not 0 < eta < 1:
        raise DomainError("need K > 0 and eta in (0, 1)")
    return 26.0 / eta * (K + 1.0) * math.sqrt(0.5 * math.log2(4.0 / eta))


def hyper_converse_constant(K: float, p: float, gamma: float, d: int) -> float:
    """p^-d (K + sqrt(1 - log2(gamma)))."""
    if K <= 0 or not 0 < p < 1 or not 0 < gamma <= 1 or d < 1:
        raise DomainError("parameter out of range")
    return (K + math.sqrt(1.0 - math.log2(gamma))) / p ** d


def hyper_theorem_check(X: RandomVector, W: Hypergraph, m: SubsetMeasure,
                        params: HereditaryParams = HereditaryParams(),
                        spectrum: HyperSpectrum | None = None,
                        threads: int | None = None) -> list[BoundReport]:
    """Good-set lower bound p^d - eta and its converse for the density of W."""
    m.require_exact()
    spec = spectrum or hyper_spectrum(X, W, m, threads)
    p, d = m.p, W.d
    base = {"n": W.n, "d": d, "p": p}
    ks = restricted_constants(spec, W, threads)
    kf = f_subgaussian_constant(X, W)
    reports = []

    eta = params.eta
    if not 0 < eta < p ** d:
        reports.append(BoundReport.skip("thmA_7", "Eq (A.25)", "eta must lie in (0, p^d)", **base, eta=eta))
    else:
        K = max(kf, TINY_K)
        C = hyper_constant(K, eta)
        lhs = spec.measure(ks <= C + INCLUSION_TOL)
        reports.append(BoundReport("thmA_7", "Eq (A.25)", lhs, p ** d - eta, sense=">=",
                                   params={**base, "K": K, "eta": eta, "C": C}))

    gamma = params.gamma
    if params.K is not None:
        K = params.K
    else:
        order = np.argsort(ks, kind="stable")
        cum = np.cumsum(spec.weights[order])
        K = max(float(ks[order[min(int(np.searchsorted(cum, gamma - 1e-15)), ks.size - 1)]]), TINY_K)
    premise = spec.measure(ks <= K + INCLUSION_TOL)
    if K <= 0 or premise < gamma - 1e-12:
        reports.append(BoundReport.skip("thmA_part2", "Eq (A.5)", "premise not satisfied",
                                        **base, K=K, gamma=gamma, premise=premise))
    else:
        C = hyper_converse_constant(K, p, gamma, d)
        reports.append(BoundReport("thmA_part2", "Eq (A.5)", kf, C,
                                   params={**base, "K": K, "gamma": gamma, "premise": premise}))
    return reports


# ---------------------------------------------------------------------------
# The cancelling example and the pseudorandomness condition


def build_example_5_1(n: int, d: int, base: ScalarDist) -> tuple[Hypergraph, RandomVector]:
    """Weight C(n, d) on {0..d-1}, -1 on every d-subset of {d..n+d-1}; X_i = Z for all i."""
    if d < 1 or n < d:
        raise DomainError("need n >= d >= 1")
    if n + d > 63:
        raise CapacityError("at most 63 vertices are supported")
    weights: dict[tuple, float] = {tuple(range(d)): float(math.comb(n, d))}
    for e in itertools.combinations(range(d, n + d), d):
        weights[e] = -1.0
    E = Hypergraph(n + d, d, weights)
    X = build_random_vector(Example51Vector(n, d, base))
    vals = E.evaluate(X.points)
    if np.any(vals != 0.0):
        raise RuntimeError("hom_E(X) is not identically zero")
    return E, X


def example_5_1_checks(n: int, d: int, p: float, threads: int | None = None) -> list[BoundReport]:
    """The Delta bounds for the restrictions E[H], checked on every H."""
    E, _ = build_example_5_1(n, d, ScalarDist.rademacher())
    N = n + d
    masks = all_masks(N)
    per = kernels.map_masks(kernels.delta_vertex, masks, threads,
                            edge_masks=E.edge_masks, weights=E.weights, n=N)
    head = (1 << d) - 1
    ml = masks.astype(np.int64)
    has_head = (ml & head) == head
    gsize = np.bitwise_count(ml >> d).astype(np.int64)
    inside = ((ml[:, None] >> np.arange(N)) & 1).astype(bool)

    b1 = per[~has_head][:, :d]
    b2 = np.where(inside, 0.0, per)
    bound3 = 2.0 * np.array([math.comb(int(g), d - 1) for g in gsize])
    b3 = per[:, d:].max(axis=1) - bound3 if N > d else np.zeros(1)
    in_family = (~has_head) & (gsize >= p * n / 2.0)
    sn = _row_norms(per)
    cap = 2.0 * n ** (d - 0.5)
    base = {"n": n, "d": d, "p": p}
    return [
        BoundReport("example5_1_head", "Example 5.1", float(np.abs(b1).max(initial=0.0)), 0.0, sense="==",
                    params=base),
        BoundReport("example5_1_outside", "Example 5.1", float(np.abs(b2).max(initial=0.0)), 0.0, sense="==",
                    params=base),
        BoundReport("example5_1_link", "Example 5.1", float(np.max(b3[~has_head], initial=0.0)), 0.0,
                    params=base),
        BoundReport("example5_1_seminorm", "Example 5.1", float(sn[in_family].max(initial=0.0)), cap,
                    params={**base, "family_measure": math.fsum(exact_weights(N, p, masks)[in_family])}),
    ]


def pseudorandomness_check(W: Hypergraph, p: float) -> BoundReport:
    """Worst margin of sum_{i in e in W[H]} W(e) >= (p^(d-1)/2) sum_{i in e} W(e) over i in H, |H| >= pn."""
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    masks = all_masks(W.n)
    sizes = np.bitwise_count(masks).astype(np.int64)
    masks = masks[sizes >= p * W.n - 1e-12]
    factor = p ** (W.d - 1) / 2.0
    worst = math.inf
    where = None
    for i in range(W.n):
        bit = np.uint64(1 << i)
        sel = masks[(masks & bit) != 0]
        touching = (W.edge_masks & bit) != 0
        em, w = W.edge_masks[touching], W.weights[touching]
        total = math.fsum(w.tolist())
        inner = np.zeros(sel.shape[0])
        for e, we in zip(em, w.tolist()):
            inner += np.where((sel & e) == e, we, 0.0)
        margin = inner - factor * total
        if margin.size and margin.min() < worst:
            k = int(np.argmin(margin))
            worst, where = float(margin[k]), (i, int(sel[k]))
    if where is None:
        worst = 0.0
    params = {"n": W.n, "d": W.d, "p": p}
    if where is not None:
        params.update(i=where[0], H_mask=where[1])
    return BoundReport("remarkA_9", "Remark A.9", worst, 0.0, sense=">=", params=params)
