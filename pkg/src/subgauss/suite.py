"""The randomized verification battery.

Each family draws its fixtures from :mod:`subgauss.fixtures` and returns
(scenario, report) pairs; every asserted row is an instance of a theorem, so
a single violation means a bug.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from subgauss.biased import SubsetMeasure, bounded_differences_check, hoeffding_check
from subgauss.directional import (
    LAMBDA_MIN, Direction, HereditaryParams, concentration_report, decomposition_identity_check,
    directional_constant, hereditary_theorem_check, lipschitz_vector, restricted_norm_identity,
    subvector_spectrum, thm41_report,
)
from subgauss.dist import ScalarDist
from subgauss.fixtures import (
    fixture_rng, random_direction, random_hypergraph, random_p, random_scalar, random_vector,
)
from subgauss.hypergraph import (
    Hypergraph, HomDensity, averaging_identity_check, build_example_5_1, delta_seminorm,
    example_5_1_checks, f_subgaussian_constant, hyper_concentration_report, hyper_spectrum,
    hyper_theorem_check, pseudorandomness_check, restricted_constants, spectrum_lipschitz_check,
)
from subgauss.partial import PartialParams, partial_consistency_check, partial_constant, prop_5_3_check
from subgauss.report import BoundReport

Tagged = list[tuple[str, BoundReport]]


@dataclass(frozen=True)
class SuiteSizes:
    linear: int = 500
    identities: int = 100
    hyper: int = 200
    reduction: int = 50
    partial: int = 200
    example51: int = 12
    max_n: int = 12
    max_n_identity: int = 8
    max_n_hyper: int = 10
    max_n_partial: int = 10

    def with_count(self, count: int) -> SuiteSizes:
        """Every family capped at ``count`` fixtures."""
        return replace(self, linear=min(self.linear, count), identities=min(self.identities, count),
                       hyper=min(self.hyper, count), reduction=min(self.reduction, count),
                       partial=min(self.partial, count), example51=min(self.example51, count))


def _tag(reports, i: int, scenario: str | Callable[[str], str]) -> Tagged:
    out = []
    for r in reports:
        r = replace(r, params={**r.params, "fixture": i})
        out.append((scenario(r.name) if callable(scenario) else scenario, r))
    return out


_LINEAR_SCENARIO = {
    "restricted_norm_identity": "eq4_36", "lemma3_4": "cor4_5", "prop4_3": "prop4_3",
    "cor4_4": "cor4_4", "cor4_4_relative": "cor4_4", "cor4_5": "cor4_5", "lemma4_6": "prop4_3",
    "thm4_1": "thm4_1", "prop3_1": "prop3_1", "prop4_8_small": "prop4_8",
    "prop4_8_large": "prop4_8", "cor4_11": "cor4_11",
}


def linear_case(seed: int, i: int, sizes: SuiteSizes = SuiteSizes(), threads: int | None = None) -> Tagged:
    rng = fixture_rng(seed, "linear", i)
    n = int(rng.integers(1, sizes.max_n + 1))
    X = random_vector(rng, n)
    theta = random_direction(rng, n)
    p = random_p(rng)
    m = SubsetMeasure.exact(n, p)
    spec = subvector_spectrum(X, theta, m, threads)
    lam = (LAMBDA_MIN, 16.0)[i % 2]
    params = HereditaryParams(lam=lam, t=float(rng.uniform(0.05, 1.0)) * theta.norm2,
                              gamma=float(rng.uniform(0.2, 1.0)), eta=0.1)
    reports = concentration_report(X, theta, m, params, spectrum=spec)
    small = replace(params, lam=float(rng.uniform(0.25, 4.0)))
    reports += [r for r in concentration_report(X, theta, m, small, spectrum=spec) if r.name == "cor4_5"]
    reports += hereditary_theorem_check(X, theta, m, params, spectrum=spec)
    if not theta.is_zero():
        kstar = directional_constant(X, theta)
        reports.append(thm41_report(spec, kstar, p, 0.05, {"n": n, "p": p}))
        alpha = replace(params, alpha=float(rng.uniform(0.05, 1.0)))
        reports += [r for r in hereditary_theorem_check(X, theta, m, alpha, spectrum=spec, include_flat=False)
                    if r.name.startswith("prop4_8")]
    out = _tag(reports, i, lambda name: _LINEAR_SCENARIO.get(name, "suite"))

    c = rng.normal(size=n)
    out += _tag([hoeffding_check(c, p, float(rng.uniform(0.05, 1.5)) * float(np.linalg.norm(c)))], i, "prop2_2")
    lip = lipschitz_vector(X, theta) * (1.0 + 1e-9)  # room for bisection error in both tables
    if np.any(lip):
        t = float(rng.uniform(0.05, 1.0)) * float(np.linalg.norm(lip))
        out += _tag([bounded_differences_check(spec.psi2, lip, p, t)], i, "prop2_3")
    return out


def identity_case(seed: int, i: int, sizes: SuiteSizes = SuiteSizes()) -> Tagged:
    rng = fixture_rng(seed, "identity", i)
    n = int(rng.integers(1, sizes.max_n_identity + 1))
    X = random_vector(rng, n)
    theta = random_direction(rng, n)
    p = random_p(rng)
    out = _tag(decomposition_identity_check(X, theta, p), i, "fact3_3")
    out += _tag([restricted_norm_identity(theta, p)], i, "eq4_36")
    nw = int(rng.integers(2, sizes.max_n_identity + 1))
    W = random_hypergraph(rng, nw, 2)
    x = rng.uniform(-1.0, 1.0, size=nw)
    out += _tag([averaging_identity_check(W, x, p)], i, "factA_1")
    return out


_HYPER_SCENARIO = {"factA_2_norm": "factA_1", "lemmaA_3": "propA_4", "propA_4": "propA_4",
                   "propA_4_core": "propA_4", "corA_5": "propA_4", "corA_6": "propA_4",
                   "thmA_7": "thmA_7", "thmA_part2": "thmA_7"}


def hyper_case(seed: int, i: int, sizes: SuiteSizes = SuiteSizes(), threads: int | None = None) -> Tagged:
    rng = fixture_rng(seed, "hyper", i)
    d = 1 + i % 3
    n = int(rng.integers(d, sizes.max_n_hyper + 1))
    X = random_vector(rng, n)
    W = random_hypergraph(rng, n, d)
    p = random_p(rng)
    m = SubsetMeasure.exact(n, p)
    spec = hyper_spectrum(X, W, m, threads)
    lam = (LAMBDA_MIN, 16.0)[(i // 3) % 2]
    delta = delta_seminorm(W).seminorm
    params = HereditaryParams(lam=lam, t=float(rng.uniform(0.05, 1.0)) * max(delta, 1e-300),
                              gamma=float(rng.uniform(0.2, 1.0)), eta=float(rng.uniform(0.05, 0.95)) * p ** d)
    reports = [spectrum_lipschitz_check(X, W, spectrum=spec)]
    reports += hyper_concentration_report(X, W, m, params, spectrum=spec)
    small = replace(params, lam=float(rng.uniform(0.25, 4.0)))
    reports += [r for r in hyper_concentration_report(X, W, m, small, spectrum=spec) if r.name == "corA_6"]
    reports += hyper_theorem_check(X, W, m, params, spectrum=spec, threads=threads)
    return _tag(reports, i, lambda name: _HYPER_SCENARIO.get(name, "factA_2"))


def reduction_case(seed: int, i: int, threads: int | None = None) -> Tagged:
    """d = 1 hypergraphs against the linear theory."""
    rng = fixture_rng(seed, "reduction", i)
    n = int(rng.integers(1, 9))
    X = random_vector(rng, n)
    theta = random_direction(rng, n)
    W = Hypergraph.linear(theta.coords)
    norm = theta.norm2
    tol = 1e-9 * max(1.0, norm)
    reports = [BoundReport("d1_delta", "Eq (5.2)", delta_seminorm(W).seminorm, 2.0 * norm, sense="==",
                           tol=tol, params={"n": n})]
    kd = directional_constant(X, theta)
    reports.append(BoundReport("d1_constant", "Eq (5.3)", f_subgaussian_constant(X, W), kd / 2.0, sense="==",
                               tol=1e-9 * max(1.0, kd), params={"n": n}))
    m = SubsetMeasure.exact(n, random_p(rng))
    lin = subvector_spectrum(X, theta, m, threads).kstar / 2.0
    hyp = restricted_constants(hyper_spectrum(X, W, m, threads), W, threads)
    reports.append(BoundReport("d1_restricted_constants", "Eq (A.25)", float(np.abs(lin - hyp).max()), 0.0,
                               sense="==", tol=1e-9 * max(1.0, float(lin.max())), params={"n": n}))
    return _tag(reports, i, "thmA_7")


def partial_case(seed: int, i: int, sizes: SuiteSizes = SuiteSizes(), threads: int | None = None) -> Tagged:
    rng = fixture_rng(seed, "partial", i)
    n = int(rng.integers(1, sizes.max_n_partial + 1))
    X = random_vector(rng, n)
    theta = random_direction(rng, n)
    p = random_p(rng)
    norm = theta.norm2
    taus = np.sort(rng.uniform(0.01, 1.5, size=4)) * max(norm, 1e-12) * math.sqrt(n)
    ks = [partial_constant(X, theta, float(t)) for t in taus]
    reports = [BoundReport("partial_monotone", "Eq (5.7)", ks[k + 1], ks[k], tol=1e-12,
                           params={"tau_lo": float(taus[k]), "tau_hi": float(taus[k + 1])})
               for k in range(len(ks) - 1)]
    reports += partial_consistency_check(X, theta, float(taus[0]))
    K = max(1.0 / math.sqrt(2.0), directional_constant(X, theta)) * (1.0 + float(rng.uniform(0.0, 0.5)))
    tau = max(1.0 / p, math.sqrt(2.0) * K) * norm * (1.0 + float(rng.uniform(0.0, 1.0)))
    alpha = theta.normalized().norm_inf if rng.random() < 0.5 else float(rng.uniform(0.05, 1.0))
    m = SubsetMeasure.exact(n, p)
    reports += prop_5_3_check(X, theta, m, PartialParams(K, tau, alpha), threads)
    return _tag(reports, i, "prop5_3")


def example51_case(seed: int, i: int, threads: int | None = None) -> Tagged:
    rng = fixture_rng(seed, "example51", i)
    d = 1 + i % 3
    n = int(rng.integers(d, 12 - d + 1))
    base = random_scalar(rng, 4)
    E, X = build_example_5_1(n, d, base)
    zero = float(np.abs(HomDensity(E).evaluate(X.points)).max())
    reports = [BoundReport("example5_1_zero", "Example 5.1", zero, 0.0, sense="==", tol=0.0,
                           params={"n": n, "d": d})]
    p = random_p(rng)
    m = SubsetMeasure.exact(n + d, p)
    params = HereditaryParams(eta=float(rng.uniform(0.05, 0.95)) * p ** d)
    reports += [r for r in hyper_theorem_check(X, E, m, params, threads=threads) if r.name == "thmA_7"]
    if d == 2:
        reports += example_5_1_checks(n, d, p, threads)
    out = _tag(reports, i, "example5_1")
    nc = 4 + i % 7
    pc = float(rng.uniform(2.0 / (nc + 1), 0.9))
    out += _tag([pseudorandomness_check(Hypergraph.complete(nc, 2), pc)], i, "remarkA_9")
    return out


def run_suite(seed: int, sizes: SuiteSizes = SuiteSizes(), threads: int | None = None,
              families: tuple[str, ...] | None = None) -> Tagged:
    """All families in a fixed order; the result depends only on (seed, sizes)."""
    plan = {
        "identities": (sizes.identities, lambda i: identity_case(seed, i, sizes)),
        "linear": (sizes.linear, lambda i: linear_case(seed, i, sizes, threads)),
        "hyper": (sizes.hyper, lambda i: hyper_case(seed, i, sizes, threads)),
        "reduction": (sizes.reduction, lambda i: reduction_case(seed, i, threads)),
        "partial": (sizes.partial, lambda i: partial_case(seed, i, sizes, threads)),
        "example51": (sizes.example51, lambda i: example51_case(seed, i, threads)),
    }
    out: Tagged = []
    for name, (count, fn) in plan.items():
        if families is not None and name not in families:
            continue
        for i in range(count):
            out.extend(fn(i))
    return out


def example42_reports(n: int, p: float, C: float, base: ScalarDist | None = None,
                      threads: int | None = None):
    """Exact good-set measure of the cancelling vector against its closed form.

    Returns (reports, spectrum).
    """
    from subgauss.directional import example42_closed_form, example42_direction
    from subgauss.dist import Example42, build_random_vector
    from subgauss.psi2 import psi2

    base = base or ScalarDist.rademacher()
    X = build_random_vector(Example42(n, base))
    theta = example42_direction(n)
    m = SubsetMeasure.exact(n + 1, p)
    spec = subvector_spectrum(X, theta, m, threads)
    z = psi2(base)
    h = np.bitwise_count(spec.masks >> np.uint64(1)).astype(float)
    first = (spec.masks & np.uint64(1)).astype(bool)
    formula = np.where(first, (n - h) * z / np.sqrt(n * n + h), np.sqrt(h) * z)
    err = float(np.abs(spec.kstar - formula).max())
    measure = spec.good_measure(C)
    closed = example42_closed_form(n, p, C, z)
    par = {"n": n, "p": p, "C": C}
    reports = [
        BoundReport("example4_2_spectrum", "Example 4.2", err, 0.0, sense="==", tol=1e-9, params=par),
        BoundReport("example4_2_measure", "Example 4.2", measure, closed, sense="==", tol=1e-9, params=par),
    ]
    return reports, spec
