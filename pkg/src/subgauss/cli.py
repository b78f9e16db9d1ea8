"""Command-line scenario runner.

    subgauss [run] <scenario> [--config file.json] [--seed u64] [--out dir] [--threads k] [flags]
    subgauss list

Exit status: 0 all bounds hold, 1 a bound is violated, 2 bad configuration,
3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from subgauss import kernels
from subgauss.biased import SubsetMeasure, bounded_differences_check, hoeffding_check
from subgauss.directional import (
    LAMBDA_MIN, Direction, HereditaryParams, concentration_report, cor411_check,
    decomposition_identity_check, hereditary_theorem_check, lipschitz_vector, restricted_norm_identity,
    subvector_spectrum,
)
from subgauss.dist import Product, RandomVector, ScalarDist, build_random_vector, spec_from_json
from subgauss.errors import CapacityError, DomainError
from subgauss.fixtures import fixture_rng, random_direction, random_hypergraph, random_p, random_vector
from subgauss.hypergraph import (
    Hypergraph, averaging_identity_check, example_5_1_checks, hyper_concentration_report,
    hyper_spectrum, hyper_theorem_check, pseudorandomness_check, spectrum_lipschitz_check,
)
from subgauss.partial import PartialParams, prop_5_3_check
from subgauss.report import BoundReport
from subgauss.suite import SuiteSizes, example42_reports, example51_case, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_CAPACITY = 0, 1, 2, 3


class ConfigError(Exception):
    pass


@dataclass
class ScenarioConfig:
    scenario: str
    vector: dict | None = None
    direction: list | None = None
    hypergraph: dict | None = None
    measure: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    output: str = "."
    seed: int = 0
    threads: int | None = None
    fixtures: int | None = None

    # -- resolved inputs -------------------------------------------------

    def rng(self) -> np.random.Generator:
        return fixture_rng(self.seed, self.scenario, 0)

    def get(self, key: str, default: Any = None) -> Any:
        return self.params.get(key, default)

    def K(self) -> float | None:
        k = self.params.get("K")
        return None if k in (None, "auto") else float(k)

    def vector_or_random(self, rng: np.random.Generator) -> RandomVector:
        if self.vector is not None:
            return build_random_vector(spec_from_json(self.vector))
        n = int(self.measure.get("n", self.params.get("n", 0)) or rng.integers(2, 9))
        return random_vector(rng, n)

    def direction_for(self, X: RandomVector, rng: np.random.Generator) -> Direction:
        if self.direction is not None:
            return Direction(self.direction)
        return random_direction(rng, X.dim)

    def measure_for(self, n: int, rng: np.random.Generator) -> SubsetMeasure:
        p = float(self.measure.get("p", self.params.get("p", 0.0)) or random_p(rng))
        if int(self.measure.get("n", n)) != n:
            raise ConfigError(f"measure n={self.measure['n']} does not match dimension {n}")
        mode = self.measure.get("mode", "exact")
        if mode == "sampled":
            return SubsetMeasure.sampled(n, p, int(self.measure.get("count", 0)),
                                         int(self.measure.get("seed", self.seed)))
        return SubsetMeasure(n, p, mode)

    def hereditary(self, **overrides) -> HereditaryParams:
        alpha = self.get("alpha")
        kw = dict(K=self.K(), gamma=float(self.get("gamma", 0.5)), eta=float(self.get("eta", 0.1)),
                  lam=float(self.get("lambda", LAMBDA_MIN)), alpha=None if alpha is None else float(alpha),
                  t=None if self.get("t") is None else float(self.get("t")),
                  C=None if self.get("C") is None else float(self.get("C")))
        kw.update(overrides)
        return HereditaryParams(**kw)


Result = tuple[list[BoundReport], Any]


def _linear_inputs(cfg: ScenarioConfig):
    rng = cfg.rng()
    X = cfg.vector_or_random(rng)
    theta = cfg.direction_for(X, rng)
    m = cfg.measure_for(X.dim, rng)
    return X, theta, m


def _pick(reports: list[BoundReport], *prefixes: str) -> list[BoundReport]:
    return [r for r in reports if r.name.startswith(prefixes)]


def _run_fact3_3(cfg):
    X, theta, m = _linear_inputs(cfg)
    return decomposition_identity_check(X, theta, m.p), None


def _run_eq4_36(cfg):
    X, theta, m = _linear_inputs(cfg)
    return [restricted_norm_identity(theta, m.p)], None


def _run_prop2_2(cfg):
    rng = cfg.rng()
    c = cfg.get("c") or rng.normal(size=int(cfg.get("n", 8))).tolist()
    p = float(cfg.get("p", 0.5))
    t = float(cfg.get("t", 0.5 * math.sqrt(sum(x * x for x in c))))
    return [hoeffding_check(c, p, t)], None


def _run_prop2_3(cfg):
    X, theta, m = _linear_inputs(cfg)
    spec = subvector_spectrum(X, theta, SubsetMeasure.exact(X.dim, m.p), cfg.threads)
    c = lipschitz_vector(X, theta) * (1.0 + 1e-9)
    t = float(cfg.get("t", 0.5 * float(np.linalg.norm(c))))
    return [bounded_differences_check(spec.psi2, c, m.p, t)], None


def _concentration(names):
    def run(cfg):
        X, theta, m = _linear_inputs(cfg)
        spec = subvector_spectrum(X, theta, m, cfg.threads)
        return _pick(concentration_report(X, theta, m, cfg.hereditary(), spectrum=spec), *names), spec
    return run


def _theorem(names):
    def run(cfg):
        X, theta, m = _linear_inputs(cfg)
        spec = subvector_spectrum(X, theta, m, cfg.threads)
        reports = hereditary_theorem_check(X, theta, m, cfg.hereditary(), spectrum=spec, include_flat=False)
        return _pick(reports, *names), spec
    return run


def _run_example4_2(cfg):
    n = int(cfg.get("n", 20))
    p = float(cfg.get("p", 0.5))
    C = float(cfg.get("C", 3.0))
    base = ScalarDist.from_json(cfg.get("base")) if cfg.get("base") else None
    return example42_reports(n, p, C, base, cfg.threads)


def _run_cor4_11(cfg):
    if cfg.vector is not None:
        X = build_random_vector(spec_from_json(cfg.vector))
    else:
        X = build_random_vector(Product([ScalarDist.rademacher()] * int(cfg.get("n", 16))))
    m = cfg.measure_for(X.dim, cfg.rng()) if cfg.measure or "p" in cfg.params else SubsetMeasure.exact(X.dim, 0.5)
    return [cor411_check(X, m, float(cfg.get("lambda", 2.0)), cfg.threads)], None


def _hyper_inputs(cfg):
    rng = cfg.rng()
    if cfg.hypergraph is not None:
        W = Hypergraph.from_json(cfg.hypergraph)
    else:
        d = int(cfg.get("d", 2))
        W = random_hypergraph(rng, int(cfg.get("n", max(d, 6))), d)
    if cfg.vector is not None:
        X = build_random_vector(spec_from_json(cfg.vector))
    else:
        X = random_vector(rng, W.n)
    m = cfg.measure_for(W.n, rng)
    return X, W, m


def _run_factA_1(cfg):
    X, W, m = _hyper_inputs(cfg)
    reports = [averaging_identity_check(W, x, m.p) for x in X.points[:16]]
    return reports + _pick(hyper_concentration_report(X, W, m, cfg.hereditary()), "factA_2_norm"), None


def _run_factA_2(cfg):
    X, W, m = _hyper_inputs(cfg)
    return [spectrum_lipschitz_check(X, W)], None


def _run_propA_4(cfg):
    X, W, m = _hyper_inputs(cfg)
    spec = hyper_spectrum(X, W, m, cfg.threads)
    return hyper_concentration_report(X, W, m, cfg.hereditary(), spectrum=spec), spec


def _run_thmA_7(cfg):
    X, W, m = _hyper_inputs(cfg)
    spec = hyper_spectrum(X, W, m, cfg.threads)
    return hyper_theorem_check(X, W, m, cfg.hereditary(), spectrum=spec, threads=cfg.threads), spec


def _run_example5_1(cfg):
    if "n" in cfg.params or "d" in cfg.params:
        n, d = int(cfg.get("n", 8)), int(cfg.get("d", 2))
        p = float(cfg.get("p", 0.5))
        return example_5_1_checks(n, d, p, cfg.threads), None
    return [r for _, r in example51_case(cfg.seed, 0, cfg.threads) if r.name.startswith("example5_1")], None


def _run_remarkA_9(cfg):
    if cfg.hypergraph is not None:
        W = Hypergraph.from_json(cfg.hypergraph)
    else:
        W = Hypergraph.complete(int(cfg.get("n", 10)), int(cfg.get("d", 2)))
    return [pseudorandomness_check(W, float(cfg.get("p", 0.5)))], None


def _run_prop5_3(cfg):
    X, theta, m = _linear_inputs(cfg)
    if cfg.get("K") in (None, "auto") or cfg.get("tau") is None:
        raise ConfigError("prop5_3 needs --K and --tau")
    params = PartialParams(float(cfg.get("K")), float(cfg.get("tau")), float(cfg.get("alpha", 1.0)))
    return prop_5_3_check(X, theta, m, params, cfg.threads), None


def _run_suite(cfg):
    sizes = SuiteSizes()
    if cfg.fixtures is not None:
        sizes = sizes.with_count(cfg.fixtures)
    return run_suite(cfg.seed, sizes, cfg.threads), None


# name -> (anchor, config fields, runner)
SCENARIOS: dict[str, tuple[str, str, Callable[[ScenarioConfig], Result]]] = {
    "fact3_3": ("Eq (3.3)", "vector, direction, measure.p", _run_fact3_3),
    "eq4_36": ("Eq (4.36)", "direction, measure.p", _run_eq4_36),
    "prop2_2": ("Prop 2.2", "params.c, p, t", _run_prop2_2),
    "prop2_3": ("Prop 2.3", "vector, direction, p, t", _run_prop2_3),
    "prop4_3": ("Eq (4.5)", "vector, direction, measure, K, lambda", _concentration(("prop4_3", "lemma4_6"))),
    "cor4_4": ("Eq (4.6)", "vector, direction, measure, K", _concentration(("cor4_4",))),
    "cor4_5": ("Eq (4.8)", "vector, direction, measure, K, lambda, t",
               _concentration(("cor4_5", "lemma3_4"))),
    "prop4_8": ("Eq (4.23)", "vector, direction, measure, K, lambda, alpha", _theorem(("prop4_8",))),
    "thm4_1": ("Eq (4.2)", "vector, direction, measure, eta", _theorem(("thm4_1",))),
    "prop3_1": ("Prop 3.1", "vector, direction, measure, K, gamma", _theorem(("prop3_1",))),
    "example4_2": ("Example 4.2", "n, p, C", _run_example4_2),
    "cor4_11": ("Eq (4.31)", "vector (default Rademacher^16), p, lambda", _run_cor4_11),
    "factA_1": ("Eq (A.1)", "hypergraph, vector, measure.p", _run_factA_1),
    "factA_2": ("Eq (A.3)", "hypergraph, vector", _run_factA_2),
    "propA_4": ("Eq (A.9)", "hypergraph, vector, measure, K, lambda", _run_propA_4),
    "thmA_7": ("Eq (A.25)", "hypergraph, vector, measure, eta, gamma", _run_thmA_7),
    "example5_1": ("Example 5.1", "n, d, p", _run_example5_1),
    "remarkA_9": ("Remark A.9", "hypergraph (default complete), n, d, p", _run_remarkA_9),
    "prop5_3": ("Eq (5.8)", "vector, direction, measure, K, tau, alpha", _run_prop5_3),
    "suite": ("all", "seed, fixtures", _run_suite),
}


def list_scenarios() -> list[tuple[str, str, str]]:
    return [(name, anchor, fields) for name, (anchor, fields, _) in SCENARIOS.items()]


def load_config(args: argparse.Namespace) -> ScenarioConfig:
    raw: dict[str, Any] = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    scenario = args.scenario or raw.get("scenario")
    if raw.get("scenario") not in (None, scenario):
        raise ConfigError(f"config names scenario {raw['scenario']!r}, command line {scenario!r}")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    unknown = set(raw) - {"scenario", "vector", "vector_spec", "direction", "hypergraph", "measure",
                          "params", "output", "seed", "threads", "fixtures"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    params = dict(raw.get("params", {}))
    for flag in ("n", "p", "C", "K", "eta", "gamma", "lambda", "alpha", "tau", "d"):
        value = getattr(args, "lam" if flag == "lambda" else flag)
        if value is not None:
            params[flag] = value
    seed = args.seed if args.seed is not None else int(raw.get("seed", 0))
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return ScenarioConfig(
        scenario=scenario,
        vector=raw.get("vector", raw.get("vector_spec")),
        direction=raw.get("direction"),
        hypergraph=raw.get("hypergraph"),
        measure=dict(raw.get("measure", {})),
        params=params,
        output=args.out or raw.get("output", "."),
        seed=seed,
        threads=args.threads or raw.get("threads") or kernels.default_threads(),
        fixtures=args.fixtures if args.fixtures is not None else raw.get("fixtures"),
    )


def run_scenario(cfg: ScenarioConfig) -> tuple[int, list[tuple[str, BoundReport]]]:
    """Run, write ``reports.jsonl`` (and ``spectrum.csv`` when available), return the status."""
    _, _, runner = SCENARIOS[cfg.scenario]
    reports, spectrum = runner(cfg)
    tagged = reports if cfg.scenario == "suite" else [(cfg.scenario, r) for r in reports]
    tagged = sorted(tagged, key=lambda sr: (sr[0], sr[1].name))
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "reports.jsonl", "w") as fh:
        for scenario, r in tagged:
            fh.write('{"scenario": ' + json.dumps(scenario) + ", " + r.to_json()[1:] + "\n")
    if spectrum is not None:
        spectrum.to_csv(out / "spectrum.csv")
    violated = any(r.holds is False for _, r in tagged)
    return (EXIT_VIOLATION if violated else EXIT_OK), tagged


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subgauss", description="Exact checks of hereditary subgaussian bounds.")
    ap.add_argument("scenario", nargs="?", help="scenario name, or 'list'")
    ap.add_argument("--config", help="JSON scenario config")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output directory (default: current)")
    ap.add_argument("--threads", type=int, help="worker threads (default: $SUBGAUSS_THREADS or 1)")
    ap.add_argument("--fixtures", type=int, help="fixtures per family for the suite")
    ap.add_argument("--n", type=int)
    ap.add_argument("--d", type=int)
    ap.add_argument("--p", type=float)
    ap.add_argument("--C", type=float)
    ap.add_argument("--K", help="number or 'auto'")
    ap.add_argument("--eta", type=float)
    ap.add_argument("--gamma", type=float)
    ap.add_argument("--lambda", dest="lam", type=float)
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--tau", type=float)
    ap.add_argument("-q", "--quiet", action="store_true", help="print only the summary line")
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "run":
        argv = argv[1:]
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.scenario == "list":
        for name, anchor, fields in list_scenarios():
            print(f"{name:<12} {anchor:<12} {fields}")
        return EXIT_OK
    if args.scenario is None and not args.config:
        ap.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args)
        status, tagged = run_scenario(cfg)
    except CapacityError as exc:
        print(f"subgauss: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, DomainError, KeyError, TypeError, ValueError) as exc:
        print(f"subgauss: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        for scenario, r in tagged:
            if r.holds is False:
                print(f"{scenario}: {r}")
    checked = sum(r.skipped is None for _, r in tagged)
    failed = sum(r.holds is False for _, r in tagged)
    print(f"{cfg.scenario}: {checked} checked, {len(tagged) - checked} skipped, {failed} violated "
          f"-> {os.path.join(cfg.output, 'reports.jsonl')}")
    return status


if __name__ == "__main__":
    sys.exit(main())
