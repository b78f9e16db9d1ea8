"""Compare the compiled and numpy kernel backends on representative workloads.

Usage: python benchmarks/bench_kernels.py [--repeat 3] [--n 14]
"""

from __future__ import annotations

import argparse
import itertools
import time

import numpy as np

from subgauss import kernels
from subgauss.biased import all_masks


def _workloads(n: int, rng: np.random.Generator):
    atoms = 64
    points = rng.uniform(-1.0, 1.0, size=(atoms, n))
    probs = rng.dirichlet(np.ones(atoms))
    theta = rng.normal(size=n)
    masks = all_masks(n)
    edges = np.array([(1 << a) | (1 << b) for a, b in itertools.combinations(range(n), 2)], dtype=np.uint64)
    weights = rng.normal(size=edges.shape[0])
    values = rng.uniform(-1.0, 1.0, size=(4096, atoms))
    nd = min(n, 10)
    dedges = np.array([(1 << a) | (1 << b) | (1 << c)
                       for a, b, c in itertools.combinations(range(nd), 3)], dtype=np.uint64)
    dweights = rng.normal(size=dedges.shape[0])
    dmasks = all_masks(nd)
    return {
        "psi2_rows (4096 x 64)": lambda k: k.psi2_rows(values, probs),
        f"linear_psi2 (2^{n} masks)": lambda k: k.linear_psi2(points, probs, theta, masks),
        f"hom_psi2 d=2 (2^{n} masks)": lambda k: k.hom_psi2(points, probs, edges, weights, masks),
        f"delta_vertex d=3 (2^{nd} masks)": lambda k: k.delta_vertex(dedges, dweights, nd, dmasks),
    }


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=14)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = {name: kernels.get_backend(name) for name in kernels.available_backends()}
    work = _workloads(args.n, np.random.default_rng(args.seed))
    names = list(backends)
    print(f"{'workload':34s}" + "".join(f"{b:>12s}" for b in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in work.items():
        times = {b: _time(lambda: fn(mod), args.repeat) for b, mod in backends.items()}
        row = f"{label:34s}" + "".join(f"{times[b]:11.4f}s" for b in names)
        if len(names) > 1:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
