"""The p-biased measure on subsets of {0, ..., n-1}.

Subsets are n-bit masks (bit i set iff i is in H).  Exact mode enumerates all
2^n masks with weight p^|H| (1-p)^(n-|H|); sampled mode draws masks from a
counter-based generator so that draw k depends only on (seed, k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from subgauss.errors import CapacityError, DomainError
from subgauss.report import BoundReport

EXACT_CAP = 24
SAMPLE_CAP = 63
INCLUSION_TOL = 1e-12


def reaches(x: np.ndarray, t: float) -> np.ndarray:
    """x >= t up to a relative tolerance, ties counted as reaching.

    Used for deviation thresholds whose scale follows the data; constants
    that are already scale free use the absolute INCLUSION_TOL instead.
    """
    return x >= t - INCLUSION_TOL * abs(t)


def within(x: np.ndarray, t: float) -> np.ndarray:
    """x <= t up to a relative tolerance."""
    return x <= t + INCLUSION_TOL * abs(t)


@dataclass(frozen=True)
class SubsetMeasure:
    n: int
    p: float
    mode: str = "exact"
    count: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError("n must be positive")
        if not 0.0 < self.p < 1.0:
            raise DomainError("p must lie in (0, 1)")
        if self.mode == "exact":
            if self.n > EXACT_CAP:
                raise CapacityError(f"exact mode needs n <= {EXACT_CAP}, got {self.n}")
        elif self.mode == "sampled":
            if self.count < 1:
                raise DomainError("sampled mode needs a positive count")
            if self.n > SAMPLE_CAP:
                raise CapacityError(f"sampled mode needs n <= {SAMPLE_CAP}")
            if not 0 <= self.seed < 1 << 64:
                raise DomainError("seed must be an unsigned 64-bit integer")
        else:
            raise DomainError(f"unknown mode {self.mode!r}")

    @classmethod
    def exact(cls, n: int, p: float) -> SubsetMeasure:
        return cls(n, p)

    @classmethod
    def sampled(cls, n: int, p: float, count: int, seed: int) -> SubsetMeasure:
        return cls(n, p, "sampled", count, seed)

    @property
    def is_exact(self) -> bool:
        return self.mode == "exact"

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """(masks, weights): all subsets with their mass, or the sampled draws."""
        if self.is_exact:
            return all_masks(self.n), exact_weights(self.n, self.p)
        masks = sample_masks(self.n, self.p, self.count, self.seed)
        return masks, np.full(self.count, 1.0 / self.count)

    def require_exact(self) -> None:
        if not self.is_exact:
            raise DomainError("this operation needs an exact measure")


def all_masks(n: int) -> np.ndarray:
    if n > EXACT_CAP + 1:
        raise CapacityError(f"cannot enumerate 2^{n} subsets")
    return np.arange(1 << n, dtype=np.uint64)


def popcounts(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(masks, dtype=np.uint64)).astype(np.int64)


def exact_weights(n: int, p: float, masks: np.ndarray | None = None) -> np.ndarray:
    """mu_p({H}) for each mask (all 2^n masks by default, ascending)."""
    if masks is None:
        masks = all_masks(n)
    table = np.array([p ** k * (1.0 - p) ** (n - k) for k in range(n + 1)])
    return table[popcounts(masks)]


def sample_masks(n: int, p: float, count: int, seed: int, start: int = 0) -> np.ndarray:
    """Draws start..start+count-1 of the p-biased sampler keyed by ``seed``.

    Draw k reads the 64-bit words of Philox(seed) at counters
    [k*B, (k+1)*B) with B = ceil(n/4), one word per coordinate, so any
    partition of the draw range reproduces the same masks.
    """
    blocks = -(-n // 4)
    gen = np.random.Philox(key=seed, counter=start * blocks)
    words = gen.random_raw(count * blocks * 4).reshape(count, blocks * 4)[:, :n]
    u = (words >> np.uint64(11)).astype(float) * 2.0 ** -53
    bits = (u < p).astype(np.uint64)
    shifts = np.arange(n, dtype=np.uint64)
    return np.bitwise_or.reduce(bits << shifts, axis=1) if n else np.zeros(count, np.uint64)


def mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(int(mask).bit_length()) if (int(mask) >> i) & 1)


def set_to_mask(H) -> int:
    m = 0
    for i in H:
        m |= 1 << int(i)
    return m


def measure_of(m: SubsetMeasure, predicate: Callable, vectorized: bool = False) -> float:
    """mu_p of {H : predicate(H)}, or its empirical frequency in sampled mode.

    The predicate receives a frozenset of indices, or the whole mask array
    when ``vectorized`` is set.
    """
    masks, weights = m.support()
    if vectorized:
        flags = np.asarray(predicate(masks), dtype=bool)
    else:
        flags = np.fromiter((bool(predicate(mask_to_set(h))) for h in masks.tolist()),
                            dtype=bool, count=masks.shape[0])
    return math.fsum(weights[flags])


def subset_sums(c: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """sum_{i in H} c_i for each mask, summed in ascending index order."""
    out = np.zeros(masks.shape[0])
    for i, ci in enumerate(np.asarray(c, dtype=float).tolist()):
        out += ((masks >> np.uint64(i)) & np.uint64(1)).astype(float) * ci
    return out


def _hoeffding_tail(t: float, c: np.ndarray) -> float:
    """2 exp(-2 t^2 / |c|^2), safe against underflow of |c|^2."""
    z = t / math.hypot(*c.tolist())
    return 2.0 * math.exp(-2.0 * z * z)


def hoeffding_check(c, p: float, t: float) -> BoundReport:
    """Exact mu_p{|sum_{i in H} c_i - p sum c| >= t} against 2 exp(-2t^2/|c|^2)."""
    c = np.asarray(c, dtype=float).ravel()
    if c.size == 0 or not np.any(c):
        raise DomainError("c must be a nonzero vector")
    if t <= 0:
        raise DomainError("t must be positive")
    m = SubsetMeasure.exact(c.size, p)
    masks, weights = m.support()
    dev = np.abs(subset_sums(c, masks) - p * math.fsum(c))
    lhs = math.fsum(weights[reaches(dev, t)])
    rhs = _hoeffding_tail(t, c)
    return BoundReport("hoeffding", "Prop 2.2", lhs, rhs,
                       params={"n": int(c.size), "p": p, "t": t})


def cube_differences(f: np.ndarray, n: int) -> np.ndarray:
    """max_H |f(H + i) - f(H)| for each coordinate i of a table over all masks."""
    f = np.asarray(f, dtype=float)
    if f.shape[0] != 1 << n:
        raise DomainError(f"table must have 2^{n} entries")
    masks = all_masks(n)
    out = np.zeros(n)
    for i in range(n):
        bit = np.uint64(1 << i)
        lower = masks[(masks & bit) == 0]
        out[i] = np.abs(f[(lower | bit).astype(np.int64)] - f[lower.astype(np.int64)]).max()
    return out


def bounded_differences_check(f, c, p: float, t: float) -> BoundReport:
    """Exact mu_p{|f(H) - E f| >= t} against 2 exp(-2t^2/|c|^2).

    ``f`` is a table indexed by mask.  The Lipschitz premise
    |f(H + i) - f(H)| <= c_i is verified first.
    """
    c = np.asarray(c, dtype=float).ravel()
    f = np.asarray(f, dtype=float).ravel()
    n = c.size
    if n == 0 or not np.any(c):
        raise DomainError("c must be a nonzero vector")
    if t <= 0:
        raise DomainError("t must be positive")
    if f.shape[0] != 1 << n:
        raise DomainError(f"table must have 2^{n} entries")
    masks = all_masks(n)
    for i in range(n):
        bit = np.uint64(1 << i)
        lower = masks[(masks & bit) == 0]
        diff = np.abs(f[(lower | bit).astype(np.int64)] - f[lower.astype(np.int64)])
        bad = np.flatnonzero(~within(diff, c[i]))
        if bad.size:
            H = sorted(mask_to_set(int(lower[bad[0]])))
            raise DomainError(
                f"Lipschitz premise fails at i={i}, H={H}: "
                f"|difference| = {diff[bad[0]]!r} > c_i = {c[i]!r}"
            )
    weights = exact_weights(n, p)
    mean = math.fsum(weights * f)
    lhs = math.fsum(weights[reaches(np.abs(f - mean), t)])
    rhs = _hoeffding_tail(t, c)
    return BoundReport("bounded_differences", "Prop 2.3", lhs, rhs,
                       params={"n": n, "p": p, "t": t, "mean": mean})
