"""Finitely supported scalar distributions and bounded random vectors.

Every example family used by the verification suites is built here from a
small declarative spec (see :func:`build_random_vector`).  Specs have a JSON
encoding consumed by the command-line harness; coordinate indices are 0-based
throughout, including in JSON.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence, Union

import numpy as np

from subgauss import kernels
from subgauss.errors import CapacityError, DomainError

ATOM_CAP = 1 << 20
PROB_TOL = 1e-12
MERGE_TOL = 1e-15
BOX_TOL = 1e-12


class ScalarDist:
    """A real random variable with finitely many atoms.

    Atoms are kept sorted by value with duplicates (within ``MERGE_TOL``)
    merged; probabilities below ``MERGE_TOL`` are dropped and the rest
    renormalized.
    """

    __slots__ = ("values", "probs")

    def __init__(self, atoms: Union[Mapping[float, float], Iterable[Sequence[float]]]):
        if isinstance(atoms, Mapping):
            pairs = list(atoms.items())
        else:
            pairs = [tuple(a) for a in atoms]
        if not pairs:
            raise DomainError("a distribution needs at least one atom")
        vals = np.array([float(v) for v, _ in pairs])
        probs = np.array([float(p) for _, p in pairs])
        self.values, self.probs = _normalize(vals, probs)

    @classmethod
    def from_arrays(cls, values, probs) -> ScalarDist:
        out = cls.__new__(cls)
        out.values, out.probs = _normalize(
            np.asarray(values, dtype=float).ravel(), np.asarray(probs, dtype=float).ravel()
        )
        return out

    @classmethod
    def point_mass(cls, value: float = 0.0) -> ScalarDist:
        return cls([(value, 1.0)])

    @classmethod
    def rademacher(cls) -> ScalarDist:
        return cls([(-1.0, 0.5), (1.0, 0.5)])

    @classmethod
    def uniform(cls, values: Iterable[float]) -> ScalarDist:
        values = list(values)
        return cls([(v, 1.0 / len(values)) for v in values])

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    @property
    def support_size(self) -> int:
        return int(self.values.shape[0])

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())

    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))

    def mean(self) -> float:
        return math.fsum(self.values * self.probs)

    def magnitudes(self) -> np.ndarray:
        """Distinct positive values of |X|, ascending."""
        mags = np.unique(np.abs(self.values))
        return mags[mags > 0]

    def tail(self, t: float) -> float:
        """P(|X| >= t)."""
        return math.fsum(self.probs[np.abs(self.values) >= t])

    def scaled(self, c: float) -> ScalarDist:
        return ScalarDist.from_arrays(self.values * c, self.probs)

    def convolve(self, other: ScalarDist) -> ScalarDist:
        """Distribution of X + Y for independent X ~ self, Y ~ other."""
        vals = (self.values[:, None] + other.values[None, :]).ravel()
        probs = (self.probs[:, None] * other.probs[None, :]).ravel()
        return ScalarDist.from_arrays(vals, probs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScalarDist):
            return NotImplemented
        return np.array_equal(self.values, other.values) and np.array_equal(
            self.probs, other.probs
        )

    def __hash__(self) -> int:
        return hash((self.values.tobytes(), self.probs.tobytes()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{v:.6g}: {p:.6g}" for v, p in self.atoms)
        return f"ScalarDist({{{inner}}})"

    def to_json(self) -> dict[str, Any]:
        return {"atoms": [[v, p] for v, p in self.atoms]}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> ScalarDist:
        try:
            return cls([(a[0], a[1]) for a in obj["atoms"]])
        except (KeyError, TypeError, IndexError) as exc:
            raise DomainError(f"malformed scalar distribution: {obj!r}") from exc


def _normalize(vals: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if vals.shape != probs.shape:
        raise DomainError("values and probabilities differ in length")
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(probs))):
        raise DomainError("atoms must be finite")
    if np.any(probs < 0):
        raise DomainError("probabilities must be nonnegative")
    total = math.fsum(probs)
    if abs(total - 1.0) > PROB_TOL:
        raise DomainError(f"probabilities sum to {total!r}, not 1")
    order = np.argsort(vals, kind="stable")
    vals, probs = vals[order], probs[order]
    merged_v: list[float] = []
    merged_p: list[list[float]] = []
    for v, p in zip(vals.tolist(), probs.tolist()):
        if merged_v and v - merged_v[-1] <= MERGE_TOL * max(1.0, abs(v), abs(merged_v[-1])):
            merged_p[-1].append(p)
        else:
            merged_v.append(v)
            merged_p.append([p])
    out_v = np.array(merged_v)
    out_p = np.array([math.fsum(ps) for ps in merged_p])
    keep = out_p >= MERGE_TOL
    out_v, out_p = out_v[keep], out_p[keep]
    out_p = out_p / math.fsum(out_p)
    out_v.setflags(write=False)
    out_p.setflags(write=False)
    return out_v, out_p


class RandomVector:
    """A finitely supported random vector with entries in [-1, 1].

    ``marginals`` is set only when the coordinates are known to be
    independent (product constructions); it enables exact convolution
    shortcuts for large joint supports.
    """

    __slots__ = ("probs", "points", "marginals")

    def __init__(self, probs, points, marginals: Sequence[ScalarDist] | None = None,
                 cap: int = ATOM_CAP):
        probs = np.asarray(probs, dtype=float).ravel()
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or points.shape[0] != probs.shape[0] or points.shape[1] < 1:
            raise DomainError("points must be an (atoms, dim) array matching probs")
        if probs.shape[0] > cap:
            raise CapacityError(f"{probs.shape[0]} atoms exceed the cap of {cap}")
        if not np.all(np.isfinite(points)):
            raise DomainError("points must be finite")
        if np.any(np.abs(points) > 1.0 + BOX_TOL):
            raise DomainError("every coordinate must lie in [-1, 1]")
        points = np.clip(points, -1.0, 1.0)
        if np.any(probs <= 0):
            raise DomainError("atom probabilities must be positive")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROB_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")
        uniq, inverse = np.unique(points, axis=0, return_inverse=True)
        if uniq.shape[0] < points.shape[0]:
            probs = np.bincount(inverse.ravel(), weights=probs, minlength=uniq.shape[0])
            points = uniq
        probs = probs / math.fsum(probs)
        probs.setflags(write=False)
        points = np.ascontiguousarray(points)
        points.setflags(write=False)
        self.probs = probs
        self.points = points
        if marginals is not None:
            marginals = tuple(marginals)
            if len(marginals) != points.shape[1]:
                raise DomainError("one marginal per coordinate is required")
        self.marginals = marginals

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def n_atoms(self) -> int:
        return int(self.probs.shape[0])

    @property
    def atoms(self) -> list[tuple[float, tuple[float, ...]]]:
        return [(p, tuple(x)) for p, x in zip(self.probs.tolist(), self.points.tolist())]

    def marginal(self, i: int) -> ScalarDist:
        if self.marginals is not None:
            return self.marginals[i]
        return ScalarDist.from_arrays(self.points[:, i], self.probs)

    def __repr__(self) -> str:
        return f"RandomVector(dim={self.dim}, atoms={self.n_atoms})"

    def to_json(self) -> dict[str, Any]:
        return {"kind": "explicit", "atoms": [[p, list(x)] for p, x in self.atoms]}


# ---------------------------------------------------------------------------
# Declarative specs


@dataclass(frozen=True)
class Product:
    marginals: tuple[ScalarDist, ...]


@dataclass(frozen=True)
class Cancellation:
    """X_i = Z for i in T and X_i = -Z otherwise."""

    base: ScalarDist
    n: int
    T: frozenset[int]


@dataclass(frozen=True)
class ConvexCombination:
    """Pointwise sum of independently drawn parts with convex weights."""

    weights: tuple[float, ...]
    parts: tuple[Any, ...]


@dataclass(frozen=True)
class Explicit:
    vector: RandomVector


@dataclass(frozen=True)
class Example42:
    """Dimension n+1; the first coordinate is -Z and the rest are Z."""

    n: int
    base: ScalarDist


@dataclass(frozen=True)
class Example51Vector:
    """Dimension n+d with every coordinate equal to Z."""

    n: int
    d: int
    base: ScalarDist


VectorSpec = Union[Product, Cancellation, ConvexCombination, Explicit, Example42, Example51Vector]


def _check_base(base: ScalarDist) -> None:
    if base.max_abs() > 1.0 + BOX_TOL:
        raise DomainError("base variable must take values in [-1, 1]")


def _single_driver(base: ScalarDist, signs: np.ndarray, cap: int) -> RandomVector:
    _check_base(base)
    points = base.values[:, None] * signs[None, :]
    return RandomVector(base.probs, points, cap=cap)


def build_random_vector(spec: VectorSpec, cap: int = ATOM_CAP) -> RandomVector:
    """Joint distribution described by ``spec``."""
    if isinstance(spec, Product):
        if not spec.marginals:
            raise DomainError("a product needs at least one marginal")
        for m in spec.marginals:
            _check_base(m)
        count = math.prod(m.support_size for m in spec.marginals)
        if count > cap:
            raise CapacityError(f"product has {count} atoms, cap is {cap}")
        grids = [m.values for m in spec.marginals]
        pgrids = [m.probs for m in spec.marginals]
        points = np.array(list(itertools.product(*grids)), dtype=float)
        probs = np.array([math.prod(ps) for ps in itertools.product(*pgrids)])
        probs = probs / math.fsum(probs)
        return RandomVector(probs, points, marginals=spec.marginals, cap=cap)

    if isinstance(spec, Cancellation):
        if spec.n < 1:
            raise DomainError("dimension must be positive")
        if any(not 0 <= i < spec.n for i in spec.T):
            raise DomainError("T must be a subset of range(n)")
        signs = np.array([1.0 if i in spec.T else -1.0 for i in range(spec.n)])
        return _single_driver(spec.base, signs, cap)

    if isinstance(spec, Example42):
        if spec.n < 1:
            raise DomainError("n must be positive")
        signs = np.ones(spec.n + 1)
        signs[0] = -1.0
        return _single_driver(spec.base, signs, cap)

    if isinstance(spec, Example51Vector):
        if spec.d < 1 or spec.n < spec.d:
            raise DomainError("need n >= d >= 1")
        return _single_driver(spec.base, np.ones(spec.n + spec.d), cap)

    if isinstance(spec, Explicit):
        return spec.vector

    if isinstance(spec, ConvexCombination):
        return _convex(spec, cap)

    raise DomainError(f"unknown vector spec {type(spec).__name__}")


def _convex(spec: ConvexCombination, cap: int) -> RandomVector:
    weights = np.asarray(spec.weights, dtype=float)
    if len(spec.parts) == 0 or weights.shape[0] != len(spec.parts):
        raise DomainError("one weight per part is required")
    if np.any(weights < 0) or abs(math.fsum(weights) - 1.0) > PROB_TOL:
        raise DomainError("weights must be nonnegative and sum to 1")
    parts = [build_random_vector(p, cap) for p in spec.parts]
    dims = {p.dim for p in parts}
    if len(dims) != 1:
        raise DomainError("parts of a convex combination must share one dimension")
    count = math.prod(p.n_atoms for p in parts)
    if count > cap:
        raise CapacityError(f"combination has {count} atoms, cap is {cap}")
    points = np.zeros((1, parts[0].dim))
    probs = np.ones(1)
    for w, part in zip(weights, parts):
        points = (points[:, None, :] + w * part.points[None, :, :]).reshape(-1, part.dim)
        probs = (probs[:, None] * part.probs[None, :]).ravel()
    marginals = None
    if all(p.marginals is not None for p in parts):
        marginals = []
        for i in range(parts[0].dim):
            acc = ScalarDist.point_mass(0.0)
            for w, part in zip(weights, parts):
                acc = acc.convolve(part.marginals[i].scaled(w))
            marginals.append(acc)
    return RandomVector(probs / math.fsum(probs), points, marginals=marginals, cap=cap)


# ---------------------------------------------------------------------------
# Pushforward


def pushforward(X: RandomVector, functional) -> ScalarDist:
    """Distribution of f(X) for a linear direction or a hypergraph functional.

    ``functional`` is anything with ``dim`` and ``evaluate(points)``, or a
    plain sequence of coefficients (read as a linear direction).
    """
    if hasattr(functional, "evaluate"):
        if functional.dim != X.dim:
            raise DomainError(f"functional has dimension {functional.dim}, vector {X.dim}")
        vals = functional.evaluate(X.points)
    else:
        theta = np.asarray(functional, dtype=float).ravel()
        if theta.shape[0] != X.dim:
            raise DomainError(f"direction has dimension {theta.shape[0]}, vector {X.dim}")
        vals = linear_image(X.points, theta)
    return ScalarDist.from_arrays(vals, X.probs)


def linear_image(points: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """<theta, x> for every row x, with sub-rounding cancellations snapped to 0."""
    full = np.array([(1 << theta.shape[0]) - 1], dtype=np.uint64)
    return kernels.linear_values(points, theta, full)[0]


# ---------------------------------------------------------------------------
# JSON encoding


def spec_to_json(spec: VectorSpec) -> dict[str, Any]:
    if isinstance(spec, Product):
        return {"kind": "product", "marginals": [m.to_json() for m in spec.marginals]}
    if isinstance(spec, Cancellation):
        return {"kind": "cancellation", "base": spec.base.to_json(), "n": spec.n,
                "T": sorted(spec.T)}
    if isinstance(spec, ConvexCombination):
        return {"kind": "convex", "weights": list(spec.weights),
                "parts": [spec_to_json(p) for p in spec.parts]}
    if isinstance(spec, Explicit):
        return spec.vector.to_json()
    if isinstance(spec, Example42):
        return {"kind": "example42", "n": spec.n, "base": spec.base.to_json()}
    if isinstance(spec, Example51Vector):
        return {"kind": "example51", "n": spec.n, "d": spec.d, "base": spec.base.to_json()}
    raise DomainError(f"unknown vector spec {type(spec).__name__}")


def spec_from_json(obj: Mapping[str, Any]) -> VectorSpec:
    try:
        kind = obj["kind"]
        if kind == "product":
            return Product(tuple(ScalarDist.from_json(m) for m in obj["marginals"]))
        if kind == "cancellation":
            return Cancellation(ScalarDist.from_json(obj["base"]), int(obj["n"]),
                                frozenset(int(i) for i in obj["T"]))
        if kind == "convex":
            return ConvexCombination(tuple(float(w) for w in obj["weights"]),
                                     tuple(spec_from_json(p) for p in obj["parts"]))
        if kind == "explicit":
            probs = [a[0] for a in obj["atoms"]]
            points = [a[1] for a in obj["atoms"]]
            return Explicit(RandomVector(probs, points))
        if kind == "example42":
            return Example42(int(obj["n"]), ScalarDist.from_json(obj["base"]))
        if kind == "example51":
            return Example51Vector(int(obj["n"]), int(obj["d"]),
                                   ScalarDist.from_json(obj["base"]))
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed vector spec: {exc}") from exc
    raise DomainError(f"unknown vector spec kind {obj.get('kind')!r}")
