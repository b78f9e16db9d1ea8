"""Uniform carrier for verified inequality instances."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

# Default absolute tolerance used when deciding whether a bound holds.
TOL = 1e-12


def fmt_float(x: float) -> str:
    """Serialize a float with 17 significant digits (non-finite -> null)."""
    if not math.isfinite(x):
        return "null"
    return format(float(x), ".17g")


def _encode(obj: Any) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item())
    raise TypeError(f"cannot encode {type(obj).__name__}")


@dataclass(frozen=True)
class BoundReport:
    """One checked instance of an inequality or identity.

    ``sense`` fixes the direction of the comparison:

    * ``"<="``: holds iff ``lhs <= rhs + tol``; slack is ``rhs - lhs``.
    * ``">="``: holds iff ``lhs >= rhs - tol``; slack is ``lhs - rhs``.
    * ``"=="``: holds iff ``|lhs - rhs| <= tol``; slack is ``tol - |lhs - rhs|``.

    A skipped report carries the reason in ``skipped`` and ``holds`` is None.
    """

    name: str
    anchor: str
    lhs: float
    rhs: float
    sense: str = "<="
    params: dict[str, Any] = field(default_factory=dict)
    tol: float = TOL
    skipped: str | None = None

    def __post_init__(self) -> None:
        if self.sense not in ("<=", ">=", "=="):
            raise ValueError(f"unknown sense {self.sense!r}")

    @classmethod
    def skip(cls, name: str, anchor: str, reason: str, **params: Any) -> BoundReport:
        return cls(name, anchor, math.nan, math.nan, params=params, skipped=reason)

    @property
    def holds(self) -> bool | None:
        if self.skipped is not None:
            return None
        if self.sense == "<=":
            return bool(self.lhs <= self.rhs + self.tol)
        if self.sense == ">=":
            return bool(self.lhs >= self.rhs - self.tol)
        return bool(abs(self.lhs - self.rhs) <= self.tol)

    @property
    def slack(self) -> float:
        if self.skipped is not None:
            return math.nan
        if self.sense == "<=":
            return self.rhs - self.lhs
        if self.sense == ">=":
            return self.lhs - self.rhs
        return self.tol - abs(self.lhs - self.rhs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "params": dict(self.params),
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "sense": self.sense,
            "holds": self.holds,
            "slack": float(self.slack),
            "skipped": self.skipped,
        }

    def to_json(self) -> str:
        return _encode(self.to_dict())

    def __str__(self) -> str:
        if self.skipped is not None:
            return f"{self.name} [{self.anchor}]: skipped ({self.skipped})"
        status = "ok" if self.holds else "VIOLATED"
        return (
            f"{self.name} [{self.anchor}]: {self.lhs:.6g} {self.sense} "
            f"{self.rhs:.6g} {status}"
        )


def all_hold(reports) -> bool:
    """True when every non-skipped report holds."""
    return all(r.holds for r in reports if r.skipped is None)
