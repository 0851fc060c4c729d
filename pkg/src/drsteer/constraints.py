"""Per-feature constraint sets: equality locks and one-sided or two-sided bounds.

Constraints are stated in absolute feature units. Missing bounds are the
infinity sentinels. to_delta() rewrites the set relative to a concrete point
so the solver can work on displacements: a locked feature pins the
displacement to (lock value - current value), which is 0 when the lock holds
the current value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ConstraintError(ValueError):
    """Raised for an internally inconsistent constraint set."""


@dataclass
class ConstraintSet:
    d: int
    locked: np.ndarray = field(default=None)  # (d,) bool
    lock_values: np.ndarray = field(default=None)  # (d,)
    lower: np.ndarray = field(default=None)  # (d,), -inf where absent
    upper: np.ndarray = field(default=None)  # (d,), +inf where absent

    def __post_init__(self):
        if self.locked is None:
            self.locked = np.zeros(self.d, dtype=bool)
        if self.lock_values is None:
            self.lock_values = np.zeros(self.d)
        if self.lower is None:
            self.lower = np.full(self.d, -np.inf)
        if self.upper is None:
            self.upper = np.full(self.d, np.inf)

    @classmethod
    def empty(cls, d: int) -> "ConstraintSet":
        return cls(d=d)

    def copy(self) -> "ConstraintSet":
        return ConstraintSet(
            d=self.d,
            locked=self.locked.copy(),
            lock_values=self.lock_values.copy(),
            lower=self.lower.copy(),
            upper=self.upper.copy(),
        )

    @property
    def is_empty(self) -> bool:
        return (
            not bool(np.any(self.locked))
            and bool(np.all(np.isneginf(self.lower)))
            and bool(np.all(np.isposinf(self.upper)))
        )

    def lock(self, i: int, value: float) -> "ConstraintSet":
        self.locked[i] = True
        self.lock_values[i] = float(value)
        return self

    def unlock(self, i: int) -> "ConstraintSet":
        self.locked[i] = False
        self.lock_values[i] = 0.0
        return self

    def set_lower(self, i: int, value) -> "ConstraintSet":
        self.lower[i] = -np.inf if value is None else float(value)
        return self

    def set_upper(self, i: int, value) -> "ConstraintSet":
        self.upper[i] = np.inf if value is None else float(value)
        return self

    def clear(self, i: int) -> "ConstraintSet":
        self.unlock(i)
        self.lower[i] = -np.inf
        self.upper[i] = np.inf
        return self

    def validate(self) -> None:
        if np.any(self.lower > self.upper):
            bad = int(np.flatnonzero(self.lower > self.upper)[0])
            raise ConstraintError(f"feature {bad}: lower bound exceeds upper bound")
        held = self.locked
        if np.any(held):
            v = self.lock_values[held]
            if np.any(v < self.lower[held]) or np.any(v > self.upper[held]):
                raise ConstraintError("a lock value falls outside its own bounds")

    def to_delta(self, x):
        """Rewrite against a concrete point: displacement locks and a displacement box.

        Returns (eq_mask, eq_values, lb, ub), all in original feature units.
        Unbounded sides stay infinite.
        """
        self.validate()
        xv = np.asarray(x, dtype=np.float64)
        eq_mask = self.locked.copy()
        eq_values = np.where(self.locked, self.lock_values - xv, 0.0)
        lb = np.where(np.isneginf(self.lower), -np.inf, self.lower - xv)
        ub = np.where(np.isposinf(self.upper), np.inf, self.upper - xv)
        return eq_mask, eq_values, lb, ub

    def violations(self, x, lock_tolerances=None) -> list[dict]:
        """List the constraints x breaks. Locks allow a per-feature tolerance band."""
        xv = np.asarray(x, dtype=np.float64)
        tol = (
            np.full(self.d, 1e-6)
            if lock_tolerances is None
            else np.asarray(lock_tolerances, dtype=np.float64)
        )
        out: list[dict] = []
        for i in range(self.d):
            if self.locked[i] and abs(xv[i] - self.lock_values[i]) > tol[i]:
                out.append(
                    {"feature": i, "kind": "lock", "value": float(xv[i]),
                     "limit": float(self.lock_values[i])}
                )
            if xv[i] < self.lower[i]:
                out.append(
                    {"feature": i, "kind": "lower", "value": float(xv[i]),
                     "limit": float(self.lower[i])}
                )
            if xv[i] > self.upper[i]:
                out.append(
                    {"feature": i, "kind": "upper", "value": float(xv[i]),
                     "limit": float(self.upper[i])}
                )
        return out

    def to_json(self) -> dict:
        """Sparse JSON form keyed by feature index (as strings)."""
        features: dict[str, dict] = {}
        for i in range(self.d):
            entry: dict = {}
            if self.locked[i]:
                entry["locked"] = True
                entry["lock_value"] = float(self.lock_values[i])
            if not np.isneginf(self.lower[i]):
                entry["lower"] = float(self.lower[i])
            if not np.isposinf(self.upper[i]):
                entry["upper"] = float(self.upper[i])
            if entry:
                features[str(i)] = entry
        return {"d": self.d, "features": features}

    @classmethod
    def from_json(cls, payload: dict) -> "ConstraintSet":
        cs = cls.empty(int(payload["d"]))
        for key, entry in payload.get("features", {}).items():
            i = int(key)
            if entry.get("locked"):
                cs.lock(i, entry["lock_value"])
            if entry.get("lower") is not None:
                cs.set_lower(i, entry["lower"])
            if entry.get("upper") is not None:
                cs.set_upper(i, entry["upper"])
        cs.validate()
        return cs


def lock_tolerances(stats) -> np.ndarray:
    """Equality tolerance band per feature: max(1e-6, 1% of the feature's std)."""
    return np.array([max(1e-6, 0.01 * s.std) for s in stats])
