"""Plane-side interaction primitives: prolines, feasibility maps, marks, snapping.

A proline traces how one feature drags a point across the plane: the feature
is swept over its observed range while every other feature is held at the
point's current value, and each synthetic vector is forward-projected. The
feasibility map rasterizes which plane positions a constrained point can
reach. Both work for any model exposing project/project_batch; feasibility
additionally dispatches on the model kind, since the linear model answers via
the QP solver and the autoencoder by decoding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autoencoder import AEModel
from .constraints import ConstraintSet, lock_tolerances
from .dataset import Dataset
from .pca import PCAModel
from .solver import solve_qp_batch

FEASIBILITY_TOL_FACTOR = 1e-6  # residual cutoff as a fraction of plane width


@dataclass(frozen=True)
class PlaneBounds:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @classmethod
    def around(cls, positions, pad: float = 0.1) -> "PlaneBounds":
        """Bounding box of the projected points, expanded by pad per side."""
        pos = np.asarray(positions, dtype=np.float64)
        xmin, ymin = pos.min(axis=0)
        xmax, ymax = pos.max(axis=0)
        spans = [max(xmax - xmin, 0.0) or 1.0, max(ymax - ymin, 0.0) or 1.0]
        return cls(
            xmin=float(xmin - pad * spans[0]),
            xmax=float(xmax + pad * spans[0]),
            ymin=float(ymin - pad * spans[1]),
            ymax=float(ymax + pad * spans[1]),
        )

    def to_json(self) -> dict:
        return {"xmin": self.xmin, "xmax": self.xmax, "ymin": self.ymin, "ymax": self.ymax}


@dataclass
class Proline:
    point_id: str
    feature_index: int
    feature_values: np.ndarray  # (s,) strictly increasing (one entry when degenerate)
    positions: np.ndarray  # (s, 2)
    mean_index: int
    sigma_lo_index: int | None
    sigma_hi_index: int | None
    current_index: int
    green_range: tuple[int, int] | None  # inclusive index span, increasing side
    red_range: tuple[int, int] | None  # inclusive index span, decreasing side

    @property
    def arc_length(self) -> float:
        if len(self.feature_values) < 2:
            return 0.0
        seg = np.diff(self.positions, axis=0)
        return float(np.sum(np.sqrt(np.sum(seg * seg, axis=1))))

    def to_json(self) -> dict:
        return {
            "point_id": self.point_id,
            "feature_index": self.feature_index,
            "samples": [
                {"feature_value": float(v), "position": [float(p[0]), float(p[1])]}
                for v, p in zip(self.feature_values, self.positions)
            ],
            "mean_index": self.mean_index,
            "sigma_lo_index": self.sigma_lo_index,
            "sigma_hi_index": self.sigma_hi_index,
            "current_index": self.current_index,
            "green_range": list(self.green_range) if self.green_range else None,
            "red_range": list(self.red_range) if self.red_range else None,
        }


def _sample_values(lo: float, hi: float, step: float, cap: int) -> np.ndarray:
    """Arithmetic sweep from lo by step, with hi appended as the final sample.

    When the sweep lands on hi (within float fuzz) the duplicate is collapsed.
    If the sweep would exceed cap samples, fall back to cap evenly spaced
    values so the endpoint guarantee and monotonicity still hold.
    """
    count = int(np.floor((hi - lo) / step + 1e-9))
    if count + 2 > cap:
        return np.linspace(lo, hi, cap)
    values = lo + step * np.arange(count + 1)
    if values[-1] >= hi - 1e-9 * step:
        values[-1] = hi
    else:
        values = np.append(values, hi)
    return values


def _nearest_index(sorted_values: np.ndarray, target: float) -> int:
    pos = int(np.searchsorted(sorted_values, target))
    if pos <= 0:
        return 0
    if pos >= len(sorted_values):
        return len(sorted_values) - 1
    before, after = sorted_values[pos - 1], sorted_values[pos]
    return pos if (after - target) < (target - before) else pos - 1


def compute_proline(
    model,
    data: Dataset,
    point_id: str,
    feature_index: int,
    c: float = 0.25,
    cap: int = 200,
    current_x=None,
) -> Proline:
    """Sweep one feature across [min, max] in steps of c * std and project.

    A constant feature yields a degenerate single-sample proline at the
    point's value. Annotation indices refer to samples: the mean marker, the
    mean +/- std markers (absent when outside the observed range), the sample
    nearest the current value, and the increasing (green) / decreasing (red)
    spans between the current value and mean +/- std.
    """
    if not 0 < c:
        raise ValueError("step factor c must be positive")
    x = data.row(point_id) if current_x is None else np.asarray(current_x, dtype=np.float64).copy()
    st = data.stats[feature_index]

    if st.std == 0.0:
        values = np.array([x[feature_index]])
    else:
        values = _sample_values(st.min, st.max, c * st.std, cap)

    sweep = np.tile(x, (len(values), 1))
    sweep[:, feature_index] = values
    positions = model.project_batch(sweep)

    mean_index = _nearest_index(values, st.mean)
    lo_val, hi_val = st.mean - st.std, st.mean + st.std
    sigma_lo = _nearest_index(values, lo_val) if st.min <= lo_val <= st.max else None
    sigma_hi = _nearest_index(values, hi_val) if st.min <= hi_val <= st.max else None
    current = float(x[feature_index])
    current_index = _nearest_index(values, current)

    def span(value_lo: float, value_hi: float) -> tuple[int, int] | None:
        value_lo, value_hi = max(value_lo, values[0]), min(value_hi, values[-1])
        if value_lo > value_hi:
            return None
        a, b = _nearest_index(values, value_lo), _nearest_index(values, value_hi)
        return (a, b) if a <= b else (b, a)

    return Proline(
        point_id=point_id,
        feature_index=feature_index,
        feature_values=values,
        positions=positions,
        mean_index=mean_index,
        sigma_lo_index=sigma_lo,
        sigma_hi_index=sigma_hi,
        current_index=current_index,
        green_range=span(current, hi_val),
        red_range=span(lo_val, current),
    )


def proline_lengths(
    model,
    data: Dataset,
    point_id: str,
    c: float = 0.25,
    cap: int = 200,
    current_x=None,
    top_k: int | None = None,
) -> list[tuple[int, float]]:
    """Arc length per feature, longest first, ties broken by feature index."""
    lengths = []
    for i in range(data.d):
        pro = compute_proline(model, data, point_id, i, c=c, cap=cap, current_x=current_x)
        lengths.append((i, pro.arc_length))
    lengths.sort(key=lambda t: (-t[1], t[0]))
    return lengths[:top_k] if top_k is not None else lengths


@dataclass
class ProjectionMark:
    feature_index: int
    position: np.ndarray  # (2,)
    direction: int  # +1 increased, -1 decreased, 0 unchanged

    def to_json(self) -> dict:
        return {
            "feature_index": self.feature_index,
            "position": [float(self.position[0]), float(self.position[1])],
            "direction": self.direction,
        }


def projection_marks(model, data: Dataset, point_id: str, current_x) -> list:
    """Per-feature marks: project the original point with one feature at its
    current value. Sits on that feature's proline by construction."""
    original = data.row(point_id)
    cur = np.asarray(current_x, dtype=np.float64)
    sweep = np.tile(original, (data.d, 1))
    sweep[np.arange(data.d), np.arange(data.d)] = cur
    positions = model.project_batch(sweep)
    marks = []
    for i in range(data.d):
        diff = cur[i] - original[i]
        direction = 0 if abs(diff) <= 1e-9 else (1 if diff > 0 else -1)
        marks.append(ProjectionMark(feature_index=i, position=positions[i], direction=direction))
    return marks


@dataclass
class FeasibilityMap:
    plane_bounds: PlaneBounds
    resolution: tuple[int, int]  # (nx, ny)
    mask: np.ndarray  # (nx, ny) bool, mask[ix, iy] at the cell center
    residuals: np.ndarray  # (nx, ny); QP residual or constraint violation count

    def cell_centers(self) -> np.ndarray:
        """(nx*ny, 2) centers, x-major: flat index = ix * ny + iy."""
        nx, ny = self.resolution
        b = self.plane_bounds
        cx = b.xmin + (np.arange(nx) + 0.5) * (b.width / nx)
        cy = b.ymin + (np.arange(ny) + 0.5) * (b.height / ny)
        gx, gy = np.meshgrid(cx, cy, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])

    def to_json(self) -> dict:
        return {
            "plane_bounds": self.plane_bounds.to_json(),
            "resolution": list(self.resolution),
            "mask": self.mask.astype(bool).tolist(),
            "residuals": self.residuals.tolist(),
        }


def compute_feasibility_map(
    model,
    data: Dataset,
    point_id: str,
    constraints: ConstraintSet,
    resolution: tuple[int, int] = (32, 32),
    plane_bounds: PlaneBounds | None = None,
    current_x=None,
) -> FeasibilityMap:
    """Evaluate reachability of every grid cell center for one point.

    Linear model: a cell is reachable when the constrained QP towards its
    center leaves a residual at most 1e-6 of the plane width. Autoencoder: the
    center is decoded and checked against the constraints directly; the
    residual channel then holds the violation count.
    """
    x = data.row(point_id) if current_x is None else np.asarray(current_x, dtype=np.float64)
    if plane_bounds is None:
        plane_bounds = PlaneBounds.around(model.project_batch(data.values))
    nx, ny = resolution
    grid = FeasibilityMap(
        plane_bounds=plane_bounds,
        resolution=(nx, ny),
        mask=np.zeros((nx, ny), dtype=bool),
        residuals=np.zeros((nx, ny)),
    )
    centers = grid.cell_centers()

    if isinstance(model, PCAModel):
        current_y = model.project(x)
        eq_mask, eq_values, lb, ub = constraints.to_delta(x)
        _, residuals, _, _ = solve_qp_batch(
            model.components,
            centers - current_y,
            eq_mask,
            eq_values / model.scale,
            lb / model.scale,
            ub / model.scale,
        )
        tol = FEASIBILITY_TOL_FACTOR * plane_bounds.width
        grid.residuals = residuals.reshape(nx, ny)
        grid.mask = grid.residuals <= tol
    elif isinstance(model, AEModel):
        decoded = model.decode_batch(centers)
        tols = lock_tolerances(data.stats)
        counts = np.array(
            [len(constraints.violations(row, tols)) for row in decoded], dtype=np.float64
        )
        grid.residuals = counts.reshape(nx, ny)
        grid.mask = grid.residuals == 0.0
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    return grid


def snap_position(last_feasible, candidate, feasible: bool) -> np.ndarray:
    """Where a dropped point lands: the candidate if reachable, else the last
    position that was."""
    return np.asarray(candidate if feasible else last_feasible, dtype=np.float64)
