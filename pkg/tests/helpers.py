"""Shared test utilities: independent oracles and data builders.

Oracles here deliberately avoid the library code paths they are used to
check: the least-norm oracle goes through numpy's pseudoinverse, the QP
oracle through exhaustive grid evaluation, and gradient oracles through
central finite differences of the loss alone.
"""

from __future__ import annotations

import numpy as np

from drsteer.autoencoder import AEModel, reconstruction_loss


def random_orthonormal(rng, d: int, cols: int = 2) -> np.ndarray:
    """Random d x cols matrix with orthonormal columns via QR."""
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return q[:, :cols].copy()


def pinv_least_norm(basis, target) -> np.ndarray:
    """Least-norm solution of delta @ basis = target through numpy's pinv."""
    return np.linalg.pinv(np.asarray(basis).T) @ np.asarray(target)


def grid_qp_objective(basis, target, eq_mask, eq_values, lb, ub, step: float = 1e-3) -> float:
    """Exhaustive grid minimum of ||delta @ basis - target||^2 over the box.

    Locked coordinates are substituted; every free axis is sampled densely
    from its lower to its upper bound with both endpoints on the grid. Only
    usable when all free bounds are finite and the grid is small enough to
    enumerate.
    """
    basis = np.asarray(basis, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    eq_mask = np.asarray(eq_mask, dtype=bool)
    free = ~eq_mask
    if np.any(eq_mask):
        base = np.asarray(eq_values)[eq_mask] @ basis[eq_mask]
    else:
        base = np.zeros(2)
    resid_target = target - base
    if not np.any(free):
        return float(np.sum(resid_target**2))
    axes = []
    for lo, hi in zip(np.asarray(lb)[free], np.asarray(ub)[free]):
        count = int(round((hi - lo) / step)) + 1
        axes.append(np.linspace(lo, hi, max(count, 2)))
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    proj = pts @ basis[free]
    obj = np.sum((proj - resid_target) ** 2, axis=1)
    return float(obj.min())


def qp_objective(basis, target, delta) -> float:
    diff = np.asarray(delta) @ np.asarray(basis) - np.asarray(target)
    return float(np.sum(diff**2))


def numerical_gradients(model: AEModel, xs, eps: float = 1e-4):
    """Central finite differences of the reconstruction loss for every
    weight and bias entry. Slow and simple on purpose."""
    grads_w, grads_b = [], []
    for w in model.weights:
        g = np.zeros_like(w)
        for idx in np.ndindex(w.shape):
            keep = w[idx]
            w[idx] = keep + eps
            hi = reconstruction_loss(model, xs)
            w[idx] = keep - eps
            lo = reconstruction_loss(model, xs)
            w[idx] = keep
            g[idx] = (hi - lo) / (2 * eps)
        grads_w.append(g)
    for b in model.biases:
        g = np.zeros_like(b)
        for idx in np.ndindex(b.shape):
            keep = b[idx]
            b[idx] = keep + eps
            hi = reconstruction_loss(model, xs)
            b[idx] = keep - eps
            lo = reconstruction_loss(model, xs)
            b[idx] = keep
            g[idx] = (hi - lo) / (2 * eps)
        grads_b.append(g)
    return grads_w, grads_b


def max_relative_gradient_error(analytic, numeric) -> float:
    worst = 0.0
    for ga, gn in zip(analytic, numeric):
        denom = np.maximum(np.abs(ga) + np.abs(gn), 1e-8)
        worst = max(worst, float(np.max(np.abs(ga - gn) / denom)))
    return worst


def point_line_distances(points) -> np.ndarray:
    """Distance of each point from the line through the first and last point.

    If the endpoints coincide, distances are measured from that single point.
    """
    pts = np.asarray(points, dtype=np.float64)
    a, b = pts[0], pts[-1]
    ab = b - a
    norm = np.linalg.norm(ab)
    if norm == 0.0:
        return np.linalg.norm(pts - a, axis=1)
    cross = (pts[:, 0] - a[0]) * ab[1] - (pts[:, 1] - a[1]) * ab[0]
    return np.abs(cross) / norm


def synthetic_indicators_csv(seed: int = 7) -> bytes:
    """34 synthetic countries x 8 socioeconomic indicator columns."""
    rng = np.random.default_rng(seed)
    names = [
        "LifeExpectancy",
        "HealthIndex",
        "Satisfaction",
        "StudentSkills",
        "Schooling",
        "HouseholdIncome",
        "AirQuality",
        "EmploymentRate",
    ]
    means = np.array([78.0, 68.0, 6.5, 480.0, 17.0, 28000.0, 22.0, 67.0])
    scales = np.array([3.0, 8.0, 0.7, 25.0, 1.5, 6000.0, 6.0, 7.0])
    rows = means + rng.standard_normal((34, 8)) * scales
    lines = ["country," + ",".join(names)]
    for i, row in enumerate(rows):
        lines.append(f"c{i:02d}," + ",".join(repr(float(v)) for v in row))
    return ("\n".join(lines) + "\n").encode()
