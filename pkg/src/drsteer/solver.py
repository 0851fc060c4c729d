"""Least-norm back-projection and box/lock constrained quadratic programming.

The plane basis is a d x 2 matrix with orthonormal columns. Backward mapping
solves for a feature-space displacement whose forward image matches a plane
displacement, either exactly with minimum norm (unconstrained) or as the
minimizer of the residual over a box with some coordinates locked:

    minimize ||delta @ basis - target||^2
    s.t.     delta[i] = eq_values[i]   where eq_mask[i]
             lb <= delta <= ub

Unbounded box edges are the infinity sentinels (math.inf / numpy.inf), never
large finite stand-ins.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class InfeasibleBoundsError(ValueError):
    """Constraint box is empty (lb > ub, or a lock falls outside its bounds)."""


@dataclass
class QPProblem:
    basis: np.ndarray  # (d, 2), orthonormal columns
    target: np.ndarray  # (2,)
    eq_mask: np.ndarray  # (d,) bool, True where the coordinate is locked
    eq_values: np.ndarray  # (d,), locked value where eq_mask, ignored elsewhere
    lb: np.ndarray  # (d,), -inf where unbounded below
    ub: np.ndarray  # (d,), +inf where unbounded above

    @classmethod
    def unconstrained(cls, basis, target) -> "QPProblem":
        d = np.asarray(basis).shape[0]
        return cls(
            basis=np.asarray(basis, dtype=np.float64),
            target=np.asarray(target, dtype=np.float64),
            eq_mask=np.zeros(d, dtype=bool),
            eq_values=np.zeros(d),
            lb=np.full(d, -np.inf),
            ub=np.full(d, np.inf),
        )

    def validate(self) -> None:
        d = self.basis.shape[0]
        if self.basis.shape != (d, 2):
            raise ValueError("basis must be d x 2")
        if self.target.shape != (2,):
            raise ValueError("target must be a 2-vector")
        for name in ("eq_mask", "eq_values", "lb", "ub"):
            if getattr(self, name).shape != (d,):
                raise ValueError(f"{name} must have length {d}")
        if np.any(self.lb > self.ub):
            raise InfeasibleBoundsError("lb exceeds ub")
        locked = self.eq_mask
        if np.any(locked):
            v = self.eq_values[locked]
            if np.any(v < self.lb[locked]) or np.any(v > self.ub[locked]):
                raise InfeasibleBoundsError("locked value outside its bounds")


@dataclass
class QPSolution:
    delta_x: np.ndarray
    residual: float  # ||delta_x @ basis - target||_2
    converged: bool
    iterations: int


def least_norm(basis, target) -> np.ndarray:
    """Minimum-norm solution of delta @ basis = target for orthonormal basis.

    With orthonormal columns the Moore-Penrose pseudoinverse of basis.T is
    basis itself, so the least-norm preimage is simply basis @ target. Any
    other solution differs by a null-space component orthogonal to it and is
    strictly longer.
    """
    e = np.asarray(basis, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    gram = e.T @ e
    if not np.allclose(gram, np.eye(gram.shape[0]), atol=1e-8):
        raise ValueError("basis columns are not orthonormal")
    return e @ t


def _projected_gradient_norms(x, g, lb, ub) -> np.ndarray:
    """Row-wise norm of the reduced gradient of a box-constrained problem.

    Components pinned at a bound only count when they push outward; a
    coordinate fixed by lb == ub contributes nothing.
    """
    pg = g.copy()
    at_lb = x <= lb
    at_ub = x >= ub
    pg[at_lb] = np.minimum(pg[at_lb], 0.0)
    pg[at_ub] = np.maximum(pg[at_ub], 0.0)
    return np.sqrt(np.sum(pg * pg, axis=-1))


def solve_qp_batch(
    basis,
    targets,
    eq_mask,
    eq_values,
    lb,
    ub,
    tol: float = 1e-8,
    max_iter: int = 10_000,
):
    """Solve one QP per row of targets, sharing basis, locks and box.

    Projected gradient descent with the fixed step 1/L, L = 2 lambda_max of
    basis @ basis.T, which is 2 for orthonormal columns. Rows are frozen the
    moment their reduced-gradient norm drops below tol, so every row follows
    exactly the trajectory it would follow when solved alone.

    Returns (deltas (B, d), residuals (B,), converged (B,), iterations (B,)).
    """
    e = np.asarray(basis, dtype=np.float64)
    ts = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    d = e.shape[0]
    mask = np.asarray(eq_mask, dtype=bool)
    vals = np.asarray(eq_values, dtype=np.float64)
    lo = np.asarray(lb, dtype=np.float64)
    hi = np.asarray(ub, dtype=np.float64)

    probe = QPProblem(e, ts[0], mask, vals, lo, hi)
    probe.validate()

    nb = ts.shape[0]
    free = ~mask
    deltas = np.zeros((nb, d))
    if np.any(mask):
        deltas[:, mask] = vals[mask]
    locked_image = vals[mask] @ e[mask] if np.any(mask) else np.zeros(2)
    residual_targets = ts - locked_image  # what the free coordinates must hit

    m = int(np.sum(free))
    if m == 0:
        res = np.linalg.norm(deltas @ e - ts, axis=1)
        return deltas, res, np.ones(nb, dtype=bool), np.zeros(nb, dtype=int)

    ef = e[free]  # (m, 2)
    lo_f, hi_f = lo[free], hi[free]
    x = np.clip(np.zeros((nb, m)), lo_f, hi_f)
    iterations = np.zeros(nb, dtype=int)
    active = np.ones(nb, dtype=bool)
    step = 0.5  # 1/L with L = 2 for an orthonormal basis

    for _ in range(max_iter):
        r = x[active] @ ef - residual_targets[active]
        g = 2.0 * (r @ ef.T)
        pg = _projected_gradient_norms(x[active], g, lo_f, hi_f)
        done = pg < tol
        if np.any(~done):
            idx = np.flatnonzero(active)
            move = idx[~done]
            x[move] = np.clip(x[move] - step * g[~done], lo_f, hi_f)
            iterations[move] += 1
            still = active.copy()
            still[idx[done]] = False
            active = still
        else:
            active = np.zeros_like(active)
        if not np.any(active):
            break

    converged = ~active
    if np.any(active):
        # rows that ran out of iterations: report their final state honestly
        r = x[active] @ ef - residual_targets[active]
        g = 2.0 * (r @ ef.T)
        pg = _projected_gradient_norms(x[active], g, lo_f, hi_f)
        converged[np.flatnonzero(active)] = pg < tol

    deltas[:, free] = x
    residuals = np.linalg.norm(deltas @ e - ts, axis=1)
    return deltas, residuals, converged, iterations


def solve_qp(problem: QPProblem, tol: float = 1e-8, max_iter: int = 10_000) -> QPSolution:
    """Solve a single box/lock QP instance. See solve_qp_batch for the method."""
    problem.validate()
    deltas, residuals, converged, iterations = solve_qp_batch(
        problem.basis,
        problem.target[None, :],
        problem.eq_mask,
        problem.eq_values,
        problem.lb,
        problem.ub,
        tol=tol,
        max_iter=max_iter,
    )
    return QPSolution(
        delta_x=deltas[0],
        residual=float(residuals[0]),
        converged=bool(converged[0]),
        iterations=int(iterations[0]),
    )
