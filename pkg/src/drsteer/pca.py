"""Two-component PCA with exact out-of-sample extension.

The plane basis has the first two principal components as columns. Because
projection is linear, moving a point and projecting is the same as projecting
its displacement: that is what makes the interactive loop cheap compared to a
refit. Feature-space arithmetic stays in original units; standardization is
applied only at the model boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintSet
from .dataset import Dataset
from .solver import QPProblem, QPSolution, least_norm, solve_qp


class DegenerateFitError(ValueError):
    """Raised when the centered data has rank below 2 (no plane to fit)."""


@dataclass
class PCAModel:
    mean: np.ndarray  # (d,) feature means, original units
    scale: np.ndarray  # (d,) per-feature divisor; 1.0 where std is 0 or standardize off
    components: np.ndarray  # (d, 2) orthonormal columns, sign-normalized
    explained_variance: np.ndarray  # (2,) population variances along the components
    standardize: bool

    @property
    def d(self) -> int:
        return self.components.shape[0]

    def project(self, x) -> np.ndarray:
        """Plane coordinates of a full feature vector."""
        z = (np.asarray(x, dtype=np.float64) - self.mean) / self.scale
        return z @ self.components

    def project_batch(self, xs) -> np.ndarray:
        z = (np.asarray(xs, dtype=np.float64) - self.mean) / self.scale
        return z @ self.components

    def forward(self, delta_x) -> np.ndarray:
        """Plane displacement caused by a feature displacement (out-of-sample)."""
        return (np.asarray(delta_x, dtype=np.float64) / self.scale) @ self.components

    def backward(self, delta_y) -> np.ndarray:
        """Least-norm feature displacement whose forward image is delta_y.

        Norm minimality holds in standardized units; the result is returned in
        original units so forward(backward(dy)) == dy.
        """
        z = least_norm(self.components, delta_y)
        return z * self.scale

    def backward_constrained(
        self, delta_y, constraints: ConstraintSet, x, tol: float = 1e-8,
        max_iter: int = 10_000,
    ) -> QPSolution:
        """Best-residual feature displacement honoring locks and bounds.

        Constraints are absolute per-feature statements about x + delta; they
        are translated to displacement form against the current x, then into
        standardized units for the solver. delta_x in the returned solution is
        in original units and its residual is ||forward(delta_x) - delta_y||.
        """
        eq_mask, eq_values, lb, ub = constraints.to_delta(x)
        problem = QPProblem(
            basis=self.components,
            target=np.asarray(delta_y, dtype=np.float64),
            eq_mask=eq_mask,
            eq_values=eq_values / self.scale,
            lb=lb / self.scale,
            ub=ub / self.scale,
        )
        sol = solve_qp(problem, tol=tol, max_iter=max_iter)
        delta_x = sol.delta_x * self.scale
        residual = float(np.linalg.norm(self.forward(delta_x) - np.asarray(delta_y)))
        return QPSolution(
            delta_x=delta_x,
            residual=residual,
            converged=sol.converged,
            iterations=sol.iterations,
        )

    def reconstruct(self, y) -> np.ndarray:
        """Back-map plane coordinates to the closest full feature vector."""
        return self.mean + (self.components @ np.asarray(y, dtype=np.float64)) * self.scale

    def to_json(self) -> dict:
        return {
            "kind": "pca",
            "mean": self.mean.tolist(),
            "sigmas": self.scale.tolist(),
            "components": [self.components[:, 0].tolist(), self.components[:, 1].tolist()],
            "explained_variance": self.explained_variance.tolist(),
            "standardize": self.standardize,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "PCAModel":
        cols = payload["components"]
        return cls(
            mean=np.asarray(payload["mean"], dtype=np.float64),
            scale=np.asarray(payload["sigmas"], dtype=np.float64),
            components=np.column_stack(
                [np.asarray(cols[0], dtype=np.float64), np.asarray(cols[1], dtype=np.float64)]
            ),
            explained_variance=np.asarray(payload["explained_variance"], dtype=np.float64),
            standardize=bool(payload["standardize"]),
        )


def fit_pca(data: Dataset, standardize: bool = True) -> PCAModel:
    """Fit a 2-component PCA via thin SVD of the (standardized) centered matrix.

    Constant columns get a unit divisor so standardization never divides by
    zero. The sign of each component is normalized so its largest-magnitude
    entry is positive, which makes the fit deterministic. Raises
    DegenerateFitError when the centered data has rank below 2.
    """
    x = data.values
    n, d = x.shape
    if d < 2:
        raise DegenerateFitError("need at least 2 features to fit a plane")
    mean = x.mean(axis=0)
    if standardize:
        sigma = x.std(axis=0)
        scale = np.where(sigma > 0.0, sigma, 1.0)
    else:
        scale = np.ones(d)
    z = (x - mean) / scale
    _, s, vt = np.linalg.svd(z, full_matrices=False)
    if s[0] <= 0.0 or s[1] <= s[0] * 1e-12:
        raise DegenerateFitError("centered data has rank < 2")
    components = vt[:2].T.copy()
    for j in range(2):
        col = components[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            components[:, j] = -col
    return PCAModel(
        mean=mean,
        scale=scale,
        components=components,
        explained_variance=(s[:2] ** 2) / n,
        standardize=standardize,
    )
