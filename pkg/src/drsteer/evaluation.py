"""Benchmark harness: does the cheap out-of-sample route stay faithful?

The reference for every interaction is the expensive route, a full refit
(PCA) or retrain (autoencoder, same seed and hyperparameters) on the modified
data. Fidelity is scored by comparing the modified point's k nearest
neighbors between the interactive plane and the recomputed plane: the score
multiplies neighbor overlap with a rank-agreement term, so 1.0 means the same
neighbors in the same order.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .autoencoder import TrainConfig, train_autoencoder
from .dataset import Dataset, dataset_from_matrix
from .interactions import PlaneBounds
from .pca import fit_pca


def gen_gaussian(n: int, d: int, seed: int) -> Dataset:
    """Rows drawn from N(0, diag(1, 2, ..., d) / d). Deterministic per seed."""
    rng = np.random.default_rng(seed)
    stds = np.sqrt((np.arange(d) + 1.0) / d)
    values = rng.standard_normal((n, d)) * stds
    return gen_dataset_from(values)


def gen_dataset_from(values) -> Dataset:
    return dataset_from_matrix(values)


def knn(positions, query_index: int, k: int) -> list[tuple[int, float]]:
    """Brute-force k nearest neighbors by Euclidean distance.

    The query point itself is excluded; exact distance ties are broken by
    ascending index, which makes the ordering fully deterministic.
    """
    pos = np.asarray(positions, dtype=np.float64)
    n = pos.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError("k must be between 1 and n - 1")
    diffs = pos - pos[query_index]
    dists = np.sqrt(np.sum(diffs * diffs, axis=1))
    order = np.lexsort((np.arange(n), dists))
    order = order[order != query_index][:k]
    return [(int(i), float(dists[i])) for i in order]


@dataclass(frozen=True)
class NeighborhoodScore:
    overlap: int
    rank_corr: float
    score: float


def neighborhood_correlation(a, b, k: int) -> NeighborhoodScore:
    """Agreement between two ordered neighbor lists of length k.

    score = (overlap / k) * (1 + rank_corr) / 2, where rank_corr is the
    Spearman correlation of the shared elements' ranks in a versus in b.
    With one or zero shared elements rank order carries no information and
    rank_corr is taken as 1, so identical lists score 1.0 and disjoint
    lists 0.0.
    """
    ia = [int(e[0]) if isinstance(e, (tuple, list)) else int(e) for e in a]
    ib = [int(e[0]) if isinstance(e, (tuple, list)) else int(e) for e in b]
    if len(ia) != k or len(ib) != k:
        raise ValueError("both neighbor lists must have length k")
    pos_a = {e: r for r, e in enumerate(ia)}
    pos_b = {e: r for r, e in enumerate(ib)}
    shared = [e for e in ia if e in pos_b]
    m = len(shared)
    if m <= 1:
        rho = 1.0
    else:
        # re-rank the shared elements inside each list, then the classic
        # Spearman formula applies because all ranks are distinct
        ranks_a = np.argsort(np.argsort([pos_a[e] for e in shared]))
        ranks_b = np.argsort(np.argsort([pos_b[e] for e in shared]))
        dsq = float(np.sum((ranks_a - ranks_b) ** 2))
        rho = 1.0 - 6.0 * dsq / (m * (m * m - 1))
    score = (m / k) * (1.0 + rho) / 2.0
    return NeighborhoodScore(overlap=m, rank_corr=rho, score=score)


@dataclass
class BenchConfig:
    sample_counts: tuple[int, ...] = (100, 1000, 10000)
    dimension_counts: tuple[int, ...] = (10, 50, 100)
    fixed_d: int = 10
    fixed_n: int = 100
    k: int = 10
    forward_perturbation: float = 1.0 / 8.0  # in units of the feature's std
    backward_perturbation: float = 1.0 / 80.0  # in units of the plane width
    repeats: int = 10
    seed: int = 0
    models: tuple[str, ...] = ("pca", "autoencoder")
    ae_config: TrainConfig = field(
        default_factory=lambda: TrainConfig(epochs=20, batch_size=32, seed=0)
    )


@dataclass
class BenchRow:
    setting_axis: str
    setting_value: int
    model: str
    op: str
    median_us: float
    accuracy_mean: float | None
    accuracy_std: float | None
    repeats: int
    seed: int


CSV_COLUMNS = (
    "setting_axis",
    "setting_value",
    "model",
    "op",
    "median_us",
    "accuracy_mean",
    "accuracy_std",
    "repeats",
    "seed",
)


def write_report(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.setting_axis,
                    r.setting_value,
                    r.model,
                    r.op,
                    f"{r.median_us:.3f}",
                    "" if r.accuracy_mean is None else repr(r.accuracy_mean),
                    "" if r.accuracy_std is None else repr(r.accuracy_std),
                    r.repeats,
                    r.seed,
                ]
            )


def _fit(kind: str, data: Dataset, ae_config: TrainConfig):
    if kind == "pca":
        return fit_pca(data)
    return train_autoencoder(data, ae_config)


def _positions(model, data: Dataset) -> np.ndarray:
    return model.project_batch(data.values)


def _bench_setting(axis, value, n, d, kind, config, rng) -> list[BenchRow]:
    data = gen_gaussian(n, d, seed=int(rng.integers(2**31)))
    ae_cfg = TrainConfig(
        epochs=config.ae_config.epochs,
        batch_size=min(config.ae_config.batch_size, n),
        learning_rate=config.ae_config.learning_rate,
        seed=config.ae_config.seed,
        layer_sizes=config.ae_config.layer_sizes,
    )
    model = _fit(kind, data, ae_cfg)
    base_positions = _positions(model, data)
    plane_width = PlaneBounds.around(base_positions).width
    sigmas = data.sigmas()

    fwd_times, bwd_times, refit_times = [], [], []
    fwd_scores, bwd_scores = [], []

    for _ in range(config.repeats):
        # forward: nudge one random feature of one random point
        p = int(rng.integers(n))
        j = int(rng.integers(d))
        delta = config.forward_perturbation * sigmas[j]
        x_new = data.values[p].copy()
        x_new[j] += delta
        if kind == "pca":
            dx = x_new - data.values[p]
            t0 = time.perf_counter_ns()
            dy = model.forward(dx)
            fwd_times.append(time.perf_counter_ns() - t0)
            oos_point = base_positions[p] + dy
        else:
            t0 = time.perf_counter_ns()
            oos_point = model.encode(x_new)
            fwd_times.append(time.perf_counter_ns() - t0)
        oos_positions = base_positions.copy()
        oos_positions[p] = oos_point

        modified = data.values.copy()
        modified[p] = x_new
        mod_data = gen_dataset_from(modified)
        t0 = time.perf_counter_ns()
        remodel = _fit(kind, mod_data, ae_cfg)
        re_positions = _positions(remodel, mod_data)
        refit_times.append(time.perf_counter_ns() - t0)

        score = neighborhood_correlation(
            knn(oos_positions, p, config.k), knn(re_positions, p, config.k), config.k
        )
        fwd_scores.append(score.score)

        # backward: drag one random point a short way in a random direction
        p = int(rng.integers(n))
        theta = rng.uniform(0.0, 2.0 * np.pi)
        dy = config.backward_perturbation * plane_width * np.array([np.cos(theta), np.sin(theta)])
        target = base_positions[p] + dy
        if kind == "pca":
            t0 = time.perf_counter_ns()
            dx = model.backward(dy)
            bwd_times.append(time.perf_counter_ns() - t0)
            x_new = data.values[p] + dx
        else:
            t0 = time.perf_counter_ns()
            x_new = model.decode(target)
            bwd_times.append(time.perf_counter_ns() - t0)
            if np.all(dy == 0.0):
                # a zero-length drag is a no-op interaction: decoding anyway
                # would swap the row for its reconstruction without any input
                x_new = data.values[p]
        oos_positions = base_positions.copy()
        oos_positions[p] = target

        modified = data.values.copy()
        modified[p] = x_new
        mod_data = gen_dataset_from(modified)
        remodel = _fit(kind, mod_data, ae_cfg)
        re_positions = _positions(remodel, mod_data)
        score = neighborhood_correlation(
            knn(oos_positions, p, config.k), knn(re_positions, p, config.k), config.k
        )
        bwd_scores.append(score.score)

    def us(values) -> float:
        return float(np.median(values) / 1000.0)

    def row(op, times, scores) -> BenchRow:
        return BenchRow(
            setting_axis=axis,
            setting_value=value,
            model=kind,
            op=op,
            median_us=us(times),
            accuracy_mean=None if scores is None else float(np.mean(scores)),
            accuracy_std=None if scores is None else float(np.std(scores)),
            repeats=config.repeats,
            seed=config.seed,
        )

    return [
        row("forward", fwd_times, fwd_scores),
        row("backward", bwd_times, bwd_scores),
        row("recompute", refit_times, None),
    ]


def run_benchmark(config: BenchConfig | None = None) -> list[BenchRow]:
    """Sweep sample counts (fixed d) and dimensionalities (fixed n).

    All random choices are drawn from one seeded generator in a fixed order,
    so accuracy values are fully reproducible; only the timing columns vary
    between runs. repeats must be at least 10.
    """
    config = config or BenchConfig()
    if config.repeats < 10:
        raise ValueError("repeats must be at least 10")
    rng = np.random.default_rng(config.seed)
    rows: list[BenchRow] = []
    for n in config.sample_counts:
        for kind in config.models:
            rows.extend(_bench_setting("n", n, n, config.fixed_d, kind, config, rng))
    for d in config.dimension_counts:
        for kind in config.models:
            rows.extend(_bench_setting("d", d, config.fixed_n, d, kind, config, rng))
    return rows
