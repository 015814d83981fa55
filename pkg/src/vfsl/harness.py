"""Seeded evaluation protocol and synthetic data.

One evaluation run samples a balanced support set per seed, fits the chosen
method on support-set similarities, classifies every held-out item, and
aggregates top-1 accuracy over seeds. Everything downstream of the seed is
deterministic, so identical inputs and flags reproduce reports byte for
byte.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .baselines import (
    assignment_scores,
    centroid_scores,
    fit_blm,
    fit_centroids,
    fit_flm,
)
from .errors import EmptyMatrixError, NotEnoughItemsError
from .matrixio import EmbeddingMatrix, LabelVector, ShotSet, take_rows
from .rng import Xoshiro256
from .sim_mapper import SolverConfig, fit, predict, score
from .similarity import similarity_matrix

METHODS = ("sim", "centroids", "flm", "blm")

# accuracies are quantized to 4 decimals at the source so every report
# format round-trips them exactly
_ACC_DECIMALS = 4


@dataclass(frozen=True)
class TaskSpec:
    """One evaluation task: a method, a shot count, and the seeds to average."""

    shots_per_class: int
    seeds: tuple[int, ...]
    method: str
    lam: float | None = None

    def __post_init__(self):
        if self.shots_per_class < 1:
            raise ValueError("shots_per_class must be at least 1")
        seeds = tuple(int(s) for s in self.seeds)
        if not seeds:
            raise ValueError("at least one seed is required")
        object.__setattr__(self, "seeds", seeds)
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")


@dataclass(frozen=True)
class SyntheticSpec:
    """Geometry of a synthetic task: class clusters and a random prompt bank.

    ``spread`` is the per-coordinate standard deviation of the Gaussian
    noise added to a class mean before re-normalization; small values keep
    items within a narrow angular cone around the mean.
    """

    num_classes: int
    dim: int
    prompts: int
    shots: int
    test_per_class: int
    spread: float
    seed: int

    def __post_init__(self):
        if self.num_classes < 1 or self.prompts < 1:
            raise ValueError("num_classes and prompts must be positive")
        if self.dim < 2:
            raise ValueError("dim must be at least 2")
        if self.shots < 1 or self.test_per_class < 0:
            raise ValueError("shots must be positive and test_per_class nonnegative")
        if not self.spread > 0:
            raise ValueError("spread must be strictly positive")


@dataclass(frozen=True)
class EvalReport:
    """Per-seed and aggregate top-1 accuracy for one (dataset, method, shots)."""

    dataset: str
    method: str
    shots: int
    per_seed: tuple[tuple[int, float], ...]
    mean: float
    std: float

    def __post_init__(self):
        per_seed = tuple((int(s), float(a)) for s, a in self.per_seed)
        if not per_seed:
            raise ValueError("per_seed is empty")
        accs = [a for _, a in per_seed]
        if any(a < 0 or a > 1 for a in accs):
            raise ValueError(f"accuracies must lie in [0, 1], got {accs}")
        if abs(self.mean - sum(accs) / len(accs)) > 1e-9:
            raise ValueError("mean does not match the per-seed accuracies")
        object.__setattr__(self, "per_seed", per_seed)


def sample_shots(
    features: EmbeddingMatrix,
    labels: LabelVector,
    shots_per_class: int,
    seed: int,
) -> ShotSet:
    """Draw a balanced support set without replacement, deterministically.

    One PRNG stream is seeded from ``seed`` and consumed class by class in
    ascending class order, which fixes the draw order for reproducibility.
    """
    if labels.labels.size != features.data.shape[0]:
        raise ValueError(
            f"{features.data.shape[0]} feature rows but {labels.labels.size} labels"
        )
    stream = Xoshiro256(seed)
    picked = []
    for c in range(labels.num_classes):
        pool = np.flatnonzero(labels.labels == c)
        if pool.size < shots_per_class:
            raise NotEnoughItemsError(c, int(pool.size), shots_per_class)
        chosen = stream.sample(int(pool.size), shots_per_class)
        picked.append(pool[chosen])
    indices = np.concatenate(picked)
    shot_labels = LabelVector(
        np.repeat(np.arange(labels.num_classes), shots_per_class),
        num_classes=labels.num_classes,
    )
    return ShotSet(indices, shot_labels, shots_per_class)


def _unit_rows(rows: np.ndarray) -> np.ndarray:
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def generate_synthetic(spec: SyntheticSpec):
    """Random class clusters on the unit sphere plus a random prompt bank.

    Draw order (one stream from ``spec.seed``): class means, then per-class
    item noise in class order, then prompts. Items of a class are the mean
    plus isotropic Gaussian noise of scale ``spread``, re-normalized.

    Returns (features, labels, prompts); features rows are grouped by class,
    ``spec.shots + spec.test_per_class`` rows each.
    """
    stream = Xoshiro256(spec.seed)

    def gaussian_matrix(rows: int, cols: int) -> np.ndarray:
        return np.array(
            [[stream.gaussian() for _ in range(cols)] for _ in range(rows)],
            dtype=np.float64,
        )

    means = _unit_rows(gaussian_matrix(spec.num_classes, spec.dim))
    per_class = spec.shots + spec.test_per_class
    items = np.empty((spec.num_classes * per_class, spec.dim), dtype=np.float64)
    for c in range(spec.num_classes):
        noise = gaussian_matrix(per_class, spec.dim) * spec.spread
        items[c * per_class : (c + 1) * per_class] = _unit_rows(means[c] + noise)
    prompts = _unit_rows(gaussian_matrix(spec.prompts, spec.dim))

    features = EmbeddingMatrix(items.astype(np.float32), normalized=True)
    labels = LabelVector(
        np.repeat(np.arange(spec.num_classes), per_class), num_classes=spec.num_classes
    )
    bank = EmbeddingMatrix(prompts.astype(np.float32), normalized=True)
    return features, labels, bank


def _run_seed(
    task: TaskSpec,
    features: EmbeddingMatrix,
    labels: LabelVector,
    prompts: EmbeddingMatrix,
    seed: int,
    smoothing: float,
) -> float:
    shots = sample_shots(features, labels, task.shots_per_class, seed)
    held_out = np.ones(features.data.shape[0], dtype=bool)
    held_out[shots.indices] = False
    test_idx = np.flatnonzero(held_out)
    if test_idx.size == 0:
        raise EmptyMatrixError("every item was sampled as a shot; nothing to evaluate")
    test_features = take_rows(features, test_idx)
    truth = labels.labels[test_idx]

    if task.method == "centroids":
        model = fit_centroids(features, shots)
        scores = centroid_scores(model, test_features)
    else:
        train_sims = similarity_matrix(take_rows(features, shots.indices), prompts)
        test_sims = similarity_matrix(test_features, prompts)
        if task.method == "sim":
            lam = 1.0 if task.lam is None else task.lam
            model = fit(train_sims, shots.labels, SolverConfig(lam=lam))
            scores = score(model, test_sims)
        elif task.method == "flm":
            model = fit_flm(train_sims, shots.labels)
            scores = assignment_scores(model, test_sims)
        else:
            model = fit_blm(train_sims, shots.labels, smoothing)
            scores = assignment_scores(model, test_sims)
    hits = predict(scores).labels == truth
    return round(float(np.mean(hits)), _ACC_DECIMALS)


def evaluate(
    task: TaskSpec,
    features: EmbeddingMatrix,
    labels: LabelVector,
    prompts: EmbeddingMatrix,
    dataset: str = "dataset",
    smoothing: float = 1.0,
) -> EvalReport:
    """Run the seeded protocol; held-out items are everything not sampled."""
    per_seed = tuple(
        (seed, _run_seed(task, features, labels, prompts, seed, smoothing))
        for seed in sorted(task.seeds)
    )
    accs = np.array([a for _, a in per_seed])
    return EvalReport(
        dataset=dataset,
        method=task.method,
        shots=task.shots_per_class,
        per_seed=per_seed,
        mean=float(accs.mean()),
        std=float(accs.std()),
    )


def _markdown_table(reports: list[EvalReport]) -> str:
    datasets = sorted({r.dataset for r in reports})
    by_key = {(r.shots, r.method, r.dataset): r for r in reports}
    columns = list(datasets) + (["Average"] if len(datasets) > 1 else [])
    lines = ["| Shots | Method | " + " | ".join(columns) + " |"]
    lines.append("|" + "---|" * (2 + len(columns)))
    for shots in sorted({r.shots for r in reports}):
        methods = sorted({r.method for r in reports if r.shots == shots})
        for method in methods:
            cells = []
            found = []
            for ds in datasets:
                report = by_key.get((shots, method, ds))
                if report is None:
                    cells.append("-")
                else:
                    cells.append(f"{100 * report.mean:.1f}")
                    found.append(report.mean)
            if len(datasets) > 1:
                cells.append(f"{100 * (sum(found) / len(found)):.1f}" if found else "-")
            lines.append(f"| {shots} | {method} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def emit_report(reports: list[EvalReport], format: str = "csv") -> str:
    """Render reports as csv, json, or a markdown table.

    CSV carries one row per seed (accuracy at 4 decimals, which is exact for
    the quantized values) plus mean and std rows at full precision. Markdown
    shows mean accuracy as percentages, one row per (shots, method), one
    column per dataset.
    """
    if not reports:
        raise ValueError("no reports to emit")
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["dataset", "method", "shots", "seed", "accuracy"])
        for r in reports:
            for seed, acc in r.per_seed:
                writer.writerow([r.dataset, r.method, r.shots, seed, f"{acc:.4f}"])
            writer.writerow([r.dataset, r.method, r.shots, "mean", repr(r.mean)])
            writer.writerow([r.dataset, r.method, r.shots, "std", repr(r.std)])
        return buf.getvalue()
    if format == "json":
        payload = [
            {
                "dataset": r.dataset,
                "method": r.method,
                "shots": r.shots,
                "per_seed": [{"seed": s, "accuracy": a} for s, a in r.per_seed],
                "mean": r.mean,
                "std": r.std,
            }
            for r in reports
        ]
        return json.dumps(payload, indent=2) + "\n"
    if format == "markdown":
        return _markdown_table(reports)
    raise ValueError(f"unknown report format {format!r}")
