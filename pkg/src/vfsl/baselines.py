"""Vocabulary-free comparison methods.

Three ways to classify without class-name prompts, all operating on the same
inputs as the ridge mapper:

* nearest centroid: replace the prompt bank with normalized per-class means
  of the support features and classify by highest dot product;
* one-to-one frequency mapping: give each class the single prompt its shots
  most often predict, injectively;
* Bayesian mapping: weight every (prompt, class) pair by the smoothed
  conditional frequency of the class given the prompt.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyClassError,
    InsufficientPromptsError,
    NotNormalizedError,
)
from .matrixio import EmbeddingMatrix, LabelVector, ShotSet, _freeze
from .sim_mapper import ScoreMatrix, _require_all_classes
from .similarity import SimilarityMatrix, l2_normalize, similarity_matrix

ONE_TO_ONE = "one_to_one"
BAYESIAN = "bayesian"


@dataclass(frozen=True)
class CentroidModel:
    """One unit-norm centroid per class, row c for class c."""

    centroids: EmbeddingMatrix

    def __post_init__(self):
        if not self.centroids.normalized:
            raise NotNormalizedError("centroids must be unit-normalized")


@dataclass(frozen=True)
class AssignmentModel:
    """A prompt-to-class assignment, injective or weighted.

    ``kind`` is "one_to_one" (``mapping[c]`` is the prompt index serving
    class c, all distinct) or "bayesian" (``weights`` is a K x C matrix of
    nonnegative conditional frequencies). ``num_prompts`` records K so the
    model can validate test inputs and serialize itself.
    """

    kind: str
    num_prompts: int
    mapping: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == ONE_TO_ONE:
            if self.mapping is None or self.weights is not None:
                raise ValueError("one_to_one models carry a mapping and no weights")
            m = np.ascontiguousarray(self.mapping, dtype=np.int64)
            if m.ndim != 1 or m.size == 0:
                raise ValueError("mapping must be a nonempty 1-D array")
            if m.min() < 0 or m.max() >= self.num_prompts:
                raise ValueError(
                    f"mapping entries must lie in [0, {self.num_prompts})"
                )
            if np.unique(m).size != m.size:
                raise ValueError("mapping must be injective")
            object.__setattr__(self, "mapping", _freeze(m))
        elif self.kind == BAYESIAN:
            if self.weights is None or self.mapping is not None:
                raise ValueError("bayesian models carry weights and no mapping")
            w = np.ascontiguousarray(self.weights, dtype=np.float64)
            if w.ndim != 2 or w.shape[0] != self.num_prompts:
                raise ValueError(
                    f"weights must be {self.num_prompts} x C, got shape {w.shape}"
                )
            if not np.isfinite(w).all() or (w < 0).any():
                raise ValueError("weights must be finite and nonnegative")
            object.__setattr__(self, "weights", _freeze(w))
        else:
            raise ValueError(f"unknown assignment kind {self.kind!r}")

    @property
    def num_classes(self) -> int:
        if self.kind == ONE_TO_ONE:
            return self.mapping.size
        return self.weights.shape[1]


def fit_centroids(features: EmbeddingMatrix, shots: ShotSet) -> CentroidModel:
    """Normalized per-class means of the support features."""
    if not features.normalized:
        raise NotNormalizedError("features must be normalized before averaging")
    num_classes = shots.labels.num_classes
    dim = features.data.shape[1]
    means = np.empty((num_classes, dim), dtype=np.float64)
    for c in range(num_classes):
        rows = shots.indices[shots.labels.labels == c]
        if rows.size == 0:
            raise EmptyClassError(c)
        means[c] = features.data[rows].astype(np.float64).mean(axis=0)
    return CentroidModel(l2_normalize(EmbeddingMatrix(means)))


def centroid_scores(model: CentroidModel, features: EmbeddingMatrix) -> ScoreMatrix:
    """Dot products against the centroids; argmax is nearest-centroid."""
    sims = similarity_matrix(features, model.centroids)
    return ScoreMatrix(sims.data)


def _zero_shot_predictions(sims: SimilarityMatrix) -> np.ndarray:
    # per-shot argmax over prompts, ties to the lower prompt index
    return np.argmax(sims.data, axis=1)


def fit_flm(train_sims: SimilarityMatrix, labels: LabelVector) -> AssignmentModel:
    """One-to-one frequency mapping from classes to prompts.

    Each shot votes for its highest-similarity prompt. Classes then claim
    prompts greedily by descending vote count over all (class, prompt)
    pairs, skipping classes already served and prompts already taken; ties
    break by lower class index, then lower prompt index.
    """
    n, k = train_sims.data.shape
    if labels.labels.size != n:
        raise DimensionMismatchError(f"{n} similarity rows but {labels.labels.size} labels")
    num_classes = labels.num_classes
    if k < num_classes:
        raise InsufficientPromptsError(
            f"{k} prompts cannot be assigned injectively to {num_classes} classes"
        )
    _require_all_classes(labels)
    preds = _zero_shot_predictions(train_sims)
    counts = np.zeros((num_classes, k), dtype=np.int64)
    np.add.at(counts, (labels.labels, preds), 1)

    # one pass over pairs sorted by (count desc, class asc, prompt asc) is
    # equivalent to repeatedly extracting the best remaining pair
    class_of = np.repeat(np.arange(num_classes), k)
    prompt_of = np.tile(np.arange(k), num_classes)
    order = np.lexsort((prompt_of, class_of, -counts.ravel()))
    mapping = np.full(num_classes, -1, dtype=np.int64)
    prompt_taken = np.zeros(k, dtype=bool)
    assigned = 0
    for pair in order:
        c = class_of[pair]
        p = prompt_of[pair]
        if mapping[c] >= 0 or prompt_taken[p]:
            continue
        mapping[c] = p
        prompt_taken[p] = True
        assigned += 1
        if assigned == num_classes:
            break
    return AssignmentModel(kind=ONE_TO_ONE, num_prompts=k, mapping=mapping)


def fit_blm(
    train_sims: SimilarityMatrix, labels: LabelVector, smoothing: float = 1.0
) -> AssignmentModel:
    """Bayesian label mapping from zero-shot prediction counts.

    With n(k, c) counting shots of class c predicted as prompt k,

        weight(k, c) = (n(k, c) + smoothing) / (n(k, .) + smoothing * C)

    At smoothing 0, prompts never predicted get an all-zero row.
    """
    n, k = train_sims.data.shape
    if labels.labels.size != n:
        raise DimensionMismatchError(f"{n} similarity rows but {labels.labels.size} labels")
    if smoothing < 0:
        raise ValueError(f"smoothing must be nonnegative, got {smoothing}")
    _require_all_classes(labels)
    num_classes = labels.num_classes
    preds = _zero_shot_predictions(train_sims)
    counts = np.zeros((k, num_classes), dtype=np.float64)
    np.add.at(counts, (preds, labels.labels), 1.0)
    denom = counts.sum(axis=1, keepdims=True) + smoothing * num_classes
    numer = counts + smoothing
    weights = np.divide(
        numer, denom, out=np.zeros_like(numer), where=denom > 0
    )
    return AssignmentModel(kind=BAYESIAN, num_prompts=k, weights=weights)


def assignment_scores(model: AssignmentModel, test_sims: SimilarityMatrix) -> ScoreMatrix:
    """Class scores for an assignment model.

    One-to-one selects each class's assigned prompt column; Bayesian maps
    through the weight matrix.
    """
    if test_sims.data.shape[1] != model.num_prompts:
        raise DimensionMismatchError(
            f"test similarities have {test_sims.data.shape[1]} columns, "
            f"model expects {model.num_prompts}"
        )
    if model.kind == ONE_TO_ONE:
        return ScoreMatrix(test_sims.data[:, model.mapping].astype(np.float64))
    return ScoreMatrix(test_sims.data.astype(np.float64) @ model.weights)
