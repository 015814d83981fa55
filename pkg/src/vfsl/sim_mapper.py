"""Ridge regression from similarity scores to class scores.

Training solves

    min_W  ||Y - L W||_F^2 + lam * ||W||_F^2

for the K x C weight matrix W, where L is the N x K matrix of support-set
similarities and Y the one-hot labels. The minimizer is the standard ridge
solution

    W = (L^T L + lam I)^-1 L^T Y

computed by Cholesky factorization of the K x K normal matrix. The normal
matrix is accumulated in float64 from float32 row blocks, so L is never
materialized in double precision; peak extra memory is the K x K matrix
itself (8 K^2 bytes) plus one row block.

Weights are kept in float64 in memory so the stationarity guarantee holds;
serialization rounds them to storage precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.linalg.blas import dsyrk

from .errors import DimensionMismatchError, EmptyClassError, SingularSystemError
from .matrixio import LabelVector, _check_names, _freeze
from .similarity import SimilarityMatrix

_BLOCK_ROWS = 2048


@dataclass(frozen=True)
class SolverConfig:
    """Ridge solver settings.

    ``lam`` weights the Tikhonov penalty. ``jitter`` is a relative fallback:
    when lam is 0 and the normal matrix is numerically singular, one retry
    adds jitter * trace/K to the diagonal before giving up.
    """

    lam: float = 1.0
    jitter: float = 1e-8

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if self.jitter < 0:
            raise ValueError(f"jitter must be nonnegative, got {self.jitter}")


@dataclass(frozen=True)
class MappingModel:
    """A fitted K x C weight matrix with its solver provenance."""

    weights: np.ndarray
    lam: float
    num_classes: int
    prompt_names: tuple[str, ...] | None = None

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if w.ndim != 2:
            raise ValueError(f"weights must be 2-D, got shape {w.shape}")
        if not np.isfinite(w).all():
            raise ValueError("weights contain NaN or infinite entries")
        if w.shape[1] != self.num_classes:
            raise ValueError(
                f"weights have {w.shape[1]} columns but num_classes={self.num_classes}"
            )
        object.__setattr__(self, "weights", _freeze(w))
        if self.prompt_names is not None:
            object.__setattr__(
                self, "prompt_names", _check_names(self.prompt_names, w.shape[0])
            )


@dataclass(frozen=True)
class ScoreMatrix:
    """Per-item class scores; prediction is the row argmax."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError(f"scores must be a nonempty 2-D array, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("scores contain NaN or infinite entries")
        object.__setattr__(self, "data", _freeze(arr))


def one_hot(labels: LabelVector) -> np.ndarray:
    """Encode labels as an N x C float64 matrix of 0s and 1s."""
    n = labels.labels.size
    out = np.zeros((n, labels.num_classes), dtype=np.float64)
    out[np.arange(n), labels.labels] = 1.0
    return out


def _require_all_classes(labels: LabelVector) -> None:
    counts = np.bincount(labels.labels, minlength=labels.num_classes)
    missing = np.flatnonzero(counts == 0)
    if missing.size:
        raise EmptyClassError(int(missing[0]))


def _accumulate_normal(sims: np.ndarray, labels: LabelVector):
    """Return (G, B) = (L^T L, L^T Y) accumulated in float64 over row blocks.

    G is Fortran-ordered so the factorization can overwrite it in place;
    only its lower triangle is filled (dsyrk) and only that triangle is read
    downstream.
    """
    n, k = sims.shape
    gram = np.zeros((k, k), dtype=np.float64, order="F")
    rhs = np.zeros((k, labels.num_classes), dtype=np.float64, order="F")
    for start in range(0, n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, n)
        block = sims[start:stop].astype(np.float64)
        gram = dsyrk(1.0, block.T, beta=1.0, c=gram, trans=0, lower=1, overwrite_c=1)
        chunk = labels.labels[start:stop]
        for c in np.unique(chunk):
            rhs[:, c] += block[chunk == c].sum(axis=0)
    return gram, rhs


def fit(
    train_sims: SimilarityMatrix,
    labels: LabelVector,
    config: SolverConfig = SolverConfig(),
) -> MappingModel:
    """Fit the ridge mapping from similarities to one-hot class targets."""
    n, k = train_sims.data.shape
    if labels.labels.size != n:
        raise DimensionMismatchError(
            f"{n} similarity rows but {labels.labels.size} labels"
        )
    _require_all_classes(labels)
    gram, rhs = _accumulate_normal(train_sims.data, labels)
    diag = np.einsum("ii->i", gram)
    trace = float(diag.sum())
    if config.lam > 0:
        diag += config.lam
        try:
            factor = cho_factor(gram, lower=True, overwrite_a=True, check_finite=False)
        except LinAlgError as e:
            raise SingularSystemError(
                f"normal matrix is not positive definite at lam={config.lam}"
            ) from e
    else:
        try:
            factor = cho_factor(
                gram.copy(order="F"), lower=True, overwrite_a=True, check_finite=False
            )
        except LinAlgError:
            boost = config.jitter * trace / k
            if boost <= 0:
                raise SingularSystemError(
                    "normal matrix is singular at lam=0 and jitter recovery is disabled"
                ) from None
            diag += boost
            try:
                factor = cho_factor(
                    gram, lower=True, overwrite_a=True, check_finite=False
                )
            except LinAlgError as e:
                raise SingularSystemError(
                    f"normal matrix is singular at lam=0 even with diagonal "
                    f"jitter {boost:.3g}"
                ) from e
    weights = cho_solve(factor, rhs, overwrite_b=True, check_finite=False)
    return MappingModel(
        weights=np.ascontiguousarray(weights),
        lam=config.lam,
        num_classes=labels.num_classes,
        prompt_names=train_sims.prompt_names,
    )


def score(model: MappingModel, test_sims: SimilarityMatrix) -> ScoreMatrix:
    """Map test similarities through the fitted weights: scores = L_test W."""
    n, k = test_sims.data.shape
    if k != model.weights.shape[0]:
        raise DimensionMismatchError(
            f"test similarities have {k} columns, model expects "
            f"{model.weights.shape[0]}"
        )
    out = np.empty((n, model.num_classes), dtype=np.float64)
    for start in range(0, n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, n)
        out[start:stop] = test_sims.data[start:stop].astype(np.float64) @ model.weights
    return ScoreMatrix(out)


def predict(scores: ScoreMatrix) -> LabelVector:
    """Row argmax of the scores; ties break to the lowest class index."""
    return LabelVector(
        np.argmax(scores.data, axis=1), num_classes=scores.data.shape[1]
    )
