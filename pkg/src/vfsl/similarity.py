"""L2 normalization and similarity matrices.

A similarity matrix holds the dot products between unit-normalized image
features (rows) and a bank of unit-normalized prompt embeddings (columns).
With both sides on the unit sphere every entry is a cosine similarity and
lies in [-1, 1] up to float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyMatrixError,
    NonFiniteEntryError,
    NotNormalizedError,
    ZeroNormRowError,
)
from .matrixio import EmbeddingMatrix, _check_names, _freeze

# row-block size for the product; bounds the float64 working set
_BLOCK_ROWS = 4096


@dataclass(frozen=True)
class SimilarityMatrix:
    """N x K dot products of image features against a prompt bank."""

    data: np.ndarray
    image_names: tuple[str, ...] | None = None
    prompt_names: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise EmptyMatrixError(f"similarity matrix of shape {arr.shape} is empty")
        if not np.isfinite(arr).all():
            raise NonFiniteEntryError("similarity matrix contains NaN or infinite entries")
        object.__setattr__(self, "data", _freeze(arr))
        if self.image_names is not None:
            object.__setattr__(
                self, "image_names", _check_names(self.image_names, arr.shape[0])
            )
        if self.prompt_names is not None:
            object.__setattr__(
                self, "prompt_names", _check_names(self.prompt_names, arr.shape[1])
            )


def l2_normalize(m: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit L2 norm.

    Norms are computed in float64 before rounding back to storage precision,
    so output rows are unit within 1e-6. Rows with norm below 1e-12 cannot be
    meaningfully normalized and are rejected.
    """
    wide = m.data.astype(np.float64)
    norms = np.linalg.norm(wide, axis=1)
    bad = np.flatnonzero(norms < 1e-12)
    if bad.size:
        raise ZeroNormRowError(int(bad[0]))
    out = (wide / norms[:, None]).astype(np.float32)
    return EmbeddingMatrix(out, names=m.names, normalized=True)


def similarity_matrix(images: EmbeddingMatrix, prompts: EmbeddingMatrix) -> SimilarityMatrix:
    """Dot products of every image row against every prompt row.

    Both inputs must carry the normalized flag; unflagged data is rejected
    rather than silently normalized, so provenance stays explicit.
    Accumulation runs in float64 over row blocks and the result is stored
    as float32.
    """
    if images.data.shape[1] != prompts.data.shape[1]:
        raise DimensionMismatchError(
            f"images have {images.data.shape[1]} columns, "
            f"prompts have {prompts.data.shape[1]}"
        )
    if not images.normalized:
        raise NotNormalizedError("image matrix is not flagged normalized")
    if not prompts.normalized:
        raise NotNormalizedError("prompt matrix is not flagged normalized")
    n = images.data.shape[0]
    bank = prompts.data.astype(np.float64).T
    out = np.empty((n, prompts.data.shape[0]), dtype=np.float32)
    for start in range(0, n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, n)
        block = images.data[start:stop].astype(np.float64)
        out[start:stop] = (block @ bank).astype(np.float32)
    return SimilarityMatrix(out, image_names=images.names, prompt_names=prompts.names)
