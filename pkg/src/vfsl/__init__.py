"""Vocabulary-free few-shot classification on precomputed embeddings.

The core workflow: compute similarities between normalized image features
and a bank of generic prompt embeddings, fit a ridge-regularized linear
mapping from those similarities to one-hot class targets, and classify by
the row argmax of the mapped scores. Baseline mappings (nearest centroid,
one-to-one frequency assignment, Bayesian assignment), a seeded evaluation
harness, and weight-ranking interpretability live alongside.
"""

from .baselines import (
    BAYESIAN,
    ONE_TO_ONE,
    AssignmentModel,
    CentroidModel,
    assignment_scores,
    centroid_scores,
    fit_blm,
    fit_centroids,
    fit_flm,
)
from .errors import (
    BadMagicError,
    DimensionMismatchError,
    EmptyClassError,
    EmptyMatrixError,
    InsufficientPromptsError,
    IoFailureError,
    NameCountMismatchError,
    NonFiniteEntryError,
    NotEnoughItemsError,
    NotNormalizedError,
    ParseFailureError,
    RaggedRowsError,
    SingularSystemError,
    TruncatedPayloadError,
    UnsupportedVersionError,
    VfslError,
    ZeroNormRowError,
)
from .harness import (
    EvalReport,
    SyntheticSpec,
    TaskSpec,
    emit_report,
    evaluate,
    generate_synthetic,
    sample_shots,
)
from .interpret import ClassExplanation, ExplanationEntry, explain, render_explanations
from .matrixio import (
    EmbeddingMatrix,
    LabelVector,
    ShotSet,
    read_csv,
    read_labels,
    read_vfeb,
    take_rows,
    write_csv,
    write_labels,
    write_vfeb,
)
from .modelio import load_model, matrix_digest, save_model
from .rng import Xoshiro256
from .sim_mapper import (
    MappingModel,
    ScoreMatrix,
    SolverConfig,
    fit,
    one_hot,
    predict,
    score,
)
from .similarity import SimilarityMatrix, l2_normalize, similarity_matrix

__version__ = "0.1.0"

__all__ = [
    "BAYESIAN",
    "ONE_TO_ONE",
    "AssignmentModel",
    "BadMagicError",
    "CentroidModel",
    "ClassExplanation",
    "DimensionMismatchError",
    "EmbeddingMatrix",
    "EmptyClassError",
    "EmptyMatrixError",
    "EvalReport",
    "ExplanationEntry",
    "InsufficientPromptsError",
    "IoFailureError",
    "LabelVector",
    "MappingModel",
    "NameCountMismatchError",
    "NonFiniteEntryError",
    "NotEnoughItemsError",
    "NotNormalizedError",
    "ParseFailureError",
    "RaggedRowsError",
    "ScoreMatrix",
    "ShotSet",
    "SimilarityMatrix",
    "SingularSystemError",
    "SolverConfig",
    "SyntheticSpec",
    "TaskSpec",
    "TruncatedPayloadError",
    "UnsupportedVersionError",
    "VfslError",
    "Xoshiro256",
    "ZeroNormRowError",
    "assignment_scores",
    "centroid_scores",
    "emit_report",
    "evaluate",
    "explain",
    "fit",
    "fit_blm",
    "fit_centroids",
    "fit_flm",
    "generate_synthetic",
    "l2_normalize",
    "load_model",
    "matrix_digest",
    "one_hot",
    "predict",
    "read_csv",
    "read_labels",
    "read_vfeb",
    "render_explanations",
    "sample_shots",
    "save_model",
    "score",
    "similarity_matrix",
    "take_rows",
    "write_csv",
    "write_labels",
    "write_vfeb",
]
