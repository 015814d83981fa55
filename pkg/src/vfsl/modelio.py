"""Model serialization: one VFEB file plus a JSON sidecar.

The matrix payload goes to ``path`` in the standard embedding format
(weights rounded to storage precision) and the sidecar goes to the same
path with a ``.json`` suffix, carrying the model kind and its fitting
provenance. A one-to-one assignment stores its mapping as a C x 1 column of
exact small integers.
"""

from __future__ import annotations

import hashlib
import json
import struct
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .baselines import BAYESIAN, ONE_TO_ONE, AssignmentModel, CentroidModel
from .errors import IoFailureError, ParseFailureError, UnsupportedVersionError
from .matrixio import EmbeddingMatrix, read_vfeb, write_vfeb
from .sim_mapper import MappingModel

_FORMAT = "vfsl-model"
_SIDECAR_VERSION = 1


def matrix_digest(m: EmbeddingMatrix) -> str:
    """sha256 over the shape and row-major float32 bytes, as "sha256:<hex>"."""
    digest = hashlib.sha256(struct.pack("<QQ", *m.data.shape))
    digest.update(m.data.astype("<f4", copy=False).tobytes(order="C"))
    return f"sha256:{digest.hexdigest()}"


def _sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def _write_sidecar(path, body: dict) -> None:
    body = {
        "format": _FORMAT,
        "version": _SIDECAR_VERSION,
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        **body,
    }
    try:
        _sidecar_path(path).write_text(
            json.dumps(body, indent=2) + "\n", encoding="utf-8"
        )
    except OSError as e:
        raise IoFailureError(f"cannot write {_sidecar_path(path)}: {e.strerror or e}") from e


def save_model(model, path, prompt_bank_digest: str | None = None) -> None:
    """Serialize a fitted model of any kind."""
    if isinstance(model, MappingModel):
        write_vfeb(
            EmbeddingMatrix(model.weights.astype(np.float32), names=model.prompt_names),
            path,
        )
        _write_sidecar(
            path,
            {
                "kind": "sim",
                "num_prompts": model.weights.shape[0],
                "num_classes": model.num_classes,
                "lambda": model.lam,
                "prompt_bank_digest": prompt_bank_digest,
            },
        )
    elif isinstance(model, AssignmentModel):
        if model.kind == ONE_TO_ONE:
            payload = model.mapping.astype(np.float32)[:, None]
        else:
            payload = model.weights.astype(np.float32)
        write_vfeb(EmbeddingMatrix(payload), path)
        _write_sidecar(
            path,
            {
                "kind": model.kind,
                "num_prompts": model.num_prompts,
                "num_classes": model.num_classes,
                "prompt_bank_digest": prompt_bank_digest,
            },
        )
    elif isinstance(model, CentroidModel):
        write_vfeb(model.centroids, path)
        _write_sidecar(
            path,
            {
                "kind": "centroids",
                "num_classes": model.centroids.data.shape[0],
                "dim": model.centroids.data.shape[1],
            },
        )
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")


def load_model(path):
    """Load a model saved by save_model; the sidecar decides the kind."""
    sidecar = _sidecar_path(path)
    try:
        text = sidecar.read_text(encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"cannot read {sidecar}: {e.strerror or e}") from e
    try:
        meta = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseFailureError(f"{sidecar}: invalid JSON: {e}") from e
    if not isinstance(meta, dict) or meta.get("format") != _FORMAT:
        raise ParseFailureError(f"{sidecar}: not a {_FORMAT} sidecar")
    if meta.get("version") != _SIDECAR_VERSION:
        raise UnsupportedVersionError(
            f"{sidecar}: sidecar version {meta.get('version')}, "
            f"expected {_SIDECAR_VERSION}"
        )
    matrix = read_vfeb(path)
    kind = meta.get("kind")
    try:
        return _reconstruct(kind, matrix, meta)
    except KeyError as e:
        raise ParseFailureError(f"{sidecar}: missing field {e}") from e


def _reconstruct(kind, matrix, meta):
    if kind == "sim":
        return MappingModel(
            weights=matrix.data.astype(np.float64),
            lam=float(meta["lambda"]),
            num_classes=int(meta["num_classes"]),
            prompt_names=matrix.names,
        )
    if kind == ONE_TO_ONE:
        return AssignmentModel(
            kind=ONE_TO_ONE,
            num_prompts=int(meta["num_prompts"]),
            mapping=matrix.data[:, 0].astype(np.int64),
        )
    if kind == BAYESIAN:
        return AssignmentModel(
            kind=BAYESIAN,
            num_prompts=int(meta["num_prompts"]),
            weights=matrix.data.astype(np.float64),
        )
    if kind == "centroids":
        return CentroidModel(centroids=matrix)
    raise ParseFailureError(f"unknown model kind {kind!r}")
