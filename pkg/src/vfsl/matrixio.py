"""Dense-matrix value types and file formats.

Matrices are stored on disk as 32-bit floats; compute-heavy callers widen to
float64 internally. The binary format (VFEB) is little-endian on every
platform:

    bytes 0..3    magic "VFEB"
    bytes 4..5    version, u16, currently 1
    bytes 6..7    flags, u16, bit 0 set when rows are L2-normalized
    bytes 8..15   rows, u64
    bytes 16..23  cols, u64
    then          rows*cols float32 values, row-major
    then          name-block byte length, u32 (0 when there are no names)
    then          UTF-8 names, one line per row, separated by "\\n",
                  no trailing newline

Round-tripping a matrix through write_vfeb/read_vfeb is bit-exact, name block
included. To keep that guarantee unconditional, names must be nonempty and
newline-free (an all-empty name block would be indistinguishable from "no
names").
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    EmptyMatrixError,
    IoFailureError,
    NameCountMismatchError,
    NonFiniteEntryError,
    NotNormalizedError,
    ParseFailureError,
    RaggedRowsError,
    TruncatedPayloadError,
    UnsupportedVersionError,
)

_MAGIC = b"VFEB"
_VERSION = 1
_FLAG_NORMALIZED = 0x0001
_HEADER = struct.Struct("<4sHHQQ")

# rows flagged normalized may have been rounded to float32 on disk
_NORM_TOL = 1e-3


def _check_names(names, rows: int) -> tuple[str, ...]:
    names = tuple(names)
    if len(names) != rows:
        raise NameCountMismatchError(f"{len(names)} names for {rows} rows")
    for i, name in enumerate(names):
        if not isinstance(name, str):
            raise ValueError(f"name {i} is not a string")
        if name == "" or "\n" in name:
            raise NameCountMismatchError(
                f"name {i} is empty or contains a newline; the name block "
                "stores one nonempty line per row"
            )
    return names


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Rows of d-dimensional float32 vectors with optional row names.

    ``normalized`` records provenance: it is set only by loaders reading a
    flagged file or by :func:`vfsl.similarity.l2_normalize`. When set, every
    row must have unit L2 norm within 1e-3.
    """

    data: np.ndarray
    names: tuple[str, ...] | None = None
    normalized: bool = False

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise EmptyMatrixError(f"matrix of shape {arr.shape} is empty")
        if not np.isfinite(arr).all():
            raise NonFiniteEntryError("matrix contains NaN or infinite entries")
        if self.normalized:
            norms = np.linalg.norm(arr.astype(np.float64), axis=1)
            bad = np.flatnonzero(np.abs(norms - 1.0) > _NORM_TOL)
            if bad.size:
                raise NotNormalizedError(
                    f"row {bad[0]} has norm {norms[bad[0]]:.6g} but the "
                    "normalized flag is set"
                )
        object.__setattr__(self, "data", _freeze(arr))
        if self.names is not None:
            object.__setattr__(self, "names", _check_names(self.names, arr.shape[0]))


@dataclass(frozen=True)
class LabelVector:
    """Integer class labels in [0, num_classes)."""

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        arr = np.ascontiguousarray(self.labels, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError(f"labels must be 1-D, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("labels are empty")
        if self.num_classes < 1:
            raise ValueError(f"num_classes must be positive, got {self.num_classes}")
        if arr.min() < 0 or arr.max() >= self.num_classes:
            raise ValueError(
                f"labels must lie in [0, {self.num_classes}), "
                f"got range [{arr.min()}, {arr.max()}]"
            )
        object.__setattr__(self, "labels", _freeze(arr))


@dataclass(frozen=True)
class ShotSet:
    """A balanced few-shot support set.

    ``indices`` point at rows of some feature matrix; each class carries
    exactly ``shots_per_class`` of them.
    """

    indices: np.ndarray
    labels: LabelVector
    shots_per_class: int

    def __post_init__(self):
        idx = np.ascontiguousarray(self.indices, dtype=np.int64)
        if idx.ndim != 1:
            raise ValueError("indices must be 1-D")
        if idx.size != self.labels.labels.size:
            raise ValueError(
                f"{idx.size} indices for {self.labels.labels.size} labels"
            )
        if np.unique(idx).size != idx.size:
            raise ValueError("indices contain duplicates")
        counts = np.bincount(self.labels.labels, minlength=self.labels.num_classes)
        if not (counts == self.shots_per_class).all():
            raise ValueError(
                f"support set is not balanced: per-class counts {counts.tolist()} "
                f"with shots_per_class={self.shots_per_class}"
            )
        object.__setattr__(self, "indices", _freeze(idx))


def take_rows(m: EmbeddingMatrix, indices: np.ndarray) -> EmbeddingMatrix:
    """Select rows of an EmbeddingMatrix, keeping names and the normalized flag."""
    idx = np.asarray(indices, dtype=np.int64)
    names = None if m.names is None else tuple(m.names[i] for i in idx)
    return EmbeddingMatrix(
        np.ascontiguousarray(m.data[idx]), names=names, normalized=m.normalized
    )


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise IoFailureError(f"cannot read {path}: {e.strerror or e}") from e


def _write_bytes(path, payload: bytes) -> None:
    try:
        Path(path).write_bytes(payload)
    except OSError as e:
        raise IoFailureError(f"cannot write {path}: {e.strerror or e}") from e


def read_vfeb(path) -> EmbeddingMatrix:
    """Load an embedding matrix from a VFEB file."""
    raw = _read_bytes(path)
    if len(raw) < 4:
        raise TruncatedPayloadError(f"{path}: file too short for a VFEB header")
    if raw[:4] != _MAGIC:
        raise BadMagicError(f"{path}: not a VFEB file (magic {raw[:4]!r})")
    if len(raw) < _HEADER.size:
        raise TruncatedPayloadError(f"{path}: header cut short at {len(raw)} bytes")
    _, version, flags, rows, cols = _HEADER.unpack_from(raw)
    if version != _VERSION:
        raise UnsupportedVersionError(f"{path}: version {version}, expected {_VERSION}")
    if flags & ~_FLAG_NORMALIZED:
        raise UnsupportedVersionError(f"{path}: unknown flag bits 0x{flags:04x}")
    if rows == 0 or cols == 0:
        raise EmptyMatrixError(f"{path}: declares a {rows}x{cols} matrix")
    payload_end = _HEADER.size + rows * cols * 4
    if len(raw) < payload_end + 4:
        raise TruncatedPayloadError(
            f"{path}: {rows}x{cols} needs {payload_end + 4} bytes, file has {len(raw)}"
        )
    data = np.frombuffer(raw, dtype="<f4", count=rows * cols, offset=_HEADER.size)
    data = data.reshape(rows, cols)
    (name_len,) = struct.unpack_from("<I", raw, payload_end)
    end = payload_end + 4 + name_len
    if len(raw) < end:
        raise TruncatedPayloadError(f"{path}: name block cut short")
    if len(raw) > end:
        raise ParseFailureError(f"{path}: {len(raw) - end} trailing bytes after name block")
    names = None
    if name_len:
        try:
            text = raw[payload_end + 4 : end].decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseFailureError(f"{path}: name block is not valid UTF-8: {e}") from e
        names = text.split("\n")
        if len(names) != rows:
            raise NameCountMismatchError(
                f"{path}: name block has {len(names)} lines for {rows} rows"
            )
    return EmbeddingMatrix(data, names=names, normalized=bool(flags & _FLAG_NORMALIZED))


def write_vfeb(m: EmbeddingMatrix, path) -> None:
    """Write an embedding matrix as a VFEB file (bit-exact round trip)."""
    rows, cols = m.data.shape
    flags = _FLAG_NORMALIZED if m.normalized else 0
    name_block = b"" if m.names is None else "\n".join(m.names).encode("utf-8")
    payload = b"".join(
        (
            _HEADER.pack(_MAGIC, _VERSION, flags, rows, cols),
            m.data.astype("<f4", copy=False).tobytes(order="C"),
            struct.pack("<I", len(name_block)),
            name_block,
        )
    )
    _write_bytes(path, payload)


def read_csv(path, has_header: bool = False) -> EmbeddingMatrix:
    """Load a numeric CSV.

    With ``has_header``, the first row is a header; when its first cell is
    "name", the first column holds row names.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise IoFailureError(f"cannot read {path}: {e.strerror or e}") from e
    except UnicodeDecodeError as e:
        raise ParseFailureError(f"{path}: not valid UTF-8: {e}") from e

    has_names = False
    if has_header:
        if not rows:
            raise EmptyMatrixError(f"{path}: no header row")
        has_names = bool(rows[0]) and rows[0][0].strip().lower() == "name"
        rows = rows[1:]
    rows = [r for r in rows if r]
    if not rows:
        raise EmptyMatrixError(f"{path}: no data rows")

    width = len(rows[0])
    names = [] if has_names else None
    values = np.empty((len(rows), width - (1 if has_names else 0)), dtype=np.float32)
    if values.shape[1] == 0:
        raise EmptyMatrixError(f"{path}: rows have no numeric columns")
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRowsError(
                f"{path}: row {i} has {len(row)} fields, expected {width}"
            )
        cells = row
        if has_names:
            names.append(cells[0])
            cells = cells[1:]
        for j, cell in enumerate(cells):
            try:
                values[i, j] = float(cell)
            except ValueError as e:
                raise ParseFailureError(
                    f"{path}: row {i}, column {j}: {cell!r} is not a number"
                ) from e
    return EmbeddingMatrix(values, names=None if names is None else tuple(names))


def write_csv(m: EmbeddingMatrix, path) -> None:
    """Write a matrix as CSV with a header row.

    Cells carry full float precision (shortest round-tripping decimal), so
    CSV -> VFEB conversion reproduces the same float32 values. The
    normalized flag is not representable in CSV and is dropped.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = [f"c{j}" for j in range(m.data.shape[1])]
    if m.names is not None:
        writer.writerow(["name", *cols])
        for name, row in zip(m.names, m.data):
            writer.writerow([name, *(repr(float(v)) for v in row)])
    else:
        writer.writerow(cols)
        for row in m.data:
            writer.writerow([repr(float(v)) for v in row])
    try:
        Path(path).write_text(buf.getvalue(), encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"cannot write {path}: {e.strerror or e}") from e


def read_labels(path) -> LabelVector:
    """Read a labels file: one nonnegative integer per line, blank lines ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"cannot read {path}: {e.strerror or e}") from e
    except UnicodeDecodeError as e:
        raise ParseFailureError(f"{path}: not valid UTF-8: {e}") from e
    labels = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            value = int(line)
        except ValueError as e:
            raise ParseFailureError(
                f"{path}: line {lineno}: {line!r} is not an integer"
            ) from e
        if value < 0:
            raise ParseFailureError(f"{path}: line {lineno}: negative label {value}")
        labels.append(value)
    if not labels:
        raise ParseFailureError(f"{path}: no labels found")
    arr = np.asarray(labels, dtype=np.int64)
    return LabelVector(arr, num_classes=int(arr.max()) + 1)


def write_labels(labels: LabelVector, path) -> None:
    """Write labels as one integer per line."""
    text = "\n".join(str(int(v)) for v in labels.labels) + "\n"
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"cannot write {path}: {e.strerror or e}") from e
