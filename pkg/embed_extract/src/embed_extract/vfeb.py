"""Writer for the VFEB embedding-matrix wire format.

Layout, all little-endian: magic ``VFEB``, u16 version (1), u16 flags
(bit 0 set when every row is unit-normalized), u64 rows, u64 cols, the
row-major float32 payload, then a u32 byte length followed by the row
names joined with newlines (length 0 when the matrix is unnamed). This
is a from-scratch implementation of the published layout; it shares no
code with the consumer side.
"""

import struct

import numpy as np

_MAGIC = b"VFEB"
_VERSION = 1
_FLAG_NORMALIZED = 1
_HEADER = struct.Struct("<4sHHQQ")


def write_vfeb(path, data, names=None, normalized=False):
    data = np.ascontiguousarray(data, dtype="<f4")
    if data.ndim != 2:
        raise ValueError(f"need a 2-D matrix, got shape {data.shape}")
    rows, cols = data.shape
    if rows == 0 or cols == 0:
        raise ValueError("refusing to write an empty matrix")
    if not np.isfinite(data).all():
        raise ValueError("matrix contains non-finite entries")
    name_block = b""
    if names is not None:
        names = [str(n) for n in names]
        if len(names) != rows:
            raise ValueError(f"{len(names)} names for {rows} rows")
        for n in names:
            if not n or "\n" in n:
                raise ValueError(f"row name {n!r} is empty or contains a newline")
        name_block = "\n".join(names).encode("utf-8")
    flags = _FLAG_NORMALIZED if normalized else 0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, flags, rows, cols))
        fh.write(data.tobytes(order="C"))
        fh.write(struct.pack("<I", len(name_block)))
        fh.write(name_block)


def write_labels(path, labels):
    """One integer per line, index-aligned with the matrix rows."""
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size == 0:
        raise ValueError("labels must be a nonempty 1-D sequence")
    if labels.min() < 0:
        raise ValueError("labels must be nonnegative")
    with open(path, "w", encoding="utf-8") as fh:
        for value in labels:
            fh.write(f"{int(value)}\n")
