"""Turn prompt lists and class-folder image trees into VFEB files.

Both extractions run the same way: collect inputs in a deterministic
order, encode them in fixed-size batches (row order never depends on the
batch size), L2-normalize in float64, and write float32 rows with the
normalized flag set. Prompts pass through a single-placeholder template,
with underscores in the incoming names replaced by spaces first, so a
class list like ``great_white_shark`` reads naturally in the prompt.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .encoders import ClipEncoder
from .errors import DecodeFailure, EmptyPromptList, NoImagesFound
from .vfeb import write_labels, write_vfeb

DEFAULT_TEMPLATE = "a photo of a {}."

_IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".gif", ".webp"}


@dataclass(frozen=True)
class ExtractionJob:
    """A validated extraction request: what to encode and how to phrase it."""

    backbone: str
    source: str
    template: str = DEFAULT_TEMPLATE

    def __post_init__(self):
        if self.template.count("{}") != 1:
            raise ValueError(
                f"template {self.template!r} must contain exactly one {{}} placeholder"
            )


def fill_template(template, name):
    # plain replace, not str.format, so literal braces elsewhere survive
    return template.replace("{}", str(name).replace("_", " "))


def _encode_batched(encode, items, batch_size):
    if batch_size < 1:
        raise ValueError(f"batch_size must be positive, got {batch_size}")
    chunks = [
        np.asarray(encode(items[i : i + batch_size]), dtype=np.float64)
        for i in range(0, len(items), batch_size)
    ]
    return np.vstack(chunks)


def _unit_rows(features):
    norms = np.linalg.norm(features, axis=1, keepdims=True)
    if (norms < 1e-12).any():
        raise ValueError("encoder produced a zero-norm feature row")
    return (features / norms).astype(np.float32)


def _load_prompts(prompts):
    if isinstance(prompts, (str, Path)):
        lines = Path(prompts).read_text(encoding="utf-8").splitlines()
        return [line.strip() for line in lines if line.strip()]
    return [str(p) for p in prompts]


def extract_text(
    prompts,
    out_path,
    *,
    backbone="ViT-B/16",
    template=DEFAULT_TEMPLATE,
    encoder=None,
    batch_size=64,
):
    """Encode one templated prompt per input string into a VFEB file.

    ``prompts`` is a sequence of strings or the path of a one-per-line
    text file. Row names in the output are the original untemplated
    strings, so downstream weight rankings read as class names.
    """
    names = _load_prompts(prompts)
    job = ExtractionJob(backbone=backbone, source="text", template=template)
    if not names:
        raise EmptyPromptList("no prompts to encode")
    if encoder is None:
        encoder = ClipEncoder(job.backbone)
    sentences = [fill_template(job.template, n) for n in names]
    features = _encode_batched(encoder.encode_text, sentences, batch_size)
    write_vfeb(out_path, _unit_rows(features), names=names, normalized=True)
    return Path(out_path)


def _scan_class_folders(root):
    root = Path(root)
    classes = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        files = sorted(
            f
            for f in sub.iterdir()
            if f.is_file()
            and not f.name.startswith(".")
            and f.suffix.lower() in _IMAGE_SUFFIXES
        )
        if files:
            classes.append((sub.name, files))
    return classes


def extract_images(
    image_folder,
    out_matrix,
    out_labels,
    *,
    backbone="ViT-B/16",
    encoder=None,
    batch_size=64,
):
    """Encode a class-per-subdirectory image tree into VFEB plus labels.

    Subdirectories are numbered in lexicographic order (directories with
    no image files are skipped entirely), files within each are taken in
    name order, and the labels file is index-aligned with the matrix
    rows. Row names are the paths relative to ``image_folder``.
    """
    classes = _scan_class_folders(image_folder)
    if not classes:
        raise NoImagesFound(f"{image_folder} holds no class folders with images")
    if encoder is None:
        encoder = ClipEncoder(backbone)
    images, labels, names = [], [], []
    for class_index, (class_name, files) in enumerate(classes):
        for path in files:
            try:
                with Image.open(path) as img:
                    images.append(img.convert("RGB"))
            except (OSError, ValueError) as e:
                raise DecodeFailure(path, str(e)) from e
            labels.append(class_index)
            names.append(f"{class_name}/{path.name}")
    features = _encode_batched(encoder.encode_images, images, batch_size)
    write_vfeb(out_matrix, _unit_rows(features), names=names, normalized=True)
    write_labels(out_labels, labels)
    return Path(out_matrix), Path(out_labels)
