"""Image and text-prompt embedding extraction to VFEB files.

Companion to the vfsl classification package: this side produces the
normalized embedding matrices (CLIP backbones via transformers, or any
injected encoder), that side consumes them. The only coupling is the
VFEB byte layout.
"""

from .encoders import BACKBONES, ClipEncoder
from .errors import (
    DecodeFailure,
    EmptyPromptList,
    ExtractError,
    ModelLoadFailure,
    NoImagesFound,
)
from .extract import (
    DEFAULT_TEMPLATE,
    ExtractionJob,
    extract_images,
    extract_text,
    fill_template,
)
from .vfeb import write_labels, write_vfeb

__version__ = "0.1.0"

__all__ = [
    "BACKBONES",
    "DEFAULT_TEMPLATE",
    "ClipEncoder",
    "DecodeFailure",
    "EmptyPromptList",
    "ExtractError",
    "ExtractionJob",
    "ModelLoadFailure",
    "NoImagesFound",
    "extract_images",
    "extract_text",
    "fill_template",
    "write_labels",
    "write_vfeb",
]
