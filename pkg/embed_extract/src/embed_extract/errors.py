"""Failure kinds raised by the extraction pipeline."""


class ExtractError(Exception):
    """Base class for every error this package raises deliberately."""


class ModelLoadFailure(ExtractError):
    """The requested backbone could not be constructed or loaded."""


class EmptyPromptList(ExtractError):
    """A text extraction was asked to encode zero prompts."""


class NoImagesFound(ExtractError):
    """An image folder contained no decodable class images at all."""


class DecodeFailure(ExtractError):
    """A file that looks like an image could not be decoded."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
