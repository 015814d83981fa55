"""CLIP backbones behind a two-method encoder interface.

Any object with ``encode_text(list[str]) -> array`` and
``encode_images(list[PIL.Image]) -> array`` works as an encoder; the
extraction functions take one by injection, so tests run without model
weights. ``ClipEncoder`` is the real thing, loading a CLIP checkpoint
through transformers with the backbone's published preprocessing.
"""

from .errors import ModelLoadFailure

BACKBONES = {
    "ViT-B/16": "openai/clip-vit-base-patch16",
    "ViT-L/14": "openai/clip-vit-large-patch14",
}


class ClipEncoder:
    """Frozen CLIP model; rows come back unnormalized, order preserved."""

    def __init__(self, backbone="ViT-B/16"):
        if backbone not in BACKBONES:
            raise ModelLoadFailure(
                f"unknown backbone {backbone!r}; choose from {sorted(BACKBONES)}"
            )
        checkpoint = BACKBONES[backbone]
        try:
            import torch
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as e:
            raise ModelLoadFailure(
                f"backbone {backbone!r} needs torch and transformers installed: {e}"
            ) from e
        try:
            self._torch = torch
            self._model = CLIPModel.from_pretrained(checkpoint)
            self._processor = CLIPProcessor.from_pretrained(checkpoint)
            self._model.eval()
        except Exception as e:
            raise ModelLoadFailure(f"cannot load {checkpoint}: {e}") from e

    def encode_text(self, texts):
        with self._torch.no_grad():
            inputs = self._processor(
                text=list(texts), return_tensors="pt", padding=True, truncation=True
            )
            return self._model.get_text_features(**inputs).cpu().numpy()

    def encode_images(self, images):
        with self._torch.no_grad():
            inputs = self._processor(images=list(images), return_tensors="pt")
            return self._model.get_image_features(**inputs).cpu().numpy()
