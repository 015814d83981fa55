import hashlib

import numpy as np
import pytest
from PIL import Image


class FakeEncoder:
    """Deterministic stand-in: features are seeded by the input bytes.

    Records every batch it receives so tests can assert on templating
    and batching behavior without real model weights.
    """

    def __init__(self, dim=32):
        self.dim = dim
        self.text_batches = []
        self.image_batches = []

    def _vector(self, payload):
        seed = int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")
        return np.random.default_rng(seed).standard_normal(self.dim)

    def encode_text(self, texts):
        texts = list(texts)
        self.text_batches.append(texts)
        return np.stack([self._vector(t.encode("utf-8")) for t in texts])

    def encode_images(self, images):
        images = list(images)
        self.image_batches.append(images)
        return np.stack(
            [self._vector(bytes(im.size) + im.tobytes()) for im in images]
        )


@pytest.fixture
def encoder():
    return FakeEncoder()


def make_image(path, color, size=(6, 4)):
    Image.new("RGB", size, color=color).save(path)


@pytest.fixture
def image_tree(tmp_path):
    """Two classes, three images, plus clutter that must be ignored."""
    root = tmp_path / "data"
    (root / "ant").mkdir(parents=True)
    (root / "bee").mkdir()
    (root / "empty_class").mkdir()
    make_image(root / "ant" / "b.png", (200, 10, 10))
    make_image(root / "ant" / "a.png", (10, 200, 10))
    make_image(root / "bee" / "only.png", (10, 10, 200))
    (root / "ant" / "notes.txt").write_text("not an image")
    (root / "ant" / ".hidden.png").write_bytes(b"junk")
    (root / "stray.png").write_bytes(b"toplevel files are ignored")
    return root
