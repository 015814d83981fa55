import pytest

from embed_extract import BACKBONES, ClipEncoder, ModelLoadFailure


def test_known_backbones():
    assert set(BACKBONES) == {"ViT-B/16", "ViT-L/14"}


def test_unknown_backbone_rejected():
    with pytest.raises(ModelLoadFailure):
        ClipEncoder("ResNet-50")


def test_unloadable_checkpoint_reported(monkeypatch):
    # force-fail the checkpoint fetch so this runs the same with or
    # without network access and cached weights
    monkeypatch.setenv("HF_HUB_OFFLINE", "1")
    monkeypatch.setenv("TRANSFORMERS_OFFLINE", "1")
    monkeypatch.setenv("HF_HOME", "/nonexistent")
    with pytest.raises(ModelLoadFailure):
        ClipEncoder("ViT-B/16")
