import numpy as np
import pytest

from embed_extract import (
    DEFAULT_TEMPLATE,
    EmptyPromptList,
    ExtractionJob,
    extract_text,
    fill_template,
)


class TestTemplate:
    def test_default_phrasing(self):
        assert fill_template(DEFAULT_TEMPLATE, "dog") == "a photo of a dog."

    def test_underscores_become_spaces(self):
        assert (
            fill_template(DEFAULT_TEMPLATE, "great_white_shark")
            == "a photo of a great white shark."
        )

    def test_literal_braces_survive(self):
        # str.format would demand a "weird" keyword here; replace must not
        assert (
            fill_template("a {} with {weird} braces", "cat")
            == "a cat with {weird} braces"
        )

    def test_job_rejects_no_placeholder(self):
        with pytest.raises(ValueError):
            ExtractionJob(backbone="ViT-B/16", source="text", template="a photo")

    def test_job_rejects_two_placeholders(self):
        with pytest.raises(ValueError):
            ExtractionJob(backbone="ViT-B/16", source="text", template="{} and {}")


class TestExtractText:
    def test_rows_named_and_normalized(self, tmp_path, encoder):
        out = tmp_path / "prompts.vfeb"
        extract_text(["ant", "bee", "fly"], out, encoder=encoder)
        vfsl = pytest.importorskip("vfsl")
        m = vfsl.read_vfeb(out)
        assert m.data.shape == (3, 32)
        assert m.names == ("ant", "bee", "fly")
        assert m.normalized
        np.testing.assert_allclose(
            np.linalg.norm(m.data.astype(np.float64), axis=1), 1.0, atol=1e-3
        )

    def test_encoder_sees_templated_sentences(self, tmp_path, encoder):
        extract_text(["tiger_shark"], tmp_path / "p.vfeb", encoder=encoder)
        assert encoder.text_batches == [["a photo of a tiger shark."]]

    def test_duplicate_prompts_equal_rows(self, tmp_path, encoder):
        out = tmp_path / "p.vfeb"
        extract_text(["same", "same"], out, encoder=encoder)
        vfsl = pytest.importorskip("vfsl")
        m = vfsl.read_vfeb(out)
        np.testing.assert_array_equal(m.data[0], m.data[1])
        cosine = float(m.data[0].astype(np.float64) @ m.data[1].astype(np.float64))
        assert abs(cosine - 1.0) < 1e-5

    def test_empty_list_rejected(self, tmp_path, encoder):
        with pytest.raises(EmptyPromptList):
            extract_text([], tmp_path / "p.vfeb", encoder=encoder)

    def test_prompt_file_input(self, tmp_path, encoder):
        listing = tmp_path / "classes.txt"
        listing.write_text("ant\n\nbee\n  fly  \n")
        out = tmp_path / "p.vfeb"
        extract_text(listing, out, encoder=encoder)
        vfsl = pytest.importorskip("vfsl")
        assert vfsl.read_vfeb(out).names == ("ant", "bee", "fly")

    def test_blank_file_rejected(self, tmp_path, encoder):
        listing = tmp_path / "classes.txt"
        listing.write_text("\n\n")
        with pytest.raises(EmptyPromptList):
            extract_text(listing, tmp_path / "p.vfeb", encoder=encoder)

    def test_batch_size_does_not_change_rows(self, tmp_path, encoder):
        prompts = [f"class_{i}" for i in range(7)]
        small = tmp_path / "small.vfeb"
        big = tmp_path / "big.vfeb"
        extract_text(prompts, small, encoder=encoder, batch_size=2)
        extract_text(prompts, big, encoder=encoder, batch_size=100)
        assert small.read_bytes() == big.read_bytes()
        assert max(len(b) for b in encoder.text_batches) == 7
        assert any(len(b) == 2 for b in encoder.text_batches)

    def test_deterministic_output(self, tmp_path, encoder):
        a = tmp_path / "a.vfeb"
        b = tmp_path / "b.vfeb"
        extract_text(["one", "two"], a, encoder=encoder)
        extract_text(["one", "two"], b, encoder=encoder)
        assert a.read_bytes() == b.read_bytes()

    def test_custom_template(self, tmp_path, encoder):
        extract_text(
            ["violin"], tmp_path / "p.vfeb", encoder=encoder,
            template="a drawing of a {}",
        )
        assert encoder.text_batches == [["a drawing of a violin"]]

    def test_bad_batch_size(self, tmp_path, encoder):
        with pytest.raises(ValueError):
            extract_text(["x"], tmp_path / "p.vfeb", encoder=encoder, batch_size=0)
