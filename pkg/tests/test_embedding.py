"""
Unit tests for embedding file ingestion.

Run with: pytest tests/test_embedding.py -v
"""

import numpy as np
import pytest


class TestLoadEmbedding:
    """Tests for load_embedding and save_embedding."""

    def test_well_formed(self, tmp_path, rng):
        """A 256-float file loads with 256 dims and float32 precision."""
        from periocular_eval.features import load_embedding, save_embedding

        values = rng.normal(size=256)
        vector = load_embedding(save_embedding(values, tmp_path / "s1.emb"))
        assert vector.dims == 256
        assert vector.extractor_id == "deep-256"
        np.testing.assert_array_equal(vector.values, values.astype(np.float32).astype(np.float64))

    def test_layout(self, tmp_path):
        """Header is magic, version byte, little-endian uint32 dimension."""
        from periocular_eval.features import save_embedding

        data = save_embedding(np.ones(256), tmp_path / "a.emb").read_bytes()
        assert data[:4] == b"PEMB"
        assert data[4] == 1
        assert int.from_bytes(data[5:9], "little") == 256
        assert len(data) == 9 + 256 * 4

    def test_bad_magic(self, tmp_path):
        """A corrupted magic is a format error."""
        from periocular_eval.features import BadMagicError, EmbeddingFormatError, load_embedding, save_embedding

        path = save_embedding(np.ones(256), tmp_path / "a.emb")
        data = bytearray(path.read_bytes())
        data[0:4] = b"XXXX"
        path.write_bytes(bytes(data))
        with pytest.raises(BadMagicError) as info:
            load_embedding(path)
        assert isinstance(info.value, EmbeddingFormatError)
        assert info.value.path == path

    def test_truncated(self, tmp_path):
        """A payload shorter than the declared dimension is rejected."""
        from periocular_eval.features import DimensionMismatchError, load_embedding, save_embedding

        path = save_embedding(np.ones(256), tmp_path / "a.emb")
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(DimensionMismatchError):
            load_embedding(path)

    def test_wrong_dimension(self, tmp_path):
        """A 128-d file fails when 256 dims are expected."""
        from periocular_eval.features import DimensionMismatchError, load_embedding, save_embedding

        path = save_embedding(np.ones(128), tmp_path / "a.emb")
        with pytest.raises(DimensionMismatchError):
            load_embedding(path)
        assert load_embedding(path, expected_dim=128).dims == 128

    def test_zero_vector(self, tmp_path):
        """An all-zero embedding is rejected."""
        from periocular_eval.features import ZeroNormError, load_embedding, save_embedding

        with pytest.raises(ZeroNormError):
            load_embedding(save_embedding(np.zeros(256), tmp_path / "z.emb"))

    def test_non_finite(self, tmp_path):
        """NaN values are rejected."""
        from periocular_eval.features import NonFiniteValueError, load_embedding, save_embedding

        values = np.ones(256)
        values[3] = np.nan
        with pytest.raises(NonFiniteValueError):
            load_embedding(save_embedding(values, tmp_path / "n.emb"))

    def test_too_short_for_header(self, tmp_path):
        """A file shorter than the header is a format error."""
        from periocular_eval.features import EmbeddingFormatError, load_embedding

        path = tmp_path / "short.emb"
        path.write_bytes(b"PE")
        with pytest.raises(EmbeddingFormatError):
            load_embedding(path)
