import numpy as np
import pytest

from runa.concept_bank import DEFAULT_TEMPLATE, ConceptBank, build_bank, load_bank, save_bank
from runa.errors import BadTemplate, DimMismatch, DuplicateLabel, FormatError
from runa.interchange import write_embeddings
from runa.toy_encoder import ToyEncoderConfig, ToyTextEncoder


@pytest.fixture
def text_encoder():
    return ToyTextEncoder(ToyEncoderConfig(dim=32, seed=11))


def test_build_bank_default_template(text_encoder):
    bank = build_bank(["dog"], text_encoder)
    assert bank.prompts == ("a photo of a dog",)
    assert bank.labels == ("dog",)
    assert abs(np.linalg.norm(bank.vectors[0]) - 1.0) < 1e-12


def test_build_bank_duplicate_label(text_encoder):
    with pytest.raises(DuplicateLabel):
        build_bank(["car", "car"], text_encoder)


def test_build_bank_two_placeholders(text_encoder):
    with pytest.raises(BadTemplate):
        build_bank(["car"], text_encoder, template="photo: {label} of {label}")


def test_build_bank_missing_placeholder(text_encoder):
    with pytest.raises(BadTemplate):
        build_bank(["car"], text_encoder, template="no placeholder here")


def test_build_bank_order_preserved(text_encoder):
    labels = ["truck", "ant", "mouse"]
    bank = build_bank(labels, text_encoder)
    assert bank.labels == tuple(labels)
    for i, label in enumerate(labels):
        expect = text_encoder.encode(DEFAULT_TEMPLATE.replace("{label}", label))
        assert np.allclose(bank.vectors[i], expect)


def test_bank_round_trip(tmp_path, text_encoder):
    bank = build_bank(["dog", "cat", "bus"], text_encoder)
    save_bank(bank, tmp_path / "bank.tsv")
    loaded = load_bank(tmp_path / "bank.tsv")
    assert loaded.labels == bank.labels
    assert loaded.prompts == bank.prompts
    # float32 storage: vectors equal within single-precision rounding
    assert np.allclose(loaded.vectors, bank.vectors, atol=1e-6)
    norms = np.linalg.norm(loaded.vectors, axis=1)
    assert np.all(np.abs(norms - 1.0) < 1e-12)


def test_bank_order_survives_round_trip(tmp_path, text_encoder):
    labels = [f"label{i}" for i in range(10)]
    bank = build_bank(labels, text_encoder)
    save_bank(bank, tmp_path / "bank.tsv")
    assert load_bank(tmp_path / "bank.tsv").labels == tuple(labels)


def test_load_bank_mixed_dims(tmp_path):
    write_embeddings(
        tmp_path / "bank.tsv",
        [("a|pa", np.ones(16) / 4.0), ("b|pb", np.ones(32) / np.sqrt(32))],
    )
    with pytest.raises(DimMismatch):
        load_bank(tmp_path / "bank.tsv")


def test_load_bank_empty_file(tmp_path):
    (tmp_path / "bank.tsv").write_text("")
    (tmp_path / "bank.bin").write_bytes(b"RUNAEMB1")
    with pytest.raises(FormatError):
        load_bank(tmp_path / "bank.tsv")


def test_bank_rejects_non_unit_vectors():
    with pytest.raises(ValueError):
        ConceptBank(labels=("a", "b"), prompts=("pa", "pb"), vectors=np.ones((2, 4)))


def test_save_bank_rejects_separator_in_label(tmp_path, text_encoder):
    bank = build_bank(["good"], text_encoder)
    bad = ConceptBank(labels=("has|pipe",), prompts=("p",), vectors=bank.vectors)
    with pytest.raises(FormatError):
        save_bank(bad, tmp_path / "bank.tsv")
