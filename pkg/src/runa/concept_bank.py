"""The concept bank: label space, prompt strings, and unit text embeddings.

Vector order defines the concept index used everywhere downstream, so
serialization must preserve order. Bank files reuse the embedding
interchange format; the record id packs ``label|prompt`` so prompts
round-trip through the three-field manifest.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadTemplate, DimMismatch, DuplicateLabel, FormatError
from .interchange import read_embeddings, write_embeddings
from .linalg import l2_normalize

DEFAULT_TEMPLATE = "a photo of a {label}"

_ID_SEPARATOR = "|"


@dataclass(frozen=True)
class ConceptBank:
    labels: tuple[str, ...]
    prompts: tuple[str, ...]
    vectors: np.ndarray  # (K, dim), unit rows

    def __post_init__(self):
        if len(self.labels) < 1:
            raise ValueError("bank needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise DuplicateLabel("bank labels must be distinct")
        if len(self.prompts) != len(self.labels):
            raise ValueError("prompts/labels length mismatch")
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.labels):
            raise DimMismatch(
                f"expected {len(self.labels)} vectors, got shape {self.vectors.shape}"
            )
        norms = np.linalg.norm(self.vectors, axis=1)
        if not np.all(np.abs(norms - 1.0) < 1e-9):
            raise ValueError("bank vectors must be unit-norm within 1e-9")

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None


def expand_template(template: str, label: str) -> str:
    if template.count("{label}") != 1:
        raise BadTemplate(
            f"template must contain exactly one '{{label}}' placeholder: {template!r}"
        )
    return template.replace("{label}", label)


def build_bank(labels, text_encoder, template: str = DEFAULT_TEMPLATE) -> ConceptBank:
    """Encode one templated prompt per label, order preserved."""
    labels = list(labels)
    if not labels:
        raise DuplicateLabel("label list is empty")
    if len(set(labels)) != len(labels):
        seen = set()
        dup = next(l for l in labels if l in seen or seen.add(l))
        raise DuplicateLabel(f"duplicate label {dup!r}")
    prompts = [expand_template(template, label) for label in labels]
    vectors = np.stack([l2_normalize(text_encoder.encode(p)) for p in prompts])
    return ConceptBank(labels=tuple(labels), prompts=tuple(prompts), vectors=vectors)


def save_bank(bank: ConceptBank, manifest_path: str | Path, blob_path: str | Path | None = None) -> None:
    records = []
    for label, prompt, vec in zip(bank.labels, bank.prompts, bank.vectors):
        if _ID_SEPARATOR in label:
            raise FormatError(f"label {label!r} may not contain {_ID_SEPARATOR!r}")
        records.append((f"{label}{_ID_SEPARATOR}{prompt}", vec))
    write_embeddings(manifest_path, records, blob_path=blob_path)


def load_bank(manifest_path: str | Path, blob_path: str | Path | None = None) -> ConceptBank:
    records = read_embeddings(manifest_path, blob_path=blob_path)
    if not records:
        raise FormatError(f"bank manifest {manifest_path} holds no records")
    labels, prompts, vectors = [], [], []
    dim = None
    for rec_id, vec in records:
        label, sep, prompt = rec_id.partition(_ID_SEPARATOR)
        if not sep:
            prompt = label
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise DimMismatch(
                f"bank record {label!r} has dim {vec.shape[0]}, expected {dim}"
            )
        labels.append(label)
        prompts.append(prompt)
        # 32-bit storage may drift the norm; renormalize on load.
        vectors.append(l2_normalize(vec))
    return ConceptBank(labels=tuple(labels), prompts=tuple(prompts), vectors=np.stack(vectors))
