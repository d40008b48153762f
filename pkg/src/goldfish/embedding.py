"""Text embedding via a pluggable encoder backend.

Vectors are held at float32 precision (the on-disk index stores raw
little-endian float32, and save/load must be bit-exact), un-normalized:
cosine scoring normalizes at query time, so the backend output is
preserved for inspection.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import DimensionMismatch

EMPTY_TEXT_SENTINEL = "[EMPTY]"


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    dim: int
    encoder_id: str

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float32)
        if arr.shape != (self.dim,):
            raise DimensionMismatch(f"{arr.size} values for declared dim {self.dim}")
        if not np.isfinite(arr).all():
            raise ValueError("embedding contains non-finite values")
        object.__setattr__(self, "values", tuple(arr.tolist()))
        # cached views; not dataclass fields, so equality stays value-based
        object.__setattr__(self, "_f32", arr)
        object.__setattr__(self, "_f64", arr.astype(np.float64))

    def as_array(self) -> np.ndarray:
        """Float64 view for scoring; treat as read-only."""
        return self._f64

    def float32_bytes(self) -> bytes:
        """Little-endian float32 encoding used by the on-disk index."""
        return self._f32.astype("<f4").tobytes()


class EmbeddingBackend(Protocol):
    id: str
    dim: int

    def encode(self, texts: list[str]) -> list[list[float]]: ...


def embed_text(text: str, backend: EmbeddingBackend) -> EmbeddingVector:
    """Encode one text; blank text is mapped to the [EMPTY] sentinel so
    subtitle-less clips still get a key.

    Raises:
        DimensionMismatch: backend returned a vector of the wrong length.
        BackendUnavailable: transport failure (from the backend).
    """
    payload = text.strip() or EMPTY_TEXT_SENTINEL
    vectors = backend.encode([payload])
    if len(vectors) != 1 or len(vectors[0]) != backend.dim:
        got = len(vectors[0]) if vectors else 0
        raise DimensionMismatch(
            f"encoder {backend.id!r} returned length {got}, declared dim {backend.dim}"
        )
    return EmbeddingVector(values=tuple(vectors[0]), dim=backend.dim, encoder_id=backend.id)


def embed_texts(texts: list[str], backend: EmbeddingBackend) -> list[EmbeddingVector]:
    """Batch variant of embed_text (one backend round-trip)."""
    payloads = [t.strip() or EMPTY_TEXT_SENTINEL for t in texts]
    vectors = backend.encode(payloads)
    if len(vectors) != len(payloads):
        raise DimensionMismatch(
            f"encoder {backend.id!r} returned {len(vectors)} vectors for "
            f"{len(payloads)} inputs"
        )
    out = []
    for vec in vectors:
        if len(vec) != backend.dim:
            raise DimensionMismatch(
                f"encoder {backend.id!r} returned length {len(vec)}, "
                f"declared dim {backend.dim}"
            )
        out.append(EmbeddingVector(values=tuple(vec), dim=backend.dim, encoder_id=backend.id))
    return out
