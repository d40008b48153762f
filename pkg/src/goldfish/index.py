"""Per-video retrieval index: two embedding keys per clip plus the clip
record, persisted to a ``.gfidx`` file.

File layout (version 1):

    GFIDX 1\\n
    <8-byte LE header length><header JSON, UTF-8>
    <vector blob: little-endian float32, row-major, one row per key>
    <8-byte checksum: leading bytes of SHA-256 over everything before it>

The header JSON carries the manifest, the clip records, and the key order
for the blob. Round-trips are bit-exact because vectors are already held
at float32 precision in memory.
"""
from __future__ import annotations

import hashlib
import json
import struct
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

import numpy as np

from .embedding import EmbeddingVector
from .errors import CorruptIndex, DimensionMismatch, EncoderMismatch, VersionUnsupported

_MAGIC = b"GFIDX"
_CHECKSUM_LEN = 8
SUPPORTED_VERSIONS = {1}
INDEX_SUFFIX = ".gfidx"


class KeyKind(str, Enum):
    SUMMARY = "summary"
    SUBTITLE = "subtitle"


@dataclass(frozen=True)
class ClipRecord:
    clip_id: int
    summary_text: str
    subtitle_text: str
    start_ms: int
    end_ms: int


@dataclass(frozen=True)
class RetrievalKey:
    clip_id: int
    kind: KeyKind
    vector: EmbeddingVector


@dataclass
class IndexManifest:
    video_id: str
    dim: int = 0
    encoder_id: str = ""
    record_count: int = 0
    created_at: str = ""

    def __post_init__(self):
        if not self.created_at:
            self.created_at = datetime.now(timezone.utc).isoformat()


class VideoIndex:
    """Exact-scoring index over one video's clips.

    Single-writer, multi-reader: upserts take a lock; readers see only
    complete (record, summary key, subtitle key) triples because the three
    are swapped in under the same lock.
    """

    def __init__(self, video_id: str, manifest: IndexManifest | None = None):
        self.manifest = manifest or IndexManifest(video_id=video_id)
        self._records: dict[int, ClipRecord] = {}
        self._keys: dict[tuple[int, KeyKind], EmbeddingVector] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    @property
    def video_id(self) -> str:
        return self.manifest.video_id

    def clip_ids(self) -> list[int]:
        return sorted(self._records)

    def record(self, clip_id: int) -> ClipRecord:
        return self._records[clip_id]

    def records(self) -> dict[int, ClipRecord]:
        return dict(self._records)

    def key_vector(self, clip_id: int, kind: KeyKind) -> EmbeddingVector:
        return self._keys[(clip_id, kind)]

    def keys(self) -> list[RetrievalKey]:
        return [
            RetrievalKey(clip_id=cid, kind=kind, vector=vec)
            for (cid, kind), vec in sorted(
                self._keys.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
            )
        ]

    def _check_vector(self, vec: EmbeddingVector) -> None:
        if self.manifest.dim and vec.dim != self.manifest.dim:
            raise DimensionMismatch(
                f"vector dim {vec.dim} does not match index dim {self.manifest.dim}"
            )
        if self.manifest.encoder_id and vec.encoder_id != self.manifest.encoder_id:
            raise EncoderMismatch(
                f"vector encoder {vec.encoder_id!r} does not match index "
                f"encoder {self.manifest.encoder_id!r}"
            )

    def upsert_clip(
        self,
        record: ClipRecord,
        summary_vec: EmbeddingVector,
        subtitle_vec: EmbeddingVector,
    ) -> None:
        """Insert or replace one clip's record and both of its keys.

        The first insert fixes the index dimensionality and encoder; later
        inserts must match.
        """
        for vec in (summary_vec, subtitle_vec):
            self._check_vector(vec)
        if summary_vec.dim != subtitle_vec.dim:
            raise DimensionMismatch("summary and subtitle vectors differ in dim")
        with self._lock:
            if not self.manifest.dim:
                self.manifest.dim = summary_vec.dim
                self.manifest.encoder_id = summary_vec.encoder_id
            self._records[record.clip_id] = record
            self._keys[(record.clip_id, KeyKind.SUMMARY)] = summary_vec
            self._keys[(record.clip_id, KeyKind.SUBTITLE)] = subtitle_vec
            self.manifest.record_count = len(self._records)

    # --- persistence ---

    def save(self, path: str | Path) -> None:
        """Write the index; load() of the result reproduces it bit-exactly."""
        keys = self.keys()
        header = {
            "manifest": {
                "video_id": self.manifest.video_id,
                "dim": self.manifest.dim,
                "encoder_id": self.manifest.encoder_id,
                "record_count": self.manifest.record_count,
                "created_at": self.manifest.created_at,
            },
            "records": [
                [r.clip_id, r.summary_text, r.subtitle_text, r.start_ms, r.end_ms]
                for r in (self._records[cid] for cid in self.clip_ids())
            ],
            "keys": [[k.clip_id, k.kind.value] for k in keys],
        }
        header_bytes = json.dumps(header, ensure_ascii=False).encode("utf-8")
        blob = b"".join(k.vector.float32_bytes() for k in keys)
        body = (
            _MAGIC
            + b" 1\n"
            + struct.pack("<Q", len(header_bytes))
            + header_bytes
            + blob
        )
        checksum = hashlib.sha256(body).digest()[:_CHECKSUM_LEN]
        Path(path).write_bytes(body + checksum)

    @classmethod
    def load(cls, path: str | Path) -> "VideoIndex":
        """Read a ``.gfidx`` file.

        Raises:
            CorruptIndex: truncated file, bad magic, or checksum failure.
            VersionUnsupported: written by an unknown format version.
        """
        data = Path(path).read_bytes()
        if len(data) < len(_MAGIC) + 3 + 8 + _CHECKSUM_LEN:
            raise CorruptIndex(f"{path}: file too short")
        body, checksum = data[:-_CHECKSUM_LEN], data[-_CHECKSUM_LEN:]
        if hashlib.sha256(body).digest()[:_CHECKSUM_LEN] != checksum:
            raise CorruptIndex(f"{path}: checksum mismatch")
        if not body.startswith(_MAGIC + b" "):
            raise CorruptIndex(f"{path}: bad magic")
        newline = body.find(b"\n", 0, 16)
        if newline < 0:
            raise CorruptIndex(f"{path}: unreadable version line")
        try:
            version = int(body[len(_MAGIC) + 1 : newline])
        except ValueError as exc:
            raise CorruptIndex(f"{path}: unreadable version") from exc
        if version not in SUPPORTED_VERSIONS:
            raise VersionUnsupported(
                f"{path}: format version {version}, supported {sorted(SUPPORTED_VERSIONS)}"
            )
        offset = newline + 1
        (header_len,) = struct.unpack_from("<Q", body, offset)
        offset += 8
        try:
            header = json.loads(body[offset : offset + header_len].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CorruptIndex(f"{path}: bad header") from exc
        offset += header_len

        man = header["manifest"]
        manifest = IndexManifest(
            video_id=man["video_id"],
            dim=man["dim"],
            encoder_id=man["encoder_id"],
            record_count=man["record_count"],
            created_at=man["created_at"],
        )
        index = cls(video_id=manifest.video_id, manifest=manifest)

        expected_blob = len(header["keys"]) * manifest.dim * 4
        blob = body[offset:]
        if len(blob) != expected_blob:
            raise CorruptIndex(
                f"{path}: vector blob is {len(blob)} bytes, expected {expected_blob}"
            )
        flat = np.frombuffer(blob, dtype="<f4")
        for i, (clip_id, kind) in enumerate(header["keys"]):
            row = flat[i * manifest.dim : (i + 1) * manifest.dim]
            index._keys[(clip_id, KeyKind(kind))] = EmbeddingVector(
                values=tuple(float(v) for v in row),
                dim=manifest.dim,
                encoder_id=manifest.encoder_id,
            )
        for clip_id, summary, subtitle, start_ms, end_ms in header["records"]:
            index._records[clip_id] = ClipRecord(
                clip_id=clip_id,
                summary_text=summary,
                subtitle_text=subtitle,
                start_ms=start_ms,
                end_ms=end_ms,
            )
        return index
