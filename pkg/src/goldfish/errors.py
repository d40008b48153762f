"""Exception types raised across the engine."""


class GoldfishError(Exception):
    """Base class for all engine errors."""


# --- ingestion ---

class MalformedTimestamp(GoldfishError):
    """A subtitle time line could not be parsed."""


class ZeroLengthVideo(GoldfishError):
    """Video has no frames to segment."""


class EmptyClip(GoldfishError):
    """Clip has no sampled frames."""


# --- backends ---

class BackendError(GoldfishError):
    """Base class for backend transport failures."""


class BackendUnavailable(BackendError):
    """Transient failure (timeout, connection refused, 5xx); retryable."""


class BackendRejected(BackendError):
    """Non-retryable backend refusal (4xx, auth, bad request)."""


class EmptyResponse(BackendError):
    """Backend returned an empty body where text was required."""


# --- embeddings / index ---

class DimensionMismatch(GoldfishError):
    """Vector length differs from the expected dimensionality."""


class EncoderMismatch(GoldfishError):
    """Vector comes from a different encoder than the index."""


class CorruptIndex(GoldfishError):
    """Index file failed checksum or structural validation."""


class VersionUnsupported(GoldfishError):
    """Index file was written by an unknown format version."""


# --- retrieval ---

class ZeroVector(GoldfishError):
    """Cosine similarity is undefined for an all-zero vector."""


class EmptyIndex(GoldfishError):
    """Retrieval requires at least one indexed clip."""


# --- answering ---

class NoHits(GoldfishError):
    """Answer context cannot be assembled from zero retrieved clips."""


class UnparseableChoice(GoldfishError):
    """Backend reply matched none of the accepted MCQ answer shapes."""


# --- benchmark ---

class OrphanClip(GoldfishError):
    """Benchmark item references a clip not listed in any episode."""


class UnparseableVerdict(GoldfishError):
    """Judge reply contained no recoverable pred/score pair."""


class LengthMismatch(GoldfishError):
    """Aligned per-item lists have different lengths."""


# --- service ---

class InvalidManifest(GoldfishError):
    """Video manifest is missing required fields or has bad values."""


class DuplicateVideoId(GoldfishError):
    """Video id already ingested; pass force to replace."""


class VideoNotReady(GoldfishError):
    """No ready index exists for the requested video id."""


class MissingVideo(GoldfishError):
    """Benchmark references a video that is neither ingested nor ingestible."""
