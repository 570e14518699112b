"""Exception types shared across the engine."""

from __future__ import annotations


class FrescoError(Exception):
    """Base class for all engine errors."""


class MalformedRecord(FrescoError):
    """Record line is not parseable at the syntax level."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        super().__init__(message if line_no is None else f"line {line_no}: {message}")


class SchemaViolation(FrescoError):
    """Required field missing or of the wrong type."""

    def __init__(self, field: str, message: str, image_id: str = ""):
        self.field = field
        self.image_id = image_id
        super().__init__(f"{image_id or '<unknown>'}: field '{field}': {message}")


class InvariantViolation(FrescoError):
    """Field present and well-typed but violating a schema invariant."""

    def __init__(self, field: str, message: str, image_id: str = ""):
        self.field = field
        self.image_id = image_id
        super().__init__(f"{image_id or '<unknown>'}: field '{field}': {message}")


class ZeroDimension(FrescoError):
    """Image width or height is zero where a ratio is required."""


class BinMismatch(FrescoError):
    """Histograms have different bin counts."""


class NotNormalized(FrescoError):
    """Histogram mass does not sum to one."""


class EmptyPalette(FrescoError):
    """Palette has no colors."""


class DimensionMismatch(FrescoError):
    """Vectors have different lengths."""


class ZeroVector(FrescoError):
    """Cosine similarity is undefined on an all-zero vector."""


class DegenerateRange(FrescoError):
    """Scalar measure range has min >= max."""


class UnknownMeasure(FrescoError):
    """Measure id not present in the registry."""


class RegistryMismatch(FrescoError):
    """Two inputs were derived under incompatible registries or configs."""


class UnknownTask(FrescoError):
    """Task name outside the supported consistency-task set."""


class UnsupportedTask(FrescoError):
    """Task is recognized but the archive schema carries no source for it."""


class EmptyArchive(FrescoError):
    """Operation requires at least one record."""


class MissingEmbedding(FrescoError):
    """Label absent from the embedding table."""

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"no embedding for label '{label}'")


class UnknownImage(FrescoError):
    """image_id not present in the archive."""


class DuplicateId(FrescoError):
    """Two records share an image_id."""


class IoFailure(FrescoError):
    """Filesystem write failed."""
