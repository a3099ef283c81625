"""Error taxonomy shared by every layer of the engine.

Each error carries a stable ``code`` string that the CLI prints on stderr and
the HTTP service returns in its error envelope, so callers can match on codes
without parsing messages.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""

    code = "EngineError"

    def __init__(self, message: str, detail: object = None):
        super().__init__(message)
        self.message = message
        self.detail = detail


# -- template construction and normalization


class ZeroVectorError(EngineError):
    code = "ZeroVector"


class NonFiniteError(EngineError):
    code = "NonFinite"


class NotNormalizedError(EngineError):
    code = "NotNormalized"


# -- serialization


class FormatError(EngineError):
    code = "FormatError"


class InvariantViolationError(EngineError):
    code = "InvariantViolation"


class IoError(EngineError):
    code = "IoError"


# -- matching and fusion


class ModalityMismatchError(EngineError):
    code = "ModalityMismatch"


class DimensionMismatchError(EngineError):
    code = "DimensionMismatch"


class EmptyCalibrationSetError(EngineError):
    code = "EmptyCalibrationSet"


class InvalidFarError(EngineError):
    code = "InvalidFar"


class EmptyProbeSetError(EngineError):
    code = "EmptyProbeSet"


# -- gallery


class DuplicateIdError(EngineError):
    code = "DuplicateId"


class MissingProbeTemplateError(EngineError):
    code = "MissingProbeTemplate"


class EmptyGalleryError(EngineError):
    code = "EmptyGallery"


# -- colour classification


class EmptyCatalogError(EngineError):
    code = "EmptyCatalog"


class UnknownColourLabelError(EngineError):
    code = "UnknownColourLabel"


# -- evaluation


class MissingClassError(EngineError):
    code = "MissingClass"


class MateMissingError(EngineError):
    code = "MateMissing"


class ManifestViolationError(EngineError):
    code = "ManifestViolation"


class InvalidRateError(EngineError):
    code = "InvalidRate"


# -- ingest


class EmptyTrackError(EngineError):
    code = "EmptyTrack"


class MixedTrackError(EngineError):
    code = "MixedTrack"


# -- synthetic generation


class InvalidConfigError(EngineError):
    code = "InvalidConfig"


class MissingConfounderError(EngineError):
    code = "MissingConfounder"
