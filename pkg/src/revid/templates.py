"""Feature templates, vehicle records, and their bit-exact serialization.

A template is a fixed-length feature vector in one modality (shape or colour),
unit-normalized for cosine matching. In memory values are float64 so that
normalization post-conditions hold at tight tolerances; the binary wire format
stores 32-bit floats, and the "is normalized" check on stored data is
correspondingly looser (1e-6).
"""

from __future__ import annotations

import base64
import enum
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FormatError,
    InvariantViolationError,
    NonFiniteError,
    ZeroVectorError,
)

MAGIC = b"RVTP"
FORMAT_VERSION = 1

# Norm tolerance for the `normalized` flag on stored/constructed values.
# Float32 round-tripping perturbs a unit vector's norm by up to ~1e-6.
NORM_FLAG_TOL = 1e-6

_FLAG_NORMALIZED = 0x01


class Modality(enum.Enum):
    """Feature family a template encodes. Templates of different modalities
    are never matched against each other."""

    SHAPE = "shape"
    COLOUR = "colour"

    @property
    def wire_code(self) -> int:
        return 0 if self is Modality.SHAPE else 1

    @classmethod
    def from_wire(cls, code: int) -> "Modality":
        if code == 0:
            return cls.SHAPE
        if code == 1:
            return cls.COLOUR
        raise FormatError(f"unknown modality code {code}")


def _as_values(values) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
    if arr.ndim != 1:
        raise InvariantViolationError(f"template values must be 1-D, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class Template:
    """Unit-length feature vector with a modality tag.

    ``values`` is a read-only 1-D float64 array. If ``normalized`` is set the
    Euclidean norm must be 1 within ``NORM_FLAG_TOL``.
    """

    modality: Modality
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        arr = _as_values(self.values)
        object.__setattr__(self, "values", arr)
        arr.setflags(write=False)
        if arr.size < 1:
            raise InvariantViolationError("template dim must be >= 1")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("template values contain NaN or Inf")
        if self.normalized:
            norm = float(np.linalg.norm(arr))
            if abs(norm - 1.0) > NORM_FLAG_TOL:
                raise InvariantViolationError(
                    f"template flagged normalized but norm is {norm!r}"
                )

    @property
    def dim(self) -> int:
        return int(self.values.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Template):
            return NotImplemented
        return (
            self.modality is other.modality
            and self.normalized == other.normalized
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )

    __hash__ = None  # mutable-payload semantics: compare by value, no hashing

    def __repr__(self) -> str:
        return f"Template({self.modality.value}, dim={self.dim}, normalized={self.normalized})"


def normalize(t: Template) -> Template:
    """Scale a template to unit Euclidean length, preserving direction.

    Raises ZeroVector for degenerate embeddings (norm <= 1e-12) and NonFinite
    for NaN/Inf input. The computation runs in float64; the result's norm is
    1 within 1e-9.
    """
    if not np.all(np.isfinite(t.values)):
        raise NonFiniteError("cannot normalize a template with NaN or Inf values")
    norm = float(np.linalg.norm(t.values))
    if norm <= 1e-12:
        raise ZeroVectorError(f"degenerate embedding: norm {norm!r}")
    return Template(t.modality, t.values / norm, normalized=True)


def encode_template(t: Template) -> bytes:
    """Serialize a template to the binary wire format.

    Layout: magic "RVTP", version u8, modality u8 (0 shape / 1 colour),
    flags u8 (bit 0 = normalized), reserved u8, dim as little-endian u32,
    then dim little-endian IEEE-754 float32 values.
    """
    flags = _FLAG_NORMALIZED if t.normalized else 0
    header = MAGIC + struct.pack(
        "<BBBBI", FORMAT_VERSION, t.modality.wire_code, flags, 0, t.dim
    )
    payload = t.values.astype("<f4").tobytes()
    return header + payload


def decode_template(data: bytes) -> Template:
    """Parse the binary wire format back into a Template.

    Raises FormatError on bad magic, version, or length, and
    InvariantViolation if a payload flagged normalized has a norm deviating
    more than 1e-6 from 1.
    """
    if len(data) < 12:
        raise FormatError(f"template payload truncated: {len(data)} bytes")
    if data[:4] != MAGIC:
        raise FormatError(f"bad magic {data[:4]!r}")
    version, modality_code, flags, _reserved, dim = struct.unpack("<BBBBI", data[4:12])
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported template format version {version}")
    if dim < 1:
        raise FormatError(f"invalid dim {dim}")
    expected = 12 + 4 * dim
    if len(data) != expected:
        raise FormatError(f"payload length {len(data)} does not match dim {dim} (expected {expected})")
    raw = np.frombuffer(data, dtype="<f4", count=dim, offset=12)
    values = raw.astype(np.float64)
    modality = Modality.from_wire(modality_code)
    normalized = bool(flags & _FLAG_NORMALIZED)
    if normalized:
        norm = float(np.linalg.norm(values))
        if abs(norm - 1.0) > NORM_FLAG_TOL:
            raise InvariantViolationError(
                f"payload flagged normalized but norm is {norm!r}"
            )
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("decoded template contains NaN or Inf")
    return Template(modality, values, normalized=normalized)


def template_to_b64(t: Template) -> str:
    return base64.b64encode(encode_template(t)).decode("ascii")


def template_from_b64(s: str) -> Template:
    try:
        raw = base64.b64decode(s, validate=True)
    except (ValueError, TypeError) as exc:
        raise FormatError(f"invalid base64 template payload: {exc}") from exc
    return decode_template(raw)


@dataclass(frozen=True)
class FineGrainedClass:
    """Vehicle appearance category: make, model, released year, perspective.

    Equality is exact, case-sensitive string equality on all four elements.
    """

    make: str
    model: str
    released_year: str
    perspective: str

    def __post_init__(self):
        for name in ("make", "model", "released_year", "perspective"):
            if not getattr(self, name):
                raise InvariantViolationError(f"fine-grained class field {name!r} is empty")

    def as_dict(self) -> dict:
        return {
            "make": self.make,
            "model": self.model,
            "released_year": self.released_year,
            "perspective": self.perspective,
        }


@dataclass(frozen=True)
class Source:
    """Provenance of a record: capturing camera, optionally track and frame."""

    camera: str
    track_id: str | None = None
    frame_index: int | None = None

    def as_dict(self) -> dict:
        return {
            "camera": self.camera,
            "track_id": self.track_id,
            "frame_index": self.frame_index,
        }


@dataclass(frozen=True, eq=False)
class VehicleRecord:
    """Gallery entry: identity, class metadata, and one template per modality.

    ``vehicle_id`` is the ground-truth identity and may be empty when unknown
    (e.g. best-shots from unlabelled video). At least one template must be
    present.
    """

    record_id: str
    vehicle_id: str = ""
    fine_class: FineGrainedClass | None = None
    colour_label: str | None = None
    shape_template: Template | None = None
    colour_template: Template | None = None
    source: Source = field(default_factory=lambda: Source(camera="unknown"))

    def __post_init__(self):
        if not self.record_id:
            raise InvariantViolationError("record_id must be non-empty")
        if self.shape_template is None and self.colour_template is None:
            raise InvariantViolationError(
                f"record {self.record_id!r} carries no template"
            )
        if self.shape_template is not None and self.shape_template.modality is not Modality.SHAPE:
            raise InvariantViolationError(
                f"record {self.record_id!r}: shape_template has modality "
                f"{self.shape_template.modality.value}"
            )
        if self.colour_template is not None and self.colour_template.modality is not Modality.COLOUR:
            raise InvariantViolationError(
                f"record {self.record_id!r}: colour_template has modality "
                f"{self.colour_template.modality.value}"
            )

    def template_for(self, modality: Modality) -> Template | None:
        return self.shape_template if modality is Modality.SHAPE else self.colour_template

    def __eq__(self, other) -> bool:
        if not isinstance(other, VehicleRecord):
            return NotImplemented
        return (
            self.record_id == other.record_id
            and self.vehicle_id == other.vehicle_id
            and self.fine_class == other.fine_class
            and self.colour_label == other.colour_label
            and self.shape_template == other.shape_template
            and self.colour_template == other.colour_template
            and self.source == other.source
        )

    __hash__ = None


def record_to_json(r: VehicleRecord) -> dict:
    """VehicleRecord as a JSON-ready dict; template payloads are base64 of
    the binary format. Key order is fixed so serialized bytes are stable."""
    return {
        "record_id": r.record_id,
        "vehicle_id": r.vehicle_id,
        "class": r.fine_class.as_dict() if r.fine_class is not None else None,
        "colour_label": r.colour_label,
        "shape_template": template_to_b64(r.shape_template) if r.shape_template else None,
        "colour_template": template_to_b64(r.colour_template) if r.colour_template else None,
        "source": r.source.as_dict(),
    }


def record_from_json(d: dict) -> VehicleRecord:
    if not isinstance(d, dict):
        raise FormatError(f"record must be a JSON object, got {type(d).__name__}")
    try:
        fine = d.get("class")
        src = d.get("source") or {}
        return VehicleRecord(
            record_id=d["record_id"],
            vehicle_id=d.get("vehicle_id") or "",
            fine_class=FineGrainedClass(**fine) if fine else None,
            colour_label=d.get("colour_label"),
            shape_template=template_from_b64(d["shape_template"]) if d.get("shape_template") else None,
            colour_template=template_from_b64(d["colour_template"]) if d.get("colour_template") else None,
            source=Source(
                camera=src.get("camera", "unknown"),
                track_id=src.get("track_id"),
                frame_index=src.get("frame_index"),
            ),
        )
    except KeyError as exc:
        raise FormatError(f"record is missing field {exc}") from exc
    except TypeError as exc:
        raise FormatError(f"malformed record: {exc}") from exc


def quantize_to_f32(values: np.ndarray) -> np.ndarray:
    """Round float64 values through float32, keeping float64 dtype.

    Templates built from such values serialize bit-exactly (the wire format
    stores float32).
    """
    return np.asarray(values, dtype=np.float64).astype(np.float32).astype(np.float64)


def unit_f32(modality: Modality, values: np.ndarray) -> Template:
    """Normalize raw values and quantize through float32 into a flagged
    template. Helper for generators and tests that want wire-exact templates."""
    v = np.asarray(values, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm <= 1e-12:
        raise ZeroVectorError("degenerate embedding")
    if not math.isfinite(norm):
        raise NonFiniteError("values contain NaN or Inf")
    return Template(modality, quantize_to_f32(v / norm), normalized=True)
