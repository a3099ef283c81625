"""Turning detection streams into best-shot records and loading precomputed
embedding files.

Detection quality is an upstream input (detector confidence or sharpness
score); no image processing happens here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import (
    EmptyTrackError,
    FormatError,
    InvariantViolationError,
    IoError,
    MixedTrackError,
)
from .templates import (
    Modality,
    Source,
    Template,
    VehicleRecord,
    record_from_json,
    record_to_json,
    template_from_b64,
    template_to_b64,
)


@dataclass(frozen=True)
class Detection:
    """One detector hit inside a track. ``frame_index`` is expected to be
    unique within a track."""

    camera: str
    track_id: str
    frame_index: int
    quality: float
    shape_template: Template | None = None
    colour_template: Template | None = None

    def __post_init__(self):
        if self.shape_template is None and self.colour_template is None:
            raise InvariantViolationError(
                f"detection {self.track_id}/{self.frame_index} carries no template"
            )
        if not (math.isfinite(self.quality) and self.quality >= 0.0):
            raise InvariantViolationError(f"quality must be finite and >= 0, got {self.quality!r}")
        if self.shape_template is not None and self.shape_template.modality is not Modality.SHAPE:
            raise InvariantViolationError("shape_template has wrong modality")
        if self.colour_template is not None and self.colour_template.modality is not Modality.COLOUR:
            raise InvariantViolationError("colour_template has wrong modality")


def best_shot(track) -> VehicleRecord:
    """Pick one representative detection for a track as a VehicleRecord.

    Takes the detection with maximum quality, ties broken by smallest
    frame_index, so the choice does not depend on input order.
    """
    detections = list(track)
    if not detections:
        raise EmptyTrackError("best-shot over an empty track")
    first = detections[0]
    for d in detections[1:]:
        if d.track_id != first.track_id or d.camera != first.camera:
            raise MixedTrackError(
                f"track mixes {first.camera}/{first.track_id} with {d.camera}/{d.track_id}"
            )
    best = min(detections, key=lambda d: (-d.quality, d.frame_index))
    # ':' keeps the id a single URL path segment for the service drill-down
    return VehicleRecord(
        record_id=f"{best.camera}:{best.track_id}",
        vehicle_id="",
        shape_template=best.shape_template,
        colour_template=best.colour_template,
        source=Source(camera=best.camera, track_id=best.track_id, frame_index=best.frame_index),
    )


def load_embedding_set(path) -> list:
    """Load a JSON-lines file of VehicleRecords, validating each line."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
        try:
            records.append(record_from_json(doc))
        except (FormatError, InvariantViolationError) as exc:
            raise FormatError(f"{path}: line {lineno}: {exc}") from exc
    return records


def write_records(path, records) -> None:
    """Write VehicleRecords as JSON-lines (the inverse of
    :func:`load_embedding_set`)."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps(record_to_json(r), separators=(",", ":")) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def detection_to_json(d: Detection) -> dict:
    return {
        "camera": d.camera,
        "track_id": d.track_id,
        "frame_index": d.frame_index,
        "quality": d.quality,
        "shape_template": template_to_b64(d.shape_template) if d.shape_template else None,
        "colour_template": template_to_b64(d.colour_template) if d.colour_template else None,
    }


def detection_from_json(doc: dict) -> Detection:
    try:
        return Detection(
            camera=doc["camera"],
            track_id=doc["track_id"],
            frame_index=int(doc["frame_index"]),
            quality=float(doc["quality"]),
            shape_template=template_from_b64(doc["shape_template"]) if doc.get("shape_template") else None,
            colour_template=template_from_b64(doc["colour_template"]) if doc.get("colour_template") else None,
        )
    except KeyError as exc:
        raise FormatError(f"detection is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed detection: {exc}") from exc


def load_detections(path) -> list:
    """Load a JSON-lines detection stream."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    detections = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            detections.append(detection_from_json(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
        except (FormatError, InvariantViolationError) as exc:
            raise FormatError(f"{path}: line {lineno}: {exc}") from exc
    return detections


def write_detections(path, detections) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for d in detections:
                fh.write(json.dumps(detection_to_json(d), separators=(",", ":")) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def group_tracks(detections) -> dict:
    """Group a detection stream by (camera, track_id), preserving order."""
    tracks: dict[tuple, list] = {}
    for d in detections:
        tracks.setdefault((d.camera, d.track_id), []).append(d)
    return tracks
