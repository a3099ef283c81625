"""Searchable collection of vehicle records with deterministic top-k retrieval.

Galleries are immutable snapshots: enrollment returns a new snapshot, so
in-flight searches never observe partial writes. Retrieval is an exhaustive
vectorized scan (desk-scale galleries, bit-reproducible results); ranking
ties break by ascending record_id.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    DuplicateIdError,
    EmptyGalleryError,
    EmptyProbeSetError,
    FormatError,
    InvalidConfigError,
    InvariantViolationError,
    IoError,
    MissingProbeTemplateError,
)
from .matching import FUSED, FusionWeights
from .templates import Modality, Template, VehicleRecord, record_from_json, record_to_json

GALLERY_FORMAT = "revid-gallery"
GALLERY_VERSION = 1

MODE_SHAPE = "shape"
MODE_COLOUR = "colour"
MODE_FUSED = FUSED
SEARCH_MODES = (MODE_SHAPE, MODE_COLOUR, MODE_FUSED)


@dataclass(frozen=True)
class RankedResult:
    """One search hit: 1-based rank, fused or single-modality score, and the
    per-modality breakdown."""

    record_id: str
    score: float
    per_modality_scores: dict
    rank: int


@dataclass
class _ScanBlock:
    """Stacked template matrix over the records eligible for one mode."""

    record_ids: list
    id_array: np.ndarray
    shape_matrix: np.ndarray | None = None
    colour_matrix: np.ndarray | None = None


class Gallery:
    """Immutable snapshot of enrolled vehicle records.

    All templates of one modality share a single dimension. Use
    :func:`enroll` / :meth:`Gallery.from_records` to build snapshots.
    """

    def __init__(self, records: dict | None = None, dims: dict | None = None, snapshot_version: int = 0):
        self._records: dict[str, VehicleRecord] = dict(records or {})
        self.dims: dict[Modality, int] = dict(dims or {})
        self.snapshot_version = snapshot_version
        self._scan_cache: dict[str, _ScanBlock] = {}

    # -- construction

    @classmethod
    def from_records(cls, records) -> "Gallery":
        g = cls()
        recs: dict[str, VehicleRecord] = {}
        dims: dict[Modality, int] = {}
        for r in records:
            if r.record_id in recs:
                raise DuplicateIdError(f"record_id {r.record_id!r} already enrolled")
            _check_dims(dims, r)
            recs[r.record_id] = r
        g._records = recs
        g.dims = dims
        g.snapshot_version = len(recs)
        return g

    # -- read access

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._records

    def get(self, record_id: str) -> VehicleRecord | None:
        return self._records.get(record_id)

    def records(self) -> list[VehicleRecord]:
        return list(self._records.values())

    def record_ids(self) -> list[str]:
        return list(self._records.keys())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gallery):
            return NotImplemented
        return (
            list(self._records) == list(other._records)
            and all(self._records[k] == other._records[k] for k in self._records)
        )

    # -- scanning

    def _block(self, mode: str) -> _ScanBlock:
        """Eligible records and stacked C-contiguous float64 matrices for a
        search mode. Cached per snapshot (snapshots are immutable)."""
        blk = self._scan_cache.get(mode)
        if blk is not None:
            return blk
        need_shape = mode in (MODE_SHAPE, MODE_FUSED)
        need_colour = mode in (MODE_COLOUR, MODE_FUSED)
        ids, shape_rows, colour_rows = [], [], []
        for r in self._records.values():
            if need_shape and r.shape_template is None:
                continue
            if need_colour and r.colour_template is None:
                continue
            ids.append(r.record_id)
            if need_shape:
                shape_rows.append(r.shape_template.values)
            if need_colour:
                colour_rows.append(r.colour_template.values)
        blk = _ScanBlock(
            record_ids=ids,
            id_array=np.array(ids, dtype=object),
            shape_matrix=np.ascontiguousarray(np.stack(shape_rows)) if shape_rows else None,
            colour_matrix=np.ascontiguousarray(np.stack(colour_rows)) if colour_rows else None,
        )
        self._scan_cache[mode] = blk
        return blk


def _check_dims(dims: dict, r: VehicleRecord) -> None:
    for modality in (Modality.SHAPE, Modality.COLOUR):
        t = r.template_for(modality)
        if t is None:
            continue
        known = dims.get(modality)
        if known is None:
            dims[modality] = t.dim
        elif known != t.dim:
            raise DimensionMismatchError(
                f"record {r.record_id!r}: {modality.value} dim {t.dim} != gallery dim {known}"
            )


def enroll(g: Gallery, r: VehicleRecord) -> Gallery:
    """Add one record, returning a new snapshot; the input is unchanged."""
    if r.record_id in g:
        raise DuplicateIdError(f"record_id {r.record_id!r} already enrolled")
    dims = dict(g.dims)
    _check_dims(dims, r)
    records = dict(g._records)
    records[r.record_id] = r
    return Gallery(records, dims, g.snapshot_version + 1)


def extend(g: Gallery, records) -> Gallery:
    """Bulk enrollment in one snapshot step."""
    out = Gallery(dict(g._records), dict(g.dims), g.snapshot_version)
    for r in records:
        if r.record_id in out._records:
            raise DuplicateIdError(f"record_id {r.record_id!r} already enrolled")
        _check_dims(out.dims, r)
        out._records[r.record_id] = r
    out.snapshot_version = g.snapshot_version + 1
    return out


def _probe_scores(blk: _ScanBlock, probe: VehicleRecord, mode: str, weights: FusionWeights | None):
    """Score every eligible record against one probe. Returns (score vector,
    per-modality score vectors)."""
    per_modality = {}
    if mode in (MODE_SHAPE, MODE_FUSED):
        t = probe.shape_template
        if t is None or not t.normalized:
            raise MissingProbeTemplateError("probe carries no normalized shape template")
        if blk.shape_matrix is not None and blk.shape_matrix.shape[1] != t.dim:
            raise DimensionMismatchError(
                f"probe shape dim {t.dim} != gallery dim {blk.shape_matrix.shape[1]}"
            )
        if blk.shape_matrix is not None:
            per_modality[MODE_SHAPE] = np.einsum("ij,j->i", blk.shape_matrix, t.values)
    if mode in (MODE_COLOUR, MODE_FUSED):
        t = probe.colour_template
        if t is None or not t.normalized:
            raise MissingProbeTemplateError("probe carries no normalized colour template")
        if blk.colour_matrix is not None and blk.colour_matrix.shape[1] != t.dim:
            raise DimensionMismatchError(
                f"probe colour dim {t.dim} != gallery dim {blk.colour_matrix.shape[1]}"
            )
        if blk.colour_matrix is not None:
            per_modality[MODE_COLOUR] = np.einsum("ij,j->i", blk.colour_matrix, t.values)

    if not blk.record_ids:
        return np.empty(0), per_modality
    if mode == MODE_SHAPE:
        scores = per_modality[MODE_SHAPE]
    elif mode == MODE_COLOUR:
        scores = per_modality[MODE_COLOUR]
    else:
        if weights is None:
            raise InvalidConfigError("fused search requires fusion weights")
        if weights.mode == "plain_sum":
            scores = per_modality[MODE_SHAPE] + per_modality[MODE_COLOUR]
        else:
            scores = weights.w_shape * per_modality[MODE_SHAPE] + weights.w_colour * per_modality[MODE_COLOUR]
    return scores, per_modality


def _rank(blk: _ScanBlock, scores: np.ndarray, per_modality: dict, k: int) -> list[RankedResult]:
    """Sort by score descending, ties by ascending record_id, take top k."""
    order = np.lexsort((blk.id_array, -scores))
    top = order[: min(k, order.size)]
    results = []
    for pos, idx in enumerate(top, start=1):
        results.append(
            RankedResult(
                record_id=blk.record_ids[idx],
                score=float(scores[idx]),
                per_modality_scores={m: float(v[idx]) for m, v in per_modality.items()},
                rank=pos,
            )
        )
    return results


def _validate_search_args(g: Gallery, mode: str, k: int) -> None:
    if mode not in SEARCH_MODES:
        raise InvalidConfigError(f"unknown search mode {mode!r}")
    if k < 1:
        raise InvalidConfigError(f"k must be >= 1, got {k}")
    if len(g) == 0:
        raise EmptyGalleryError("search against an empty gallery")


def search(
    g: Gallery,
    probe: VehicleRecord,
    mode: str = MODE_SHAPE,
    k: int = 10,
    weights: FusionWeights | None = None,
) -> list[RankedResult]:
    """Top-k gallery scan for one probe.

    Eligible records are those carrying the template(s) the mode requires;
    fused mode scores are weighted sums of the per-modality cosines. Returns
    min(k, #eligible) results, deterministically ordered.
    """
    _validate_search_args(g, mode, k)
    blk = g._block(mode)
    scores, per_modality = _probe_scores(blk, probe, mode, weights)
    if not blk.record_ids:
        return []
    return _rank(blk, scores, per_modality, k)


def multi_probe_search(
    g: Gallery,
    probes,
    mode: str = MODE_SHAPE,
    k: int = 10,
    weights: FusionWeights | None = None,
) -> list[RankedResult]:
    """Search with several probe images of the same vehicle.

    Per gallery record the final score is the maximum over the single-probe
    scores; the per-modality breakdown reported is the winning probe's (first
    probe on ties). Makes retrieval insensitive to which perspective any one
    probe happens to show.
    """
    probes = list(probes)
    if not probes:
        raise EmptyProbeSetError("multi-probe search requires at least one probe")
    _validate_search_args(g, mode, k)
    blk = g._block(mode)

    all_scores, all_pm = [], []
    for p in probes:
        scores, pm = _probe_scores(blk, p, mode, weights)
        all_scores.append(scores)
        all_pm.append(pm)
    if not blk.record_ids:
        return []
    stacked = np.stack(all_scores)          # (n_probes, n_records)
    best = np.max(stacked, axis=0)
    winner = np.argmax(stacked, axis=0)      # first probe index on ties
    per_modality = {
        m: np.stack([pm[m] for pm in all_pm])[winner, np.arange(len(blk.record_ids))]
        for m in all_pm[0]
    }
    return _rank(blk, best, per_modality, k)


# -- persistence


def save(g: Gallery, path) -> None:
    """Write the gallery file: JSON header line with a checksum, then one
    VehicleRecord JSON per line."""
    body = "".join(
        json.dumps(record_to_json(r), separators=(",", ":")) + "\n" for r in g.records()
    )
    body_bytes = body.encode("utf-8")
    header = {
        "format": GALLERY_FORMAT,
        "version": GALLERY_VERSION,
        "dims": {m.value: d for m, d in sorted(g.dims.items(), key=lambda kv: kv[0].value)},
        "checksum": hashlib.sha256(body_bytes).hexdigest(),
    }
    try:
        with open(path, "wb") as fh:
            fh.write((json.dumps(header, separators=(",", ":")) + "\n").encode("utf-8"))
            fh.write(body_bytes)
    except OSError as exc:
        raise IoError(f"cannot write gallery file {path}: {exc}") from exc


def load(path) -> Gallery:
    """Read a gallery file written by :func:`save`, verifying the checksum
    and every record invariant."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read gallery file {path}: {exc}") from exc
    newline = raw.find(b"\n")
    if newline < 0:
        raise FormatError("gallery file has no header line")
    try:
        header = json.loads(raw[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"corrupted gallery header: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != GALLERY_FORMAT:
        raise FormatError(f"not a {GALLERY_FORMAT} file")
    if header.get("version") != GALLERY_VERSION:
        raise FormatError(f"unsupported gallery version {header.get('version')!r}")
    body = raw[newline + 1 :]
    if hashlib.sha256(body).hexdigest() != header.get("checksum"):
        raise FormatError("gallery checksum mismatch")

    records = []
    seen = set()
    for lineno, line in enumerate(body.splitlines(), start=2):
        if not line.strip():
            continue
        try:
            d = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"line {lineno}: invalid record JSON: {exc}") from exc
        r = record_from_json(d)
        if r.record_id in seen:
            raise InvariantViolationError(f"line {lineno}: duplicate record_id {r.record_id!r}")
        seen.add(r.record_id)
        records.append(r)
    try:
        g = Gallery.from_records(records)
    except DimensionMismatchError as exc:
        raise InvariantViolationError(str(exc)) from exc
    declared = {m.value: d for m, d in g.dims.items()}
    if header.get("dims") != declared:
        raise InvariantViolationError(
            f"header dims {header.get('dims')} do not match records {declared}"
        )
    return g
