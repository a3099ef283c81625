"""HTTP facade over the library: enrollment, search (plain / fused /
multi-probe / mix-mode), colour classification, weight calibration, and
best-shot detection drill-down.

Every endpoint is a thin wrapper; wire results equal the corresponding
in-process call on the same snapshot. Errors map to 4xx with a
machine-readable body {code, message, detail}.
"""

from __future__ import annotations

import json
import os
import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import gallery as gallery_mod
from .colourclass import ColourCatalog, classify_colour, default_catalog, load_catalog, mix_mode_search
from .config import ServiceConfig
from .errors import (
    DuplicateIdError,
    EngineError,
    FormatError,
    InvalidConfigError,
    UnknownColourLabelError,
)
from .gallery import Gallery, MODE_SHAPE, SEARCH_MODES, enroll, multi_probe_search, search
from .ingest import detection_to_json, group_tracks, load_detections
from .matching import FusionWeights, calibrate_weights
from .templates import record_from_json, template_from_b64

API_PREFIX = "/v1"

_STATUS_BY_CODE = {
    "DuplicateId": 409,
    "UnknownGallery": 404,
    "UnknownRecord": 404,
    "IoError": 500,
}


class UnknownGalleryError(EngineError):
    code = "UnknownGallery"


class UnknownRecordError(EngineError):
    code = "UnknownRecord"


class ServiceState:
    """Mutable service state: named gallery snapshots plus per-gallery
    detection streams for drill-down. Swapping a snapshot is atomic under
    the lock; searches run on whatever snapshot they grabbed."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.galleries: dict[str, Gallery] = {}
        self.detections: dict[str, dict] = {}  # gallery id -> (camera, track) -> [Detection]
        self.catalog: ColourCatalog | None = None
        self.default_weights: FusionWeights | None = None
        self.lock = threading.Lock()

    def load_data_dir(self) -> None:
        data_dir = self.config.data_dir
        if os.path.isdir(data_dir):
            for name in sorted(os.listdir(data_dir)):
                if name.endswith(".gallery"):
                    gid = name[: -len(".gallery")]
                    self.galleries[gid] = gallery_mod.load(os.path.join(data_dir, name))
                    det_path = os.path.join(data_dir, gid + ".detections.jsonl")
                    if os.path.exists(det_path):
                        self.detections[gid] = group_tracks(load_detections(det_path))
        if self.config.catalog_path:
            self.catalog = load_catalog(self.config.catalog_path)
        if self.config.weights_path:
            with open(self.config.weights_path, "r", encoding="utf-8") as fh:
                self.default_weights = FusionWeights.from_dict(json.load(fh))

    def gallery(self, gid: str) -> Gallery:
        g = self.galleries.get(gid)
        if g is None:
            raise UnknownGalleryError(f"no gallery named {gid!r}")
        return g

    def require_catalog(self) -> ColourCatalog:
        if self.catalog is None:
            # fall back to the default synthetic catalog; colour dims must match
            self.catalog = default_catalog()
        return self.catalog


def _error_response(exc: EngineError) -> JSONResponse:
    status = _STATUS_BY_CODE.get(exc.code, 400)
    return JSONResponse(
        status_code=status,
        content={"code": exc.code, "message": exc.message, "detail": exc.detail},
    )


def _ranked_to_json(res) -> dict:
    return {
        "record_id": res.record_id,
        "score": res.score,
        "per_modality_scores": res.per_modality_scores,
        "rank": res.rank,
    }


def _decision_to_json(d) -> dict:
    return {
        "label": d.label,
        "confidence": d.confidence,
        "runner_up": d.runner_up,
        "margin": d.margin,
    }


def create_app(config: ServiceConfig | None = None, state: ServiceState | None = None) -> FastAPI:
    """Build the HTTP app. Pass an explicit state to seed galleries in
    tests; otherwise the config's data directory is loaded on startup."""
    config = config or ServiceConfig()
    if state is None:
        state = ServiceState(config)
        state.load_data_dir()

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        # persist every gallery on shutdown; on-demand saves use /save
        if os.path.isdir(state.config.data_dir):
            for gid, g in state.galleries.items():
                gallery_mod.save(g, os.path.join(state.config.data_dir, gid + ".gallery"))

    app = FastAPI(title="revid search service", version="1.0", lifespan=lifespan)
    app.state.engine = state

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        return _error_response(exc)

    @app.get(API_PREFIX + "/health")
    def health():
        return {"status": "ok", "galleries": sorted(state.galleries)}

    @app.post(API_PREFIX + "/galleries", status_code=201)
    def create_gallery(body: dict):
        gid = body.get("id")
        if not gid:
            raise InvalidConfigError("gallery id is required")
        with state.lock:
            if gid in state.galleries:
                raise DuplicateIdError(f"gallery {gid!r} already exists")
            state.galleries[gid] = Gallery()
        return {"id": gid, "size": 0}

    @app.post(API_PREFIX + "/galleries/{gid}/records", status_code=201)
    def enroll_record(gid: str, body: dict):
        record = record_from_json(body)
        with state.lock:
            g = state.gallery(gid)
            state.galleries[gid] = enroll(g, record)
            version = state.galleries[gid].snapshot_version
        return {"enrolled": record.record_id, "snapshot_version": version}

    @app.post(API_PREFIX + "/galleries/{gid}/save")
    def save_gallery(gid: str):
        g = state.gallery(gid)
        path = os.path.join(state.config.data_dir, gid + ".gallery")
        gallery_mod.save(g, path)
        return {"path": path, "records": len(g)}

    @app.get(API_PREFIX + "/galleries/{gid}/records/{rid}/detections")
    def record_detections(gid: str, rid: str):
        g = state.gallery(gid)
        record = g.get(rid)
        if record is None:
            raise UnknownRecordError(f"no record {rid!r} in gallery {gid!r}")
        track = []
        track_key = (record.source.camera, record.source.track_id)
        if record.source.track_id is not None:
            track = state.detections.get(gid, {}).get(track_key, [])
        return {
            "record_id": rid,
            "camera": record.source.camera,
            "track_id": record.source.track_id,
            "detections": [detection_to_json(d) for d in track],
        }

    @app.post(API_PREFIX + "/galleries/{gid}/search")
    def run_search(gid: str, body: dict):
        g = state.gallery(gid)
        mode = body.get("mode", MODE_SHAPE)
        if mode not in SEARCH_MODES:
            raise InvalidConfigError(f"unknown search mode {mode!r}")
        k = int(body.get("k", 10))
        weights = None
        if body.get("weights") is not None:
            weights = FusionWeights.from_dict(body["weights"])
        elif mode == "fused":
            weights = state.default_weights or FusionWeights.plain_sum()

        probes = _resolve_probes(g, body)
        wanted_colour = body.get("wanted_colour")

        if wanted_colour is not None:
            if mode != MODE_SHAPE:
                raise UnknownColourLabelError(
                    "wanted_colour drives mix-mode, which needs a shape probe (mode 'shape')"
                )
            if len(probes) != 1:
                raise InvalidConfigError("mix-mode takes exactly one probe")
            cat = state.require_catalog()
            mm = mix_mode_search(g, probes[0], wanted_colour, cat, k=k)
            items = []
            for res in mm.results:
                item = _ranked_to_json(res)
                item["colour"] = _decision_to_json(mm.decisions[res.record_id])
                items.append(item)
            return {
                "mode": "mixmode",
                "wanted_colour": wanted_colour,
                "results": items,
                "diagnostics": {
                    "snapshot_version": g.snapshot_version,
                    "shape_candidates": mm.shape_candidates,
                    "excluded_no_colour_template": mm.excluded_no_colour_template,
                },
            }

        if len(probes) == 1:
            results = search(g, probes[0], mode=mode, k=k, weights=weights)
        else:
            results = multi_probe_search(g, probes, mode=mode, k=k, weights=weights)

        cat = state.catalog
        include_detections = bool(body.get("include_track_detections", False))
        items = []
        for res in results:
            item = _ranked_to_json(res)
            record = g.get(res.record_id)
            if cat is not None and record.colour_template is not None and record.colour_template.dim == cat.dim:
                item["colour"] = _decision_to_json(classify_colour(cat, record.colour_template))
            if include_detections:
                track_key = (record.source.camera, record.source.track_id)
                track = state.detections.get(gid, {}).get(track_key, []) if record.source.track_id else []
                item["detections"] = [detection_to_json(d) for d in track]
            items.append(item)
        return {
            "mode": mode,
            "results": items,
            "diagnostics": {
                "snapshot_version": g.snapshot_version,
                "probes": len(probes),
                "eligible_records": len(g._block(mode).record_ids),
                "total_records": len(g),
            },
        }

    @app.post(API_PREFIX + "/classify/colour")
    def classify(body: dict):
        payload = body.get("template")
        if not payload:
            raise FormatError("body must carry a base64 'template' payload")
        t = template_from_b64(payload)
        cat = state.require_catalog()
        return _decision_to_json(classify_colour(cat, t))

    @app.post(API_PREFIX + "/calibrate")
    def calibrate(body: dict):
        weights = calibrate_weights(
            [tuple(p) for p in body.get("genuine", [])],
            [tuple(p) for p in body.get("impostor", [])],
            operating_far=float(body.get("operating_far", 0.01)),
            grid_step=float(body.get("grid_step", 0.01)),
            calibration_set_id=body.get("calibration_set_id", ""),
        )
        return weights.as_dict()

    return app


def _resolve_probes(g: Gallery, body: dict) -> list:
    """A search body carries either an inline probe record or a probe_ids
    list referencing enrolled records (multi-probe)."""
    if body.get("probe") is not None and body.get("probe_ids"):
        raise InvalidConfigError("pass either 'probe' or 'probe_ids', not both")
    if body.get("probe") is not None:
        return [record_from_json(body["probe"])]
    probe_ids = body.get("probe_ids")
    if not probe_ids:
        raise InvalidConfigError("search body needs 'probe' or a non-empty 'probe_ids'")
    probes = []
    for rid in probe_ids:
        record = g.get(rid)
        if record is None:
            raise UnknownRecordError(f"probe_id {rid!r} is not enrolled")
        probes.append(record)
    return probes
