import json

import pytest
from fastapi.testclient import TestClient

from revid.colourclass import classify_colour, default_catalog, mix_mode_search
from revid.config import ServiceConfig
from revid.gallery import Gallery, MODE_FUSED, MODE_SHAPE, multi_probe_search, search, save
from revid.ingest import Detection, write_detections
from revid.matching import FusionWeights, calibrate_weights
from revid.service import ServiceState, create_app
from revid.synthgen import SynthConfig, generate
from revid.templates import Modality, record_to_json, template_to_b64

from conftest import random_unit_template


@pytest.fixture(scope="module")
def scenario():
    return generate(SynthConfig(seed=31, n_classes=8, ids_per_class=2, images_per_id=3))


@pytest.fixture(scope="module")
def demo_state(scenario, tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("service-data")
    cfg = ServiceConfig(data_dir=str(data_dir))
    state = ServiceState(cfg)
    state.galleries["demo"] = Gallery.from_records(scenario.gallery)
    state.catalog = default_catalog(16)
    return state


@pytest.fixture(scope="module")
def client(demo_state):
    app = create_app(demo_state.config, state=demo_state)
    return TestClient(app)


class TestHealthAndErrors:
    def test_health(self, client):
        body = client.get("/v1/health").json()
        assert body["status"] == "ok"
        assert "demo" in body["galleries"]

    def test_unknown_gallery_404(self, client, scenario):
        resp = client.post(
            "/v1/galleries/nope/search",
            json={"probe": record_to_json(scenario.probes[0]), "mode": "shape", "k": 3},
        )
        assert resp.status_code == 404
        assert resp.json()["code"] == "UnknownGallery"

    def test_validation_400_with_code(self, client, scenario):
        probe = record_to_json(scenario.probes[0])
        resp = client.post(
            "/v1/galleries/demo/search",
            json={"probe": probe, "mode": "shape", "k": 3, "wanted_colour": "chartreuse"},
        )
        assert resp.status_code == 400
        assert resp.json()["code"] == "UnknownColourLabel"

    def test_duplicate_enroll_409(self, client, scenario):
        record = record_to_json(scenario.gallery[0])
        resp = client.post("/v1/galleries/demo/records", json=record)
        assert resp.status_code == 409
        assert resp.json()["code"] == "DuplicateId"


class TestWireParity:
    def test_search_parity(self, client, demo_state, scenario):
        g = demo_state.galleries["demo"]
        probe = scenario.probes[0]
        resp = client.post(
            "/v1/galleries/demo/search",
            json={"probe": record_to_json(probe), "mode": "shape", "k": 5},
        )
        assert resp.status_code == 200
        wire = resp.json()["results"]
        lib = search(g, probe, mode=MODE_SHAPE, k=5)
        assert [w["record_id"] for w in wire] == [r.record_id for r in lib]
        assert [w["score"] for w in wire] == [r.score for r in lib]
        assert [w["rank"] for w in wire] == [r.rank for r in lib]

    def test_fused_search_parity(self, client, demo_state, scenario):
        g = demo_state.galleries["demo"]
        probe = scenario.probes[1]
        weights = FusionWeights.weighted(0.8)
        resp = client.post(
            "/v1/galleries/demo/search",
            json={
                "probe": record_to_json(probe),
                "mode": "fused",
                "k": 4,
                "weights": weights.as_dict(),
            },
        )
        wire = resp.json()["results"]
        lib = search(g, probe, mode=MODE_FUSED, k=4, weights=weights)
        assert [(w["record_id"], w["score"]) for w in wire] == [
            (r.record_id, r.score) for r in lib
        ]
        assert [w["per_modality_scores"] for w in wire] == [r.per_modality_scores for r in lib]

    def test_multi_probe_parity(self, client, demo_state, scenario):
        g = demo_state.galleries["demo"]
        probe_ids = [r.record_id for r in scenario.gallery[:3]]
        resp = client.post(
            "/v1/galleries/demo/search",
            json={"probe_ids": probe_ids, "mode": "shape", "k": 6},
        )
        wire = resp.json()["results"]
        probes = [g.get(rid) for rid in probe_ids]
        lib = multi_probe_search(g, probes, mode=MODE_SHAPE, k=6)
        assert [(w["record_id"], w["score"], w["rank"]) for w in wire] == [
            (r.record_id, r.score, r.rank) for r in lib
        ]

    def test_mix_mode_parity_and_soundness(self, client, demo_state, scenario):
        g = demo_state.galleries["demo"]
        probe = scenario.probes[2]
        resp = client.post(
            "/v1/galleries/demo/search",
            json={
                "probe": record_to_json(probe),
                "mode": "shape",
                "k": 10,
                "wanted_colour": "white",
            },
        )
        body = resp.json()
        assert body["mode"] == "mixmode"
        cat = demo_state.catalog
        mm = mix_mode_search(g, probe, "white", cat, k=10)
        assert [(w["record_id"], w["score"]) for w in body["results"]] == [
            (r.record_id, r.score) for r in mm.results
        ]
        for item in body["results"]:
            assert item["colour"]["label"] == "white"
        assert (
            body["diagnostics"]["excluded_no_colour_template"]
            == mm.excluded_no_colour_template
        )

    def test_classify_parity(self, client, demo_state, rng):
        t = random_unit_template(rng, Modality.COLOUR, 16)
        resp = client.post("/v1/classify/colour", json={"template": template_to_b64(t)})
        wire = resp.json()
        lib = classify_colour(demo_state.catalog, t)
        assert wire == {
            "label": lib.label,
            "confidence": lib.confidence,
            "runner_up": lib.runner_up,
            "margin": lib.margin,
        }

    def test_calibrate_parity(self, client):
        genuine = [[0.9, 0.8], [0.8, 0.7], [0.85, 0.2]]
        impostor = [[0.2, 0.6], [0.1, 0.1], [0.3, 0.4]]
        resp = client.post(
            "/v1/calibrate",
            json={"genuine": genuine, "impostor": impostor, "operating_far": 0.2, "grid_step": 0.1},
        )
        wire = resp.json()
        lib = calibrate_weights(
            [tuple(p) for p in genuine],
            [tuple(p) for p in impostor],
            operating_far=0.2,
            grid_step=0.1,
        )
        assert wire["w_shape"] == lib.w_shape
        assert wire["w_colour"] == lib.w_colour
        assert wire["mode"] == lib.mode


class TestLifecycle:
    def test_create_enroll_search_save(self, tmp_path, rng, scenario):
        cfg = ServiceConfig(data_dir=str(tmp_path))
        state = ServiceState(cfg)
        client = TestClient(create_app(cfg, state=state))
        assert client.post("/v1/galleries", json={"id": "fresh"}).status_code == 201
        assert client.post("/v1/galleries", json={"id": "fresh"}).status_code == 409
        r = scenario.gallery[0]
        resp = client.post("/v1/galleries/fresh/records", json=record_to_json(r))
        assert resp.status_code == 201
        assert resp.json() == {"enrolled": r.record_id, "snapshot_version": 1}
        resp = client.post("/v1/galleries/fresh/save")
        assert resp.status_code == 200
        assert (tmp_path / "fresh.gallery").exists()

    def test_data_dir_loading_and_detections(self, tmp_path, rng, scenario):
        from revid.ingest import best_shot, detection_to_json

        tracks = {
            track_id: [
                Detection(
                    camera="cam2",
                    track_id=track_id,
                    frame_index=i,
                    quality=float(rng.random()),
                    shape_template=random_unit_template(rng, Modality.SHAPE, 64),
                )
                for i in range(5)
            ]
            for track_id in ("trk-1", "trk-2")
        }
        records = [best_shot(track) for track in tracks.values()]
        save(Gallery.from_records(records), tmp_path / "cam2.gallery")
        write_detections(
            tmp_path / "cam2.detections.jsonl",
            [d for track in tracks.values() for d in track],
        )
        cfg = ServiceConfig(data_dir=str(tmp_path))
        client = TestClient(create_app(cfg))
        assert "cam2" in client.get("/v1/health").json()["galleries"]

        resp = client.get(f"/v1/galleries/cam2/records/{records[0].record_id}/detections")
        assert resp.status_code == 200
        body = resp.json()
        assert body["track_id"] == "trk-1"
        assert body["detections"] == [detection_to_json(d) for d in tracks["trk-1"]]

        resp = client.get("/v1/galleries/cam2/records/nope/detections")
        assert resp.status_code == 404
        assert resp.json()["code"] == "UnknownRecord"

        # the same detections attach inline when the search asks for them
        probe = records[0]
        resp = client.post(
            "/v1/galleries/cam2/search",
            json={
                "probe": record_to_json(probe),
                "mode": "shape",
                "k": 2,
                "include_track_detections": True,
            },
        )
        assert resp.status_code == 200
        by_id = {item["record_id"]: item for item in resp.json()["results"]}
        assert by_id[records[0].record_id]["detections"] == [
            detection_to_json(d) for d in tracks["trk-1"]
        ]

    def test_shutdown_persists_galleries(self, tmp_path, scenario):
        cfg = ServiceConfig(data_dir=str(tmp_path))
        state = ServiceState(cfg)
        state.galleries["demo"] = Gallery.from_records(scenario.gallery)
        with TestClient(create_app(cfg, state=state)) as client:
            assert client.get("/v1/health").status_code == 200
        # leaving the client context triggers shutdown
        from revid.gallery import load

        persisted = load(tmp_path / "demo.gallery")
        assert persisted == state.galleries["demo"]
