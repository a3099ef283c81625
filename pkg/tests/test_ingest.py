import pytest

from revid.errors import EmptyTrackError, FormatError, InvariantViolationError, IoError, MixedTrackError
from revid.ingest import (
    Detection,
    best_shot,
    group_tracks,
    load_detections,
    load_embedding_set,
    write_detections,
    write_records,
)
from revid.templates import Modality

from conftest import random_unit_template
from oracles import brute_best_shot


def det(rng, frame, quality, track="t1", camera="cam2"):
    return Detection(
        camera=camera,
        track_id=track,
        frame_index=frame,
        quality=quality,
        shape_template=random_unit_template(rng, Modality.SHAPE, 16),
        colour_template=random_unit_template(rng, Modality.COLOUR, 8),
    )


class TestBestShot:
    def test_max_quality_wins(self, rng):
        track = [det(rng, 0, 0.2), det(rng, 1, 0.9), det(rng, 2, 0.5)]
        record = best_shot(track)
        assert record.source.frame_index == 1
        assert record.shape_template == track[1].shape_template

    def test_tie_breaks_to_earliest_frame(self, rng):
        track = [det(rng, 5, 0.7), det(rng, 2, 0.7), det(rng, 9, 0.7)]
        assert best_shot(track).source.frame_index == 2

    def test_empty_track(self):
        with pytest.raises(EmptyTrackError):
            best_shot([])

    def test_mixed_track(self, rng):
        with pytest.raises(MixedTrackError):
            best_shot([det(rng, 0, 0.5, track="a"), det(rng, 1, 0.5, track="b")])
        with pytest.raises(MixedTrackError):
            best_shot([det(rng, 0, 0.5, camera="cam2"), det(rng, 1, 0.5, camera="cam4")])

    def test_output_is_member_of_track(self, rng):
        track = [det(rng, i, float(q)) for i, q in enumerate(rng.random(50))]
        record = best_shot(track)
        assert any(
            d.frame_index == record.source.frame_index
            and d.shape_template == record.shape_template
            for d in track
        )

    def test_permutation_invariant(self, rng):
        track = [det(rng, i, float(q)) for i, q in enumerate(rng.random(30))]
        base = best_shot(track)
        for _ in range(5):
            perm = list(track)
            rng.shuffle(perm)
            assert best_shot(perm) == base

    def test_large_track_matches_brute_scan(self, rng):
        qualities = rng.integers(0, 500, size=10_000) / 500.0
        track = [det(rng, i, float(q)) for i, q in enumerate(qualities)]
        record = best_shot(track)
        expected = brute_best_shot(track)
        assert record.source.frame_index == expected.frame_index

    def test_quality_validation(self, rng):
        with pytest.raises(InvariantViolationError):
            det(rng, 0, -0.5)
        with pytest.raises(InvariantViolationError):
            det(rng, 0, float("nan"))


class TestEmbeddingSet:
    def test_load_33_controlled_records(self, rng, tmp_path):
        from revid.templates import Source, VehicleRecord

        records = [
            VehicleRecord(
                record_id=f"web{i:02d}",
                vehicle_id=f"v{i}",
                shape_template=random_unit_template(rng, Modality.SHAPE, 16),
                source=Source(camera="web"),
            )
            for i in range(33)
        ]
        path = tmp_path / "controlled.jsonl"
        write_records(path, records)
        loaded = load_embedding_set(path)
        assert len(loaded) == 33
        assert loaded == records

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert load_embedding_set(path) == []

    def test_malformed_line_names_line_number(self, rng, tmp_path):
        from revid.templates import record_to_json, Source, VehicleRecord
        import json

        good = VehicleRecord(
            record_id="ok",
            shape_template=random_unit_template(rng, Modality.SHAPE, 8),
            source=Source(camera="web"),
        )
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(record_to_json(good)) + "\n{broken\n")
        with pytest.raises(FormatError, match="line 2"):
            load_embedding_set(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_embedding_set(tmp_path / "nope.jsonl")


class TestDetectionStream:
    def test_round_trip(self, rng, tmp_path):
        stream = [det(rng, i, float(i) / 10, track=f"t{i % 3}") for i in range(9)]
        path = tmp_path / "detections.jsonl"
        write_detections(path, stream)
        assert load_detections(path) == stream

    def test_group_tracks(self, rng):
        stream = [det(rng, i, 0.5, track=f"t{i % 3}") for i in range(9)]
        tracks = group_tracks(stream)
        assert len(tracks) == 3
        assert all(len(v) == 3 for v in tracks.values())
