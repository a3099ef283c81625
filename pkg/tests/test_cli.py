import json

import pytest
from click.testing import CliRunner

from revid.cli import main
from revid.gallery import MODE_SHAPE, load, search
from revid.ingest import load_embedding_set, write_detections
from revid.templates import Modality

from conftest import random_unit_template


@pytest.fixture
def runner():
    return CliRunner()


def gen_scenario(runner, out_dir, seed=7, extra=()):
    args = [
        "gen", "--seed", str(seed), "--out", str(out_dir),
        "--classes", "6", "--ids-per-class", "2", "--images-per-id", "3",
    ] + list(extra)
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return out_dir


class TestGen:
    def test_outputs_exist(self, runner, tmp_path):
        out = gen_scenario(runner, tmp_path / "run")
        for name in ("gallery.jsonl", "probes.jsonl", "truth.json", "catalog.json", "manifest.json"):
            assert (out / name).exists()

    def test_byte_determinism(self, runner, tmp_path):
        a = gen_scenario(runner, tmp_path / "a")
        b = gen_scenario(runner, tmp_path / "b")
        for name in ("gallery.jsonl", "probes.jsonl", "truth.json", "catalog.json", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_different_seed_differs(self, runner, tmp_path):
        a = gen_scenario(runner, tmp_path / "a", seed=1)
        b = gen_scenario(runner, tmp_path / "b", seed=2)
        assert (a / "gallery.jsonl").read_bytes() != (b / "gallery.jsonl").read_bytes()


class TestEnrollAndSearch:
    def test_enroll_then_search_parity(self, runner, tmp_path):
        out = gen_scenario(runner, tmp_path / "run")
        gallery_file = out / "demo.gallery"
        result = runner.invoke(
            main, ["enroll", "--gallery", str(gallery_file), "--records", str(out / "gallery.jsonl")]
        )
        assert result.exit_code == 0, result.output

        result = runner.invoke(
            main,
            ["search", "--gallery", str(gallery_file), "--probe", str(out / "probes.jsonl"), "--k", "3"],
        )
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert lines[0] == "rank\trecord_id\tscore"
        # parity with the library on the same snapshot
        g = load(gallery_file)
        probe = load_embedding_set(out / "probes.jsonl")[0]
        lib = search(g, probe, mode=MODE_SHAPE, k=3)
        expected = [f"{r.rank}\t{r.record_id}\t{r.score!r}" for r in lib]
        assert lines[1:] == expected

    def test_duplicate_enroll_exits_1_with_code(self, runner, tmp_path):
        out = gen_scenario(runner, tmp_path / "run")
        gallery_file = out / "demo.gallery"
        for expected_code in (0, 1):
            result = runner.invoke(
                main,
                ["enroll", "--gallery", str(gallery_file), "--records", str(out / "gallery.jsonl")],
            )
            assert result.exit_code == expected_code
        assert "DuplicateId" in result.output

    def test_usage_error_exits_2(self, runner):
        result = runner.invoke(main, ["search", "--gallery", "/nonexistent"])
        assert result.exit_code == 2


class TestMixmode:
    def test_mixmode_counts_match_service_semantics(self, runner, tmp_path):
        out = gen_scenario(runner, tmp_path / "run")
        gallery_file = out / "demo.gallery"
        runner.invoke(main, ["enroll", "--gallery", str(gallery_file), "--records", str(out / "gallery.jsonl")])
        result = runner.invoke(
            main,
            [
                "mixmode", "--gallery", str(gallery_file), "--probe", str(out / "probes.jsonl"),
                "--colour", "white", "--catalog", str(out / "catalog.json"), "--k", "5",
            ],
        )
        assert result.exit_code == 0, result.output
        from revid.colourclass import load_catalog, mix_mode_search

        g = load(gallery_file)
        probe = load_embedding_set(out / "probes.jsonl")[0]
        mm = mix_mode_search(g, probe, "white", load_catalog(out / "catalog.json"), k=5)
        body = result.output.strip().splitlines()
        assert len(body) == 1 + len(mm.results) + 1  # header + rows + diagnostics
        assert f"excluded_no_colour_template={mm.excluded_no_colour_template}" in body[-1]

    def test_unknown_colour_exits_1(self, runner, tmp_path):
        out = gen_scenario(runner, tmp_path / "run")
        gallery_file = out / "demo.gallery"
        runner.invoke(main, ["enroll", "--gallery", str(gallery_file), "--records", str(out / "gallery.jsonl")])
        result = runner.invoke(
            main,
            [
                "mixmode", "--gallery", str(gallery_file), "--probe", str(out / "probes.jsonl"),
                "--colour", "polkadot", "--catalog", str(out / "catalog.json"),
            ],
        )
        assert result.exit_code == 1
        assert "UnknownColourLabel" in result.output


class TestCalibrate:
    def test_calibrate_writes_weights(self, runner, tmp_path):
        pairs = {
            "genuine": [[0.9, 0.8], [0.8, 0.75], [0.7, 0.9]],
            "impostor": [[0.1, 0.3], [0.2, 0.1], [0.0, 0.2]],
        }
        pairs_path = tmp_path / "pairs.json"
        pairs_path.write_text(json.dumps(pairs))
        out_path = tmp_path / "weights.json"
        result = runner.invoke(
            main,
            ["calibrate", "--pairs", str(pairs_path), "--far", "0.1", "--step", "0.1",
             "--out", str(out_path), "--set-id", "demo"],
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(out_path.read_text())
        assert doc["mode"] == "weighted_sum"
        assert doc["calibration"]["calibration_set_id"] == "demo"
        assert doc["w_shape"] + doc["w_colour"] == pytest.approx(1.0)


class TestEvaluate:
    def test_report_determinism_and_summary(self, runner, tmp_path):
        out = gen_scenario(runner, tmp_path / "run")
        reports = []
        for sub, threads in (("r1", "1"), ("r2", "4")):
            result = runner.invoke(
                main,
                ["evaluate", "--manifest", str(out / "manifest.json"),
                 "--out", str(tmp_path / sub), "--threads", threads],
            )
            assert result.exit_code == 0, result.output
            assert "Rank-1 " in result.output and "Rank-5 " in result.output
            assert "VR@FAR=" in result.output
            reports.append((tmp_path / f"{sub}.json").read_bytes())
        assert reports[0] == reports[1]

    def test_zero_noise_rank1_printed(self, runner, tmp_path):
        out = tmp_path / "zero"
        result = runner.invoke(
            main,
            ["gen", "--seed", "3", "--out", str(out), "--classes", "5", "--ids-per-class", "2",
             "--images-per-id", "2", "--intra-sigma", "0.0", "--inter-sigma", "0.4"],
        )
        assert result.exit_code == 0, result.output
        result = runner.invoke(
            main, ["evaluate", "--manifest", str(out / "manifest.json"), "--out", str(out / "rep")]
        )
        assert result.exit_code == 0, result.output
        assert "Rank-1 1.0" in result.output


class TestBestshot:
    def test_stream_to_records(self, runner, tmp_path, rng):
        from revid.ingest import Detection

        stream = []
        for track in ("t1", "t2", "t3"):
            for i in range(4):
                stream.append(
                    Detection(
                        camera="cam4",
                        track_id=track,
                        frame_index=i,
                        quality=float(rng.random()),
                        shape_template=random_unit_template(rng, Modality.SHAPE, 16),
                    )
                )
        det_path = tmp_path / "stream.jsonl"
        write_detections(det_path, stream)
        out_path = tmp_path / "bestshots.jsonl"
        result = runner.invoke(main, ["bestshot", "--detections", str(det_path), "--out", str(out_path)])
        assert result.exit_code == 0, result.output
        assert "12 detections -> 3 best-shots" in result.output
        records = load_embedding_set(out_path)
        assert [r.record_id for r in records] == ["cam4:t1", "cam4:t2", "cam4:t3"]
