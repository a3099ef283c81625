"""Operator command line covering the full pipeline without the service.

Every subcommand is a thin wrapper over the library: no CLI-only logic
beyond argument parsing and formatting. All randomness is seed-flagged and
outputs are byte-deterministic (fixed field order, '.' decimal separator).
Data errors exit 1 with the library error code on stderr; usage errors
exit 2.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click

from . import gallery as gallery_mod
from .colourclass import default_catalog, load_catalog, mix_mode_search, save_catalog
from .config import load_config
from .errors import EngineError, FormatError
from .evaluation import load_manifest, run_protocol, write_report
from .gallery import Gallery, MODE_SHAPE, SEARCH_MODES, extend, multi_probe_search, search
from .ingest import (
    best_shot,
    group_tracks,
    load_detections,
    load_embedding_set,
    write_records,
)
from .matching import calibrate_weights, FusionWeights
from .synthgen import Confounder, SynthConfig, generate, write_ground_truth
from .templates import record_from_json


def engine_errors_to_exit_code(fn):
    """Map EngineError to exit 1 with the error code name on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EngineError as exc:
            click.echo(f"{exc.code}: {exc.message}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
def main():
    """Vehicle re-identification search engine."""


def _load_weights(path) -> FusionWeights | None:
    if path is None:
        return None
    with open(path, "r", encoding="utf-8") as fh:
        return FusionWeights.from_dict(json.load(fh))


def _load_probes(path):
    """A probe file is either one record as a JSON object or JSON-lines."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
        if isinstance(doc, dict):
            return [record_from_json(doc)]
    except json.JSONDecodeError:
        pass
    return load_embedding_set(path)


@main.command()
@click.option("--seed", type=int, required=True, help="Generator seed (PCG64).")
@click.option("--out", "out_dir", type=click.Path(), required=True, help="Output directory.")
@click.option("--classes", type=int, default=40, show_default=True)
@click.option("--ids-per-class", type=int, default=5, show_default=True)
@click.option("--images-per-id", type=int, default=4, show_default=True)
@click.option("--dim-shape", type=int, default=64, show_default=True)
@click.option("--dim-colour", type=int, default=16, show_default=True)
@click.option("--intra-sigma", type=float, default=0.20, show_default=True)
@click.option("--inter-sigma", type=float, default=0.30, show_default=True)
@click.option("--confounder-blend", type=float, default=None,
              help="Blend grey probes toward the white prototype by this factor.")
@click.option("--confounder-from", default="grey", show_default=True)
@click.option("--confounder-to", default="white", show_default=True)
@engine_errors_to_exit_code
def gen(seed, out_dir, classes, ids_per_class, images_per_id, dim_shape, dim_colour,
        intra_sigma, inter_sigma, confounder_blend, confounder_from, confounder_to):
    """Generate a synthetic benchmark scenario (gallery, probes, truth)."""
    confounder = None
    if confounder_blend is not None:
        confounder = Confounder(confounder_from, confounder_to, confounder_blend)
    cfg = SynthConfig(
        seed=seed,
        dim_shape=dim_shape,
        dim_colour=dim_colour,
        n_classes=classes,
        ids_per_class=ids_per_class,
        images_per_id=images_per_id,
        intra_class_sigma=intra_sigma,
        inter_id_sigma=inter_sigma,
        confounder=confounder,
    )
    scenario = generate(cfg)
    os.makedirs(out_dir, exist_ok=True)
    gallery_path = os.path.join(out_dir, "gallery.jsonl")
    probes_path = os.path.join(out_dir, "probes.jsonl")
    write_records(gallery_path, scenario.gallery)
    write_records(probes_path, scenario.probes)
    write_ground_truth(scenario, os.path.join(out_dir, "truth.json"))
    save_catalog(cfg.catalog(), os.path.join(out_dir, "catalog.json"))
    manifest = scenario.manifest(name=f"synthetic-seed{seed}")
    doc = manifest.as_dict()
    doc["gallery"]["records_path"] = "gallery.jsonl"
    doc["probe"]["records_path"] = "probes.jsonl"
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")
    click.echo(
        f"generated {len(scenario.gallery)} gallery / {len(scenario.probes)} probe records in {out_dir}"
    )


@main.command()
@click.option("--gallery", "gallery_path", type=click.Path(), required=True,
              help="Gallery file (created if absent).")
@click.option("--records", "records_path", type=click.Path(exists=True), required=True,
              help="JSON-lines records to enroll.")
@engine_errors_to_exit_code
def enroll(gallery_path, records_path):
    """Enroll records from a JSON-lines file into a gallery file."""
    g = gallery_mod.load(gallery_path) if os.path.exists(gallery_path) else Gallery()
    records = load_embedding_set(records_path)
    g = extend(g, records)
    gallery_mod.save(g, gallery_path)
    click.echo(f"enrolled {len(records)} records; gallery now holds {len(g)}")


def _print_results(results):
    click.echo("rank\trecord_id\tscore")
    for r in results:
        click.echo(f"{r.rank}\t{r.record_id}\t{r.score!r}")


@main.command(name="search")
@click.option("--gallery", "gallery_path", type=click.Path(exists=True), required=True)
@click.option("--probe", "probe_path", type=click.Path(exists=True), required=True,
              help="Probe record: JSON object or JSON-lines file.")
@click.option("--mode", type=click.Choice(SEARCH_MODES), default=MODE_SHAPE, show_default=True)
@click.option("--k", type=int, default=10, show_default=True)
@click.option("--weights", "weights_path", type=click.Path(exists=True), default=None,
              help="FusionWeights JSON (fused mode).")
@click.option("--multi-probe", is_flag=True, help="Use every probe in the file, max-fused.")
@engine_errors_to_exit_code
def search_cmd(gallery_path, probe_path, mode, k, weights_path, multi_probe):
    """Top-k search of a gallery file."""
    g = gallery_mod.load(gallery_path)
    probes = _load_probes(probe_path)
    weights = _load_weights(weights_path)
    if weights is None and mode == "fused":
        weights = FusionWeights.plain_sum()
    if multi_probe:
        results = multi_probe_search(g, probes, mode=mode, k=k, weights=weights)
    else:
        results = search(g, probes[0], mode=mode, k=k, weights=weights)
    _print_results(results)


@main.command()
@click.option("--gallery", "gallery_path", type=click.Path(exists=True), required=True)
@click.option("--probe", "probe_path", type=click.Path(exists=True), required=True)
@click.option("--colour", required=True, help="Wanted colour label.")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None,
              help="Colour catalog JSON (defaults to the built-in synthetic catalog).")
@click.option("--k", type=int, default=10, show_default=True)
@engine_errors_to_exit_code
def mixmode(gallery_path, probe_path, colour, catalog_path, k):
    """Shape search filtered to one colour class."""
    g = gallery_mod.load(gallery_path)
    probe = _load_probes(probe_path)[0]
    cat = load_catalog(catalog_path) if catalog_path else default_catalog()
    mm = mix_mode_search(g, probe, colour, cat, k=k)
    _print_results(mm.results)
    click.echo(
        f"# wanted={mm.wanted_colour} shape_candidates={mm.shape_candidates} "
        f"excluded_no_colour_template={mm.excluded_no_colour_template}"
    )


@main.command()
@click.option("--pairs", "pairs_path", type=click.Path(exists=True), required=True,
              help='JSON {"genuine": [[shape, colour], ...], "impostor": [...]}')
@click.option("--far", type=float, default=0.01, show_default=True)
@click.option("--step", type=float, default=0.01, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write FusionWeights JSON here (default: stdout).")
@click.option("--set-id", default="", help="Calibration set identifier for the metadata.")
@engine_errors_to_exit_code
def calibrate(pairs_path, far, step, out_path, set_id):
    """Grid-search fusion weights on a calibration score set."""
    try:
        with open(pairs_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"pairs file is not valid JSON: {exc}") from exc
    weights = calibrate_weights(
        [tuple(p) for p in doc.get("genuine", [])],
        [tuple(p) for p in doc.get("impostor", [])],
        operating_far=far,
        grid_step=step,
        calibration_set_id=set_id,
    )
    payload = json.dumps(weights.as_dict(), separators=(",", ":"))
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        click.echo(f"w_shape={weights.w_shape!r} w_colour={weights.w_colour!r} -> {out_path}")
    else:
        click.echo(payload)


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--mode", type=click.Choice(SEARCH_MODES), default=MODE_SHAPE, show_default=True)
@click.option("--weights", "weights_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_prefix", type=click.Path(), required=True,
              help="Report prefix; writes <prefix>.json, <prefix>_roc.csv, <prefix>_cmc.csv.")
@click.option("--far", type=float, default=0.01, show_default=True,
              help="Operating FAR for the printed VR summary.")
@click.option("--threads", type=int, default=1, show_default=True)
@engine_errors_to_exit_code
def evaluate(manifest_path, mode, weights_path, out_prefix, far, threads):
    """Run the manifest's protocol: one search per probe, CMC + ROC out."""
    manifest = load_manifest(manifest_path)
    base = os.path.dirname(os.path.abspath(manifest_path))

    def resolve(records_path):
        if records_path is None:
            raise FormatError("manifest split has no records_path")
        p = records_path if os.path.isabs(records_path) else os.path.join(base, records_path)
        return load_embedding_set(p)

    gallery_records = resolve(manifest.gallery.records_path)
    probes = resolve(manifest.probe.records_path)
    g = Gallery.from_records(gallery_records)
    weights = _load_weights(weights_path)
    if weights is None and mode == "fused":
        weights = FusionWeights.plain_sum()
    report = run_protocol(manifest, g, probes, mode=mode, weights=weights, threads=threads)
    paths = write_report(report, out_prefix)
    click.echo(f"Rank-1 {report.rank1!r}")
    click.echo(f"Rank-5 {report.rank5!r}")
    click.echo(f"VR@FAR={far!r} {report.roc.vr_at(far)!r}")
    click.echo("wrote " + " ".join(paths))


@main.command()
@click.option("--detections", "detections_path", type=click.Path(exists=True), required=True,
              help="JSON-lines detection stream.")
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Best-shot records (JSON-lines), one per track.")
@engine_errors_to_exit_code
def bestshot(detections_path, out_path):
    """Reduce a detection stream to one best-shot record per track."""
    stream = load_detections(detections_path)
    tracks = group_tracks(stream)
    records = [best_shot(track) for track in tracks.values()]
    write_records(out_path, records)
    click.echo(f"{len(stream)} detections -> {len(records)} best-shots")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--data-dir", default=None)
@engine_errors_to_exit_code
def serve(config_path, host, port, data_dir):
    """Run the HTTP search service."""
    import uvicorn

    from .service import create_app

    cfg = load_config(config_path)
    if host:
        cfg.host = host
    if port:
        cfg.port = port
    if data_dir:
        cfg.data_dir = data_dir
    app = create_app(cfg)
    uvicorn.run(app, host=cfg.host, port=cfg.port)


if __name__ == "__main__":
    main()
