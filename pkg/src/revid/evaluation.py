"""Verification (ROC: FAR/VR) and identification (CMC: Rank-k) metrics,
dataset-manifest validation, protocol runs, and report output.

Conventions, fixed for bit-reproducibility: a score counts as an accept at
threshold t when score >= t; thresholds are swept over the observed distinct
score values plus a +inf sentinel (step curves, no interpolation).
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    FormatError,
    InvalidRateError,
    IoError,
    ManifestViolationError,
    MateMissingError,
    MissingClassError,
    NonFiniteError,
)
from .gallery import Gallery, search
from .matching import FusionWeights

# Published benchmark results (Rank-1 / Rank-5, percent) shipped as a static
# comparison fixture for report rendering; never recomputed here.
COMPARISON_BASELINES = {
    "VehicleID": {
        "OIFE (single branch)": (32.86, 52.75),
        "Siamese-Visual": (36.83, 57.97),
        "MSVF": (63.02, 73.05),
        "shape-pretrained re-id (reference)": (65.82, 77.25),
    },
    "VRIC": {
        "OIFE (single branch)": (24.62, 50.98),
        "Siamese-Visual": (30.55, 57.30),
        "MSVF": (46.61, 65.58),
        "shape-pretrained re-id (reference)": (55.14, 75.13),
    },
}


@dataclass(frozen=True)
class ScoreSample:
    """One probe-gallery comparison: its score and whether the pair shares a
    vehicle identity."""

    score: float
    is_genuine: bool
    probe_id: str = ""
    gallery_id: str = ""


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    far: float
    vr: float


@dataclass(frozen=True)
class RocCurve:
    """(FAR, VR) step curve over decreasing thresholds, sorted by FAR
    ascending."""

    points: tuple

    def vr_at(self, far: float) -> float:
        """Best VR among operating points with FAR <= far."""
        feasible = [p.vr for p in self.points if p.far <= far]
        return max(feasible) if feasible else 0.0

    def as_rows(self) -> list:
        # the +inf sentinel threshold serializes as null (strict JSON)
        return [
            {
                "threshold": p.threshold if np.isfinite(p.threshold) else None,
                "far": p.far,
                "vr": p.vr,
            }
            for p in self.points
        ]


@dataclass(frozen=True)
class CmcCurve:
    """rank_rates[k-1] = fraction of probes whose true mate ranks <= k."""

    rank_rates: tuple
    n_probes: int

    def rank(self, k: int) -> float:
        return self.rank_rates[k - 1]

    @property
    def rank1(self) -> float:
        return self.rank_rates[0]

    @property
    def rank5(self) -> float:
        return self.rank_rates[4] if len(self.rank_rates) >= 5 else self.rank_rates[-1]


def compute_roc(samples) -> RocCurve:
    """ROC over genuine/impostor score samples.

    FAR(t) = fraction of impostor scores >= t; VR(t) = fraction of genuine
    scores >= t; t sweeps the distinct observed scores plus +inf.
    """
    genuine, impostor = [], []
    for s in samples:
        if not np.isfinite(s.score):
            raise NonFiniteError(f"sample score {s.score!r} is not finite")
        (genuine if s.is_genuine else impostor).append(s.score)
    if not genuine or not impostor:
        raise MissingClassError("ROC needs at least one genuine and one impostor sample")
    g = np.sort(np.asarray(genuine, dtype=np.float64))
    imp = np.sort(np.asarray(impostor, dtype=np.float64))
    thresholds = np.unique(np.concatenate([g, imp]))[::-1]  # descending
    fars = (imp.size - np.searchsorted(imp, thresholds, side="left")) / imp.size
    vrs = (g.size - np.searchsorted(g, thresholds, side="left")) / g.size
    points = [RocPoint(threshold=float("inf"), far=0.0, vr=0.0)]
    points.extend(
        RocPoint(threshold=float(t), far=float(f), vr=float(v))
        for t, f, v in zip(thresholds, fars, vrs)
    )
    return RocCurve(points=tuple(points))


def compute_cmc(outcomes, max_rank: int) -> CmcCurve:
    """CMC from per-probe ranked search outcomes.

    Each outcome is (probe_id, true_gallery_id, results) or
    (probe_id, true_gallery_id, results, truncated). A truncated result list
    is accepted only when the mate's rank is already determined: the mate is
    in the list, or the list already covers max_rank.
    """
    hits = np.zeros(max_rank, dtype=np.int64)
    n = 0
    for outcome in outcomes:
        if len(outcome) == 3:
            probe_id, true_id, results = outcome
            truncated = False
        else:
            probe_id, true_id, results, truncated = outcome
        n += 1
        mate_rank = None
        for res in results:
            if res.record_id == true_id:
                mate_rank = res.rank
                break
        if mate_rank is None:
            if not truncated:
                raise MateMissingError(
                    f"probe {probe_id!r}: mate {true_id!r} absent from an untruncated ranking"
                )
            if len(results) < max_rank:
                raise MateMissingError(
                    f"probe {probe_id!r}: truncated at {len(results)} < max_rank {max_rank}, "
                    f"mate rank undetermined"
                )
            continue  # mate beyond every queried rank
        if mate_rank <= max_rank:
            hits[mate_rank - 1] += 1
    if n == 0:
        raise MissingClassError("CMC needs at least one probe outcome")
    return CmcCurve(rank_rates=tuple(float(v) for v in np.cumsum(hits) / n), n_probes=n)


# -- dataset manifests


@dataclass(frozen=True)
class SplitSpec:
    """Declared size of one split: distinct identities and total images,
    plus an optional path to the record list backing it."""

    ids: int
    images: int
    records_path: str | None = None


@dataclass(frozen=True)
class DatasetManifest:
    """Declarative probe/gallery/training split description."""

    name: str
    training: SplitSpec
    probe: SplitSpec
    gallery: SplitSpec

    @property
    def single_shot(self) -> bool:
        return self.gallery.ids == self.gallery.images

    def as_dict(self) -> dict:
        def split(s: SplitSpec) -> dict:
            return {"ids": s.ids, "images": s.images, "records_path": s.records_path}

        return {
            "name": self.name,
            "training": split(self.training),
            "probe": split(self.probe),
            "gallery": split(self.gallery),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        def split(v: dict) -> SplitSpec:
            return SplitSpec(
                ids=int(v["ids"]),
                images=int(v["images"]),
                records_path=v.get("records_path"),
            )

        try:
            return cls(
                name=d["name"],
                training=split(d["training"]),
                probe=split(d["probe"]),
                gallery=split(d["gallery"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed manifest: {exc}") from exc


def load_manifest(path) -> DatasetManifest:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return DatasetManifest.from_dict(json.load(fh))
    except OSError as exc:
        raise IoError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"manifest is not valid JSON: {exc}") from exc


def _check_split(name: str, spec: SplitSpec, identities) -> None:
    ids = list(identities)
    if len(ids) != spec.images:
        raise ManifestViolationError(
            f"{name} split declares {spec.images} images but references {len(ids)} records"
        )
    if len(set(ids)) != spec.ids:
        raise ManifestViolationError(
            f"{name} split declares {spec.ids} identities but references {len(set(ids))}"
        )


def validate_manifest(
    manifest: DatasetManifest,
    gallery_identities,
    probe_identities,
    training_identities=None,
) -> None:
    """Check declared counts against the referenced records' identities.

    Each ``*_identities`` argument is the per-record vehicle_id sequence of
    the corresponding split. Single-shot galleries (ids == images) are
    thereby also checked for duplicate identities.
    """
    _check_split("gallery", manifest.gallery, gallery_identities)
    _check_split("probe", manifest.probe, probe_identities)
    if training_identities is not None:
        _check_split("training", manifest.training, training_identities)


# -- protocol run


@dataclass(frozen=True)
class ProtocolReport:
    protocol: str
    mode: str
    weights: FusionWeights | None
    cmc: CmcCurve
    roc: RocCurve

    @property
    def rank1(self) -> float:
        return self.cmc.rank1

    @property
    def rank5(self) -> float:
        return self.cmc.rank5


def run_protocol(
    manifest: DatasetManifest,
    g: Gallery,
    probes,
    mode: str = "shape",
    weights: FusionWeights | None = None,
    threads: int = 1,
) -> ProtocolReport:
    """Rank every probe against the gallery and reduce to CMC + ROC.

    The gallery must be the manifest's gallery split in single-shot form
    (exactly one record per identity); genuine/impostor labels come from
    vehicle_id equality. Probe order fixes the reduction order, so results
    are independent of ``threads``.
    """
    probes = list(probes)
    validate_manifest(
        manifest,
        [r.vehicle_id for r in g.records()],
        [p.vehicle_id for p in probes],
    )
    vids = [r.vehicle_id for r in g.records()]
    if len(set(vids)) != len(vids):
        raise ManifestViolationError("single-shot gallery has duplicate identities")
    mate_by_vid = {r.vehicle_id: r.record_id for r in g.records()}
    for p in probes:
        if p.vehicle_id not in mate_by_vid:
            raise MateMissingError(f"probe {p.record_id!r}: no gallery record for identity {p.vehicle_id!r}")

    k = len(g)

    def run_one(p):
        return search(g, p, mode=mode, k=k, weights=weights)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_results = list(pool.map(run_one, probes))
    else:
        all_results = [run_one(p) for p in probes]

    vid_of = {r.record_id: r.vehicle_id for r in g.records()}
    samples = []
    outcomes = []
    for p, results in zip(probes, all_results):
        for res in results:
            samples.append(
                ScoreSample(
                    score=res.score,
                    is_genuine=vid_of[res.record_id] == p.vehicle_id,
                    probe_id=p.record_id,
                    gallery_id=res.record_id,
                )
            )
        outcomes.append((p.record_id, mate_by_vid[p.vehicle_id], results))
    return ProtocolReport(
        protocol=manifest.name,
        mode=mode,
        weights=weights,
        cmc=compute_cmc(outcomes, max_rank=k),
        roc=compute_roc(samples),
    )


def error_reduction(baseline_rate_pct: float, new_rate_pct: float) -> float:
    """Relative error reduction, in percent, when accuracy moves from
    baseline_rate_pct to new_rate_pct (both in percent)."""
    for v in (baseline_rate_pct, new_rate_pct):
        if not (0.0 <= v <= 100.0):
            raise InvalidRateError(f"rate {v!r} outside [0, 100]")
    if baseline_rate_pct >= 100.0:
        raise InvalidRateError("baseline rate must be below 100")
    return 100.0 * (new_rate_pct - baseline_rate_pct) / (100.0 - baseline_rate_pct)


# -- report output


def report_to_dict(report: ProtocolReport) -> dict:
    """JSON-ready report with a fixed field order."""
    return {
        "protocol": report.protocol,
        "mode": report.mode,
        "weights": report.weights.as_dict() if report.weights else None,
        "rank1": report.rank1,
        "rank5": report.rank5,
        "cmc": list(report.cmc.rank_rates),
        "n_probes": report.cmc.n_probes,
        "roc": report.roc.as_rows(),
        "comparison_baselines": COMPARISON_BASELINES,
    }


def write_report(report: ProtocolReport, prefix) -> list:
    """Write ``<prefix>.json`` plus CSV curve points for any plotter:
    ``<prefix>_roc.csv`` and ``<prefix>_cmc.csv``. Returns the paths."""
    prefix = str(prefix)
    json_path = prefix + ".json"
    roc_path = prefix + "_roc.csv"
    cmc_path = prefix + "_cmc.csv"
    try:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(report_to_dict(report), fh, separators=(",", ":"))
            fh.write("\n")
        with open(roc_path, "w", encoding="utf-8") as fh:
            fh.write("threshold,far,vr\n")
            for p in report.roc.points:
                fh.write(f"{p.threshold!r},{p.far!r},{p.vr!r}\n")
        with open(cmc_path, "w", encoding="utf-8") as fh:
            fh.write("rank,rate\n")
            for i, rate in enumerate(report.cmc.rank_rates, start=1):
                fh.write(f"{i},{rate!r}\n")
    except OSError as exc:
        raise IoError(f"cannot write report files at {prefix}: {exc}") from exc
    return [json_path, roc_path, cmc_path]
