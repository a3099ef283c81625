"""Colour classification (nearest prototype on the unit sphere) and the
Mix-Mode search: rank by shape, then filter the ranking to one colour class.

The classifier is the application-time decision rule: the trained
classification layer is discarded and colour feature vectors are matched
against one unit prototype per colour class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyCatalogError,
    FormatError,
    InvariantViolationError,
    IoError,
    ModalityMismatchError,
    NotNormalizedError,
    UnknownColourLabelError,
)
from .gallery import Gallery, MODE_SHAPE, RankedResult, search
from .templates import (
    Modality,
    Template,
    VehicleRecord,
    template_from_b64,
    template_to_b64,
    unit_f32,
)

# Ten default colour classes. "silver" is deliberately absent: silver
# vehicles are labelled "grey", which under sunlight collides with "white"
# and inflates colour impostor scores. The set is configurable.
DEFAULT_COLOUR_LABELS = (
    "black",
    "white",
    "grey",
    "red",
    "blue",
    "green",
    "yellow",
    "orange",
    "brown",
    "beige",
)

CATALOG_VERSION = 1


@dataclass(frozen=True)
class ColourDecision:
    """Classification outcome: winning label, its cosine, and the margin to
    the runner-up (0 and empty runner_up for single-class catalogs)."""

    label: str
    confidence: float
    runner_up: str
    margin: float


class ColourCatalog:
    """Ordered set of colour classes, each with one unit-length prototype."""

    def __init__(self, classes):
        classes = list(classes)
        if not classes:
            raise EmptyCatalogError("colour catalog has no classes")
        labels = [label for label, _ in classes]
        if len(set(labels)) != len(labels):
            raise InvariantViolationError("catalog labels must be unique")
        dim = classes[0][1].dim
        for label, proto in classes:
            if proto.modality is not Modality.COLOUR:
                raise ModalityMismatchError(f"prototype {label!r} is not a colour template")
            if proto.dim != dim:
                raise DimensionMismatchError(
                    f"prototype {label!r} dim {proto.dim} != catalog dim {dim}"
                )
            if not proto.normalized:
                raise NotNormalizedError(f"prototype {label!r} is not unit length")
        self.labels: list[str] = labels
        self.prototypes: list[Template] = [proto for _, proto in classes]
        self.dim = dim
        self._matrix = np.ascontiguousarray(np.stack([p.values for p in self.prototypes]))

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self.labels


def default_catalog(dim: int = 16, seed: int = 0, labels=DEFAULT_COLOUR_LABELS) -> ColourCatalog:
    """Synthetic catalog with mutually orthogonal prototypes (QR of a seeded
    PCG64 Gaussian draw), for tests and generated scenarios. Needs
    dim >= len(labels)."""
    labels = list(labels)
    if dim < len(labels):
        raise InvariantViolationError(
            f"need dim >= {len(labels)} for orthogonal prototypes, got {dim}"
        )
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, len(labels))))
    classes = [
        (label, unit_f32(Modality.COLOUR, q[:, i])) for i, label in enumerate(labels)
    ]
    return ColourCatalog(classes)


def classify_colour(cat: ColourCatalog, t: Template) -> ColourDecision:
    """Nearest-prototype decision: label of the highest-cosine prototype.

    Ties break by catalog order. The margin is the gap to the best other
    class, so it is always >= 0.
    """
    if t.modality is not Modality.COLOUR:
        raise ModalityMismatchError(f"cannot colour-classify a {t.modality.value} template")
    if not t.normalized:
        raise NotNormalizedError("colour classification requires a unit-length template")
    if t.dim != cat.dim:
        raise DimensionMismatchError(f"template dim {t.dim} != catalog dim {cat.dim}")
    sims = np.einsum("ij,j->i", cat._matrix, t.values)
    win = int(np.argmax(sims))  # first max = catalog order tie-break
    confidence = float(sims[win])
    if len(cat) == 1:
        return ColourDecision(cat.labels[0], confidence, "", 0.0)
    rest = np.delete(sims, win)
    ru = int(np.argmax(rest))
    ru_idx = ru if ru < win else ru + 1
    return ColourDecision(
        label=cat.labels[win],
        confidence=confidence,
        runner_up=cat.labels[ru_idx],
        margin=confidence - float(sims[ru_idx]),
    )


@dataclass(frozen=True)
class MixModeResult:
    """Mix-Mode result envelope: the filtered ranking, the colour decision
    per kept record, and diagnostics about records that could not take part
    in the colour filter."""

    results: list
    decisions: dict
    wanted_colour: str
    shape_candidates: int
    excluded_no_colour_template: int


def mix_mode_search(
    g: Gallery,
    shape_probe: VehicleRecord,
    wanted_colour: str,
    cat: ColourCatalog,
    k: int = 10,
) -> MixModeResult:
    """Shape search filtered by colour classification.

    Runs the full ShapeOnly ranking, keeps the records whose classified
    colour equals ``wanted_colour`` (re-ranked 1..n, shape order preserved),
    and truncates to k. Records without a colour template are excluded and
    counted in the envelope.
    """
    if wanted_colour not in cat:
        raise UnknownColourLabelError(
            f"colour {wanted_colour!r} is not in the catalog {cat.labels}"
        )
    full = search(g, shape_probe, mode=MODE_SHAPE, k=max(len(g), 1))
    kept = []
    excluded = 0
    for res in full:
        record = g.get(res.record_id)
        if record.colour_template is None:
            excluded += 1
            continue
        decision = classify_colour(cat, record.colour_template)
        if decision.label == wanted_colour:
            kept.append((res, decision))
    kept = kept[:k]
    results = [
        RankedResult(
            record_id=res.record_id,
            score=res.score,
            per_modality_scores=dict(res.per_modality_scores),
            rank=pos,
        )
        for pos, (res, _) in enumerate(kept, start=1)
    ]
    return MixModeResult(
        results=results,
        decisions={res.record_id: decision for res, decision in kept},
        wanted_colour=wanted_colour,
        shape_candidates=len(full),
        excluded_no_colour_template=excluded,
    )


# -- catalog persistence


def save_catalog(cat: ColourCatalog, path) -> None:
    doc = {
        "version": CATALOG_VERSION,
        "labels": cat.labels,
        "dim": cat.dim,
        "prototypes": [template_to_b64(p) for p in cat.prototypes],
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, separators=(",", ":"))
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write catalog {path}: {exc}") from exc


def load_catalog(path) -> ColourCatalog:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read catalog {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"catalog is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != CATALOG_VERSION:
        raise FormatError(f"unsupported catalog version {doc.get('version')!r}")
    labels = doc.get("labels") or []
    protos = doc.get("prototypes") or []
    if len(labels) != len(protos):
        raise FormatError("labels and prototypes differ in length")
    return ColourCatalog(
        [(label, template_from_b64(payload)) for label, payload in zip(labels, protos)]
    )
