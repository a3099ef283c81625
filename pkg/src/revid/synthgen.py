"""Deterministic synthetic-embedding oracle standing in for the CNN feature
extractors.

The embedding model is deliberately simple: each fine-grained class gets a
unit prototype drawn uniformly on the sphere, each identity perturbs its
class prototype, each image perturbs its identity vector, and everything is
renormalized. Colour templates are drawn the same way around catalog
prototypes. Randomness comes from numpy's seeded PCG64 generator
(``np.random.default_rng``), so fixtures reproduce bit-exactly across
platforms. Generated values are rounded through float32 so records survive
serialization round trips unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .colourclass import ColourCatalog, default_catalog
from .errors import InvalidConfigError, IoError, MissingConfounderError
from .evaluation import DatasetManifest, SplitSpec
from .templates import FineGrainedClass, Modality, Source, VehicleRecord, unit_f32

_PERSPECTIVES = ("front", "rear", "side", "front-side")

# Colour frequency weights for the default 10-label catalog, mirroring the
# skew of real traffic (whites and greys dominate). Order follows
# DEFAULT_COLOUR_LABELS: black, white, grey, red, blue, green, yellow,
# orange, brown, beige.
DEFAULT_COLOUR_WEIGHTS = (3, 5, 3, 2, 2, 1, 1, 1, 1, 1)


@dataclass(frozen=True)
class Confounder:
    """Colour-label confusion: samples labelled ``label_a`` get colour
    templates blended toward ``label_b``'s prototype (probe side only)."""

    label_a: str
    label_b: str
    blend: float


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    dim_shape: int = 64
    dim_colour: int = 16
    n_classes: int = 40
    ids_per_class: int = 5
    images_per_id: int = 4
    intra_class_sigma: float = 0.20
    inter_id_sigma: float = 0.30
    colour_weights: tuple | None = None
    colour_catalog: ColourCatalog | None = None
    confounder: Confounder | None = None

    def catalog(self) -> ColourCatalog:
        return self.colour_catalog or default_catalog(self.dim_colour)

    def label_cycle(self) -> list:
        """Deterministic label assignment order: each catalog label repeated
        by its weight. Identities take labels round-robin from this cycle."""
        cat = self.catalog()
        weights = self.colour_weights
        if weights is None:
            weights = (
                DEFAULT_COLOUR_WEIGHTS
                if len(cat.labels) == len(DEFAULT_COLOUR_WEIGHTS)
                else (1,) * len(cat.labels)
            )
        if len(weights) != len(cat.labels):
            raise InvalidConfigError(
                f"{len(weights)} colour weights for {len(cat.labels)} labels"
            )
        if any((not isinstance(w, int)) or w < 1 for w in weights):
            raise InvalidConfigError("colour weights must be positive integers")
        cycle = []
        for label, w in zip(cat.labels, weights):
            cycle.extend([label] * w)
        return cycle

    def validate(self) -> None:
        if self.dim_shape < 1 or self.dim_colour < 1:
            raise InvalidConfigError("dims must be >= 1")
        if self.n_classes < 1 or self.ids_per_class < 1 or self.images_per_id < 1:
            raise InvalidConfigError("counts must be >= 1")
        for name in ("intra_class_sigma", "inter_id_sigma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise InvalidConfigError(f"{name} must be finite and >= 0")
        if self.confounder is not None:
            c = self.confounder
            cat = self.catalog()
            if not (0.0 <= c.blend <= 1.0):
                raise InvalidConfigError(f"confounder blend {c.blend!r} outside [0, 1]")
            for label in (c.label_a, c.label_b):
                if label not in cat:
                    raise InvalidConfigError(f"confounder label {label!r} not in catalog")
        if self.catalog().dim != self.dim_colour:
            raise InvalidConfigError(
                f"catalog dim {self.catalog().dim} != dim_colour {self.dim_colour}"
            )
        self.label_cycle()  # validates colour_weights


@dataclass
class Scenario:
    """Generated benchmark data: single-shot gallery, probes, and ground
    truth (probe record_id -> mate gallery record_id)."""

    config: SynthConfig
    gallery: list
    probes: list
    mates: dict
    colour_of: dict = field(default_factory=dict)  # record_id -> colour label

    def manifest(self, name: str = "synthetic") -> DatasetManifest:
        g_ids = {r.vehicle_id for r in self.gallery}
        p_ids = {r.vehicle_id for r in self.probes}
        return DatasetManifest(
            name=name,
            training=SplitSpec(ids=0, images=0),
            probe=SplitSpec(ids=len(p_ids), images=len(self.probes)),
            gallery=SplitSpec(ids=len(g_ids), images=len(self.gallery)),
        )


def generate(cfg: SynthConfig) -> Scenario:
    """Build a deterministic scenario for a config (same seed, same bits).

    One image per identity goes to the gallery (single-shot); the remaining
    ``images_per_id - 1`` become probes of that identity.
    """
    cfg.validate()
    cat = cfg.catalog()
    rng = np.random.default_rng(cfg.seed)
    proto_by_label = {label: proto.values for label, proto in zip(cat.labels, cat.prototypes)}
    label_cycle = cfg.label_cycle()

    gallery, probes, mates, colour_of = [], [], {}, {}
    identity_counter = 0
    for c in range(cfg.n_classes):
        class_proto = rng.standard_normal(cfg.dim_shape)
        class_proto /= np.linalg.norm(class_proto)
        fine = FineGrainedClass(
            make=f"make{c:03d}",
            model=f"model{c:03d}",
            released_year=str(2008 + c % 12),
            perspective=_PERSPECTIVES[c % len(_PERSPECTIVES)],
        )
        for i in range(cfg.ids_per_class):
            ivec = class_proto + cfg.inter_id_sigma * rng.standard_normal(cfg.dim_shape)
            ivec /= np.linalg.norm(ivec)
            label = label_cycle[identity_counter % len(label_cycle)]
            vid = f"v{c:03d}x{i:02d}"
            identity_counter += 1
            for j in range(cfg.images_per_id):
                shape_t = unit_f32(
                    Modality.SHAPE,
                    ivec + cfg.intra_class_sigma * rng.standard_normal(cfg.dim_shape),
                )
                colour_noise = cfg.intra_class_sigma * rng.standard_normal(cfg.dim_colour)
                base = proto_by_label[label]
                is_probe = j > 0
                conf = cfg.confounder
                if conf is not None and is_probe and label == conf.label_a:
                    base = (1.0 - conf.blend) * base + conf.blend * proto_by_label[conf.label_b]
                colour_t = unit_f32(Modality.COLOUR, base + colour_noise)
                record_id = f"{vid}-g" if j == 0 else f"{vid}-p{j}"
                record = VehicleRecord(
                    record_id=record_id,
                    vehicle_id=vid,
                    fine_class=fine,
                    colour_label=label,
                    shape_template=shape_t,
                    colour_template=colour_t,
                    source=Source(camera="synth-gallery" if j == 0 else "synth-probe"),
                )
                colour_of[record_id] = label
                if j == 0:
                    gallery.append(record)
                else:
                    probes.append(record)
                    mates[record_id] = f"{vid}-g"
    return Scenario(config=cfg, gallery=gallery, probes=probes, mates=mates, colour_of=colour_of)


def confounder_scenario(cfg: SynthConfig) -> Scenario:
    """Scenario with the configured colour confusion applied to probes.

    Pair it with ``generate(replace(cfg, confounder=None))``: both consume
    the random stream identically, so the two runs differ only in the
    blending.
    """
    if cfg.confounder is None:
        raise MissingConfounderError("config has no confounder block")
    return generate(cfg)


def baseline_for(cfg: SynthConfig) -> SynthConfig:
    """The confounder-free twin of a config (same seed and sizes)."""
    return replace(cfg, confounder=None)


def write_ground_truth(scenario: Scenario, path) -> None:
    """Dump ground truth: probe -> mate mapping plus colour labels."""
    doc = {
        "mates": scenario.mates,
        "colours": scenario.colour_of,
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, separators=(",", ":"), sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write ground truth {path}: {exc}") from exc
