"""Vehicle re-identification matching and search engine.

Unit-length feature templates (shape and colour modalities), cosine
matching, score-level fusion with grid-calibrated weights, multi-probe max
fusion, Mix-Mode (shape search filtered by colour classification), a
deterministic synthetic-embedding oracle, ROC/CMC evaluation, an HTTP search
service, and an operator CLI.
"""

from .colourclass import (
    DEFAULT_COLOUR_LABELS,
    ColourCatalog,
    ColourDecision,
    MixModeResult,
    classify_colour,
    default_catalog,
    load_catalog,
    mix_mode_search,
    save_catalog,
)
from .errors import EngineError
from .evaluation import (
    CmcCurve,
    DatasetManifest,
    ProtocolReport,
    RocCurve,
    ScoreSample,
    SplitSpec,
    compute_cmc,
    compute_roc,
    error_reduction,
    run_protocol,
    validate_manifest,
)
from .gallery import (
    Gallery,
    MODE_COLOUR,
    MODE_FUSED,
    MODE_SHAPE,
    RankedResult,
    enroll,
    extend,
    multi_probe_search,
    search,
)
from .gallery import load as load_gallery
from .gallery import save as save_gallery
from .ingest import Detection, best_shot, load_detections, load_embedding_set, write_records
from .matching import (
    CalibrationInfo,
    FusionWeights,
    MatchScore,
    calibrate_weights,
    cosine_match,
    fuse,
    multi_probe_score,
    vr_at_far,
)
from .synthgen import Confounder, Scenario, SynthConfig, confounder_scenario, generate
from .templates import (
    FineGrainedClass,
    Modality,
    Source,
    Template,
    VehicleRecord,
    decode_template,
    encode_template,
    normalize,
    record_from_json,
    record_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "CalibrationInfo",
    "CmcCurve",
    "ColourCatalog",
    "ColourDecision",
    "Confounder",
    "DEFAULT_COLOUR_LABELS",
    "DatasetManifest",
    "Detection",
    "EngineError",
    "FineGrainedClass",
    "FusionWeights",
    "Gallery",
    "MODE_COLOUR",
    "MODE_FUSED",
    "MODE_SHAPE",
    "MatchScore",
    "MixModeResult",
    "Modality",
    "ProtocolReport",
    "RankedResult",
    "RocCurve",
    "Scenario",
    "ScoreSample",
    "Source",
    "SplitSpec",
    "SynthConfig",
    "Template",
    "VehicleRecord",
    "best_shot",
    "calibrate_weights",
    "classify_colour",
    "compute_cmc",
    "compute_roc",
    "confounder_scenario",
    "cosine_match",
    "decode_template",
    "default_catalog",
    "encode_template",
    "enroll",
    "error_reduction",
    "extend",
    "fuse",
    "generate",
    "load_catalog",
    "load_detections",
    "load_embedding_set",
    "load_gallery",
    "mix_mode_search",
    "multi_probe_score",
    "multi_probe_search",
    "normalize",
    "record_from_json",
    "record_to_json",
    "run_protocol",
    "save_catalog",
    "save_gallery",
    "search",
    "validate_manifest",
    "vr_at_far",
    "write_records",
]
