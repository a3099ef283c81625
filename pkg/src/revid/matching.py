"""Cosine matching, score-level fusion, weight calibration, multi-probe fusion.

All dot products in the engine go through ``np.einsum`` on C-contiguous
float64 arrays: the vector-vector form used here is bit-identical to the
matrix-vector form used by the gallery scan, einsum accumulates in 64-bit,
and it stays single-threaded, which keeps results independent of thread
count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyCalibrationSetError,
    EmptyProbeSetError,
    InvalidFarError,
    InvariantViolationError,
    ModalityMismatchError,
    NonFiniteError,
    NotNormalizedError,
)
from .templates import Modality, Template

WEIGHTED_SUM = "weighted_sum"
PLAIN_SUM = "plain_sum"

FUSED = "fused"

DEFAULT_OPERATING_FAR = 0.01
DEFAULT_GRID_STEP = 0.01


def dot(a: np.ndarray, b: np.ndarray) -> float:
    """Canonical 64-bit dot product (engine-wide primitive)."""
    return float(np.einsum("i,i->", a, b))


@dataclass(frozen=True)
class MatchScore:
    """Cosine score of one template pair; ``modality`` is 'shape', 'colour',
    or 'fused'."""

    value: float
    modality: str


@dataclass(frozen=True)
class CalibrationInfo:
    objective: str
    operating_far: float
    calibration_set_id: str

    def as_dict(self) -> dict:
        return {
            "objective": self.objective,
            "operating_far": self.operating_far,
            "calibration_set_id": self.calibration_set_id,
        }


@dataclass(frozen=True)
class FusionWeights:
    """Per-modality weights for score-level fusion.

    ``weighted_sum`` mode requires w_shape + w_colour = 1; ``plain_sum`` is
    the both-weights-one variant used when score distributions already agree.
    """

    w_shape: float
    w_colour: float
    mode: str = WEIGHTED_SUM
    calibration: CalibrationInfo | None = None

    def __post_init__(self):
        if self.mode not in (WEIGHTED_SUM, PLAIN_SUM):
            raise InvariantViolationError(f"unknown fusion mode {self.mode!r}")
        if not (math.isfinite(self.w_shape) and math.isfinite(self.w_colour)):
            raise NonFiniteError("fusion weights must be finite")
        if self.mode == WEIGHTED_SUM:
            if not (0.0 <= self.w_shape <= 1.0 and 0.0 <= self.w_colour <= 1.0):
                raise InvariantViolationError(
                    f"weights out of range: ({self.w_shape}, {self.w_colour})"
                )
            if abs(self.w_shape + self.w_colour - 1.0) > 1e-9:
                raise InvariantViolationError(
                    f"weighted_sum weights must sum to 1, got {self.w_shape + self.w_colour!r}"
                )
        else:
            if self.w_shape != 1.0 or self.w_colour != 1.0:
                raise InvariantViolationError("plain_sum mode fixes both weights at 1")

    @classmethod
    def plain_sum(cls) -> "FusionWeights":
        return cls(1.0, 1.0, mode=PLAIN_SUM)

    @classmethod
    def weighted(cls, w_shape: float, calibration: CalibrationInfo | None = None) -> "FusionWeights":
        return cls(w_shape, 1.0 - w_shape, mode=WEIGHTED_SUM, calibration=calibration)

    def as_dict(self) -> dict:
        return {
            "w_shape": self.w_shape,
            "w_colour": self.w_colour,
            "mode": self.mode,
            "calibration": self.calibration.as_dict() if self.calibration else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FusionWeights":
        cal = d.get("calibration")
        return cls(
            w_shape=float(d["w_shape"]),
            w_colour=float(d["w_colour"]),
            mode=d.get("mode", WEIGHTED_SUM),
            calibration=CalibrationInfo(
                objective=cal["objective"],
                operating_far=float(cal["operating_far"]),
                calibration_set_id=cal.get("calibration_set_id", ""),
            )
            if cal
            else None,
        )


def cosine_match(a: Template, b: Template) -> MatchScore:
    """Cosine of the angle between two unit templates (their dot product).

    Both inputs must be flagged normalized, share modality and dimension.
    Symmetric: cosine_match(a, b) == cosine_match(b, a) bit-exactly.
    """
    if a.modality is not b.modality:
        raise ModalityMismatchError(
            f"cannot match {a.modality.value} against {b.modality.value}"
        )
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dim {a.dim} vs {b.dim}")
    if not (a.normalized and b.normalized):
        raise NotNormalizedError("cosine matching requires unit-length templates")
    return MatchScore(value=dot(a.values, b.values), modality=a.modality.value)


def fuse(shape_score: float, colour_score: float, weights: FusionWeights) -> float:
    """Score-level fusion of the two modalities' match scores."""
    if not (math.isfinite(shape_score) and math.isfinite(colour_score)):
        raise NonFiniteError("fusion inputs must be finite")
    if weights.mode == PLAIN_SUM:
        return shape_score + colour_score
    return weights.w_shape * shape_score + weights.w_colour * colour_score


def multi_probe_score(probe_scores) -> float:
    """Final match score over several probes: their maximum."""
    scores = list(probe_scores)
    if not scores:
        raise EmptyProbeSetError("multi-probe score over an empty probe set")
    if not all(math.isfinite(s) for s in scores):
        raise NonFiniteError("probe scores must be finite")
    return max(scores)


def vr_at_far(genuine, impostor, far: float) -> float:
    """Best verification rate achievable with false-accept rate <= ``far``.

    Thresholds are taken at observed score values (>= convention, with a +inf
    sentinel), matching the ROC construction in the evaluation module. VR is
    the fraction of genuine scores at or above the selected threshold.
    """
    g = np.sort(np.asarray(list(genuine), dtype=np.float64))
    imp = np.sort(np.asarray(list(impostor), dtype=np.float64))
    if g.size == 0 or imp.size == 0:
        raise EmptyCalibrationSetError("need both genuine and impostor scores")
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(imp))):
        raise NonFiniteError("scores must be finite")
    candidates = np.unique(np.concatenate([g, imp]))  # ascending
    n_imp = imp.size
    # FAR(t) = #(imp >= t) / n_imp is non-increasing in t, so the feasible
    # thresholds form an upper tail; VR is maximized at the smallest feasible.
    counts_imp = n_imp - np.searchsorted(imp, candidates, side="left")
    feasible = np.nonzero(counts_imp / n_imp <= far)[0]
    if feasible.size == 0:
        return 0.0  # only the +inf sentinel is feasible: FAR 0, VR 0
    t = candidates[feasible[0]]
    return float((g.size - np.searchsorted(g, t, side="left")) / g.size)


def weight_grid(grid_step: float) -> list[float]:
    """Shape-weight grid {0, step, 2*step, ..., 1}; 1 is always included."""
    n = int(math.floor(1.0 / grid_step + 1e-9))
    grid = [min(1.0, k * grid_step) for k in range(n + 1)]
    if grid[-1] < 1.0 - 1e-12:
        grid.append(1.0)
    return grid


def calibrate_weights(
    genuine_pairs,
    impostor_pairs,
    operating_far: float = DEFAULT_OPERATING_FAR,
    grid_step: float = DEFAULT_GRID_STEP,
    calibration_set_id: str = "",
) -> FusionWeights:
    """Grid-search weighted-sum fusion weights on a predefined score set.

    Each pair is (shape_score, colour_score). Picks the w_shape from the grid
    maximizing VR at FAR <= operating_far; ties break toward larger w_shape.
    """
    gen = np.asarray(list(genuine_pairs), dtype=np.float64)
    imp = np.asarray(list(impostor_pairs), dtype=np.float64)
    if gen.size == 0 or imp.size == 0:
        raise EmptyCalibrationSetError("both genuine and impostor pairs are required")
    if gen.ndim != 2 or gen.shape[1] != 2 or imp.ndim != 2 or imp.shape[1] != 2:
        raise InvariantViolationError("pairs must be (shape_score, colour_score) tuples")
    if not (np.all(np.isfinite(gen)) and np.all(np.isfinite(imp))):
        raise NonFiniteError("calibration scores must be finite")
    if not (0.0 < operating_far < 1.0):
        raise InvalidFarError(f"operating_far must be in (0, 1), got {operating_far}")
    if not (0.0 < grid_step <= 0.5):
        raise InvalidFarError(f"grid_step must be in (0, 0.5], got {grid_step}")

    best_w, best_vr = 0.0, -1.0
    for w in weight_grid(grid_step):
        wc = 1.0 - w
        fused_gen = w * gen[:, 0] + wc * gen[:, 1]
        fused_imp = w * imp[:, 0] + wc * imp[:, 1]
        vr = vr_at_far(fused_gen, fused_imp, operating_far)
        if vr >= best_vr:  # >= walks ties toward larger w_shape
            best_w, best_vr = w, vr
    return FusionWeights.weighted(
        best_w,
        calibration=CalibrationInfo(
            objective=f"max VR at FAR <= {operating_far}",
            operating_far=operating_far,
            calibration_set_id=calibration_set_id,
        ),
    )
