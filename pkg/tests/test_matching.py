import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from revid.errors import (
    DimensionMismatchError,
    EmptyCalibrationSetError,
    EmptyProbeSetError,
    InvalidFarError,
    InvariantViolationError,
    ModalityMismatchError,
    NonFiniteError,
    NotNormalizedError,
)
from revid.matching import (
    FusionWeights,
    calibrate_weights,
    cosine_match,
    fuse,
    multi_probe_score,
    vr_at_far,
    weight_grid,
)
from revid.templates import Modality, Template

from conftest import random_unit_template
from oracles import brute_calibrate, brute_vr_at_far


def unit(values, modality=Modality.SHAPE):
    return Template(modality, values, normalized=True)


class TestCosineMatch:
    def test_self_match_is_one(self, rng):
        t = random_unit_template(rng, dim=64)
        assert cosine_match(t, t).value == pytest.approx(1.0, abs=1e-6)

    def test_orthogonal(self):
        assert cosine_match(unit([1.0, 0.0]), unit([0.0, 1.0])).value == 0.0

    def test_hand_dot_product(self):
        # 0.6*0.8 + 0.8*0.6 = 0.96
        score = cosine_match(unit([0.6, 0.8]), unit([0.8, 0.6]))
        assert score.value == pytest.approx(0.96, abs=1e-12)
        assert score.modality == "shape"

    def test_symmetry_exact(self, rng):
        for _ in range(50):
            a = random_unit_template(rng, dim=96)
            b = random_unit_template(rng, dim=96)
            assert cosine_match(a, b).value == cosine_match(b, a).value

    def test_bounds(self, rng):
        for _ in range(200):
            a = random_unit_template(rng, dim=17)
            b = random_unit_template(rng, dim=17)
            assert abs(cosine_match(a, b).value) <= 1.0 + 1e-6

    def test_modality_mismatch(self, rng):
        a = random_unit_template(rng, Modality.SHAPE, 8)
        b = random_unit_template(rng, Modality.COLOUR, 8)
        with pytest.raises(ModalityMismatchError):
            cosine_match(a, b)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            cosine_match(random_unit_template(rng, dim=8), random_unit_template(rng, dim=9))

    def test_not_normalized(self):
        raw = Template(Modality.SHAPE, [3.0, 4.0])
        with pytest.raises(NotNormalizedError):
            cosine_match(raw, raw)


class TestFuse:
    def test_equal_weights(self):
        w = FusionWeights.weighted(0.5)
        assert fuse(0.8, 0.4, w) == pytest.approx(0.6, abs=1e-12)

    def test_plain_sum(self):
        assert fuse(0.8, 0.4, FusionWeights.plain_sum()) == pytest.approx(1.2, abs=1e-12)

    def test_degenerate_weight(self):
        w = FusionWeights.weighted(1.0)
        assert fuse(0.7, -0.3, w) == 0.7
        assert fuse(0.7, 123.0, w) == 0.7

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteError):
            fuse(float("nan"), 0.0, FusionWeights.plain_sum())

    def test_weight_validation(self):
        with pytest.raises(InvariantViolationError):
            FusionWeights(0.7, 0.7, mode="weighted_sum")
        with pytest.raises(InvariantViolationError):
            FusionWeights(0.5, 0.5, mode="plain_sum")
        with pytest.raises(InvariantViolationError):
            FusionWeights(1.5, -0.5, mode="weighted_sum")

    @given(
        st.floats(0.0, 1.0),
        st.floats(-1.0, 1.0),
        st.floats(-1.0, 1.0),
        st.floats(0.0, 0.5),
    )
    @settings(max_examples=300, deadline=None)
    def test_monotone_in_each_score(self, w, s, c, bump):
        weights = FusionWeights.weighted(w)
        base = fuse(s, c, weights)
        assert fuse(s + bump, c, weights) >= base
        assert fuse(s, c + bump, weights) >= base

    def test_json_round_trip(self):
        w = calibrate_weights([(0.9, 0.5)], [(0.1, 0.2)], 0.01, 0.25, "demo-set")
        assert FusionWeights.from_dict(w.as_dict()) == w


class TestMultiProbeScore:
    def test_max(self):
        assert multi_probe_score([0.2, 0.7, 0.5]) == 0.7

    def test_singleton(self):
        assert multi_probe_score([0.3]) == 0.3

    def test_empty_rejected(self):
        with pytest.raises(EmptyProbeSetError):
            multi_probe_score([])

    def test_oracle_scan(self, rng):
        scores = rng.uniform(-1, 1, size=1000).tolist()
        expected = scores[0]
        for s in scores[1:]:
            if s > expected:
                expected = s
        assert multi_probe_score(scores) == expected

    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=50))
    @settings(max_examples=300, deadline=None)
    def test_max_dominance(self, scores):
        m = multi_probe_score(scores)
        assert all(m >= s for s in scores)


class TestVrAtFar:
    def test_hand_counts(self):
        # genuine {0.9, 0.8, 0.4}, impostor {0.5, 0.1}
        # at threshold 0.8: FAR 0, VR 2/3; FAR 0.25 allows no impostor
        assert vr_at_far([0.9, 0.8, 0.4], [0.5, 0.1], 0.25) == pytest.approx(2 / 3)
        # FAR 0.5 admits threshold 0.4: one impostor in 2, VR 1
        assert vr_at_far([0.9, 0.8, 0.4], [0.5, 0.1], 0.5) == 1.0

    def test_oracle_equivalence(self, rng):
        for _ in range(80):
            g = rng.normal(0.6, 0.25, size=int(rng.integers(1, 60))).tolist()
            i = rng.normal(0.1, 0.25, size=int(rng.integers(1, 60))).tolist()
            far = float(rng.choice([0.01, 0.05, 0.1, 0.3, 0.9]))
            assert vr_at_far(g, i, far) == brute_vr_at_far(g, i, far)


class TestCalibrateWeights:
    def test_colour_is_noise_picks_shape(self, rng):
        # genuine and impostor colour scores overlap completely; only shape separates
        genuine = [(0.9 + 0.05 * rng.random(), rng.uniform(-1, 1)) for _ in range(60)]
        impostor = [(0.1 + 0.05 * rng.random(), rng.uniform(-1, 1)) for _ in range(200)]
        w = calibrate_weights(genuine, impostor, operating_far=0.01, grid_step=0.05)
        bw, _ = brute_calibrate(genuine, impostor, 0.01, 0.05)
        assert w.w_shape == bw == 1.0

    def test_tie_break_toward_shape(self):
        genuine = [(0.8, 0.8), (0.7, 0.7)]
        impostor = [(0.2, 0.2), (0.3, 0.3)]
        w = calibrate_weights(genuine, impostor, operating_far=0.01, grid_step=0.1)
        assert w.w_shape == 1.0

    def test_single_pair_all_weights_perfect(self):
        w = calibrate_weights([(0.9, 0.9)], [(0.1, 0.1)], operating_far=0.01, grid_step=0.01)
        assert w.w_shape == 1.0
        assert w.calibration is not None
        assert w.calibration.operating_far == 0.01

    def test_interior_weight_can_win(self, rng):
        # shape alone and colour alone each leak; the blend separates
        genuine = [(0.6, 0.9), (0.9, 0.6), (0.8, 0.8)] * 10
        impostor = [(0.85, 0.1), (0.1, 0.85), (0.2, 0.2)] * 30
        w = calibrate_weights(genuine, impostor, operating_far=0.01, grid_step=0.05)
        bw, bvr = brute_calibrate(genuine, impostor, 0.01, 0.05)
        assert w.w_shape == bw
        assert 0.0 < w.w_shape < 1.0

    def test_oracle_grid_equivalence(self, rng):
        for _ in range(25):
            n_g = int(rng.integers(2, 40))
            n_i = int(rng.integers(2, 120))
            genuine = np.column_stack(
                [rng.normal(0.7, 0.2, n_g), rng.normal(0.6, 0.3, n_g)]
            ).tolist()
            impostor = np.column_stack(
                [rng.normal(0.0, 0.3, n_i), rng.normal(0.1, 0.35, n_i)]
            ).tolist()
            far = float(rng.choice([0.01, 0.05, 0.2]))
            step = float(rng.choice([0.05, 0.1, 0.25]))
            w = calibrate_weights(genuine, impostor, far, step)
            bw, bvr = brute_calibrate(genuine, impostor, far, step)
            assert w.w_shape == bw
            fused_g = [w.w_shape * s + w.w_colour * c for s, c in genuine]
            fused_i = [w.w_shape * s + w.w_colour * c for s, c in impostor]
            assert vr_at_far(fused_g, fused_i, far) == bvr

    def test_errors(self):
        with pytest.raises(EmptyCalibrationSetError):
            calibrate_weights([], [(0.1, 0.1)])
        with pytest.raises(EmptyCalibrationSetError):
            calibrate_weights([(0.9, 0.9)], [])
        with pytest.raises(InvalidFarError):
            calibrate_weights([(0.9, 0.9)], [(0.1, 0.1)], operating_far=0.0)
        with pytest.raises(InvalidFarError):
            calibrate_weights([(0.9, 0.9)], [(0.1, 0.1)], grid_step=0.7)

    def test_grid_contains_endpoints(self):
        for step in (0.01, 0.05, 0.1, 0.3, 0.5):
            grid = weight_grid(step)
            assert grid[0] == 0.0
            assert grid[-1] == 1.0
            assert all(0.0 <= w <= 1.0 for w in grid)


class TestRankOrderScaleInvariance:
    def test_argsort_stable_under_probe_scaling(self, rng):
        from revid.templates import normalize, Template

        raw = rng.standard_normal(48)
        gallery = [random_unit_template(rng, dim=48) for _ in range(30)]
        a = normalize(Template(Modality.SHAPE, raw))
        b = normalize(Template(Modality.SHAPE, 3.7 * raw))
        scores_a = [cosine_match(a, g).value for g in gallery]
        scores_b = [cosine_match(b, g).value for g in gallery]
        assert np.argsort(scores_a).tolist() == np.argsort(scores_b).tolist()
