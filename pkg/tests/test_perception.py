"""Tests for sensing crops, context degradation and detection."""

import math
from itertools import product

import numpy as np
import pytest

from src.errors import InvalidArgumentError, InvalidSeverityError, NoPixelsError
from src.perception import (
    MAX_COLOR_DISTANCE,
    DetectionMode,
    DetectionSettings,
    DetectionTracker,
    Direction,
    DriverPerception,
    FogParams,
    Mask,
    MaskPlacement,
    NightParams,
    NoiseBound,
    NoiseParams,
    SensingFrame,
    SensingProfile,
    SensingRanges,
    apply_color_sensitivity,
    apply_fog,
    apply_masks,
    apply_night,
    color_distance,
    color_factor,
    crop_sensing_region,
    decay,
    detection_factors,
    entity_footprint,
    fog_alpha,
    mask_map,
    representative_color,
    resolve_detection,
    sample_noisy_params,
)
from src.perception.contexts import distance_map, fog_weight_map, headlight_mask, night_weight_map
from src.world import ROAD_COLOR, Vec2, Viewport, render_topdown

from .conftest import make_block, make_car, make_state

RED = (220, 40, 40)
THRESHOLD = DetectionSettings(mode=DetectionMode.THRESHOLD, threshold=0.5)


@pytest.fixture(scope="module")
def frame():
    return SensingFrame.build(SensingRanges(), 128)


@pytest.fixture(scope="module")
def small_frame():
    return SensingFrame.build(SensingRanges(forward=10.0, backward=10.0, left=10.0, right=10.0), 20)


@pytest.fixture(scope="module")
def scene():
    """Observer at the origin facing east, a red car 20 m ahead crossing its view."""
    observer = make_car(1, 0.0, 0.0, heading=0.0)
    target = make_car(2, 20.0, 0.0, heading=math.pi / 2, color=RED)
    viewport = Viewport(-40.0, -60.0, 120.0, 60.0)
    base = render_topdown(make_state([observer, target]), viewport, 0.25)
    return observer, target, viewport, base


def _perceive(profile, scene, detection=THRESHOLD, rng=None):
    observer, target, viewport, base = scene
    perception = DriverPerception(profile, detection=detection)
    return perception.perceive(base, viewport, 0.25, observer, [observer, target], rng)


def test_frame_geometry(frame):
    assert frame.meters_per_pixel == pytest.approx(100.0 / 128)
    assert frame.shape == (128, 115)
    u, v = frame.index_to_uv(np.array([0]), np.array([0]))
    assert u[0] == pytest.approx(80.0 - 0.5 * frame.meters_per_pixel)
    assert v[0] == pytest.approx(45.0 - 0.5 * frame.meters_per_pixel)
    rows, cols = frame.uv_to_index(u, v)
    assert rows[0] == pytest.approx(0.0)
    assert cols[0] == pytest.approx(0.0)


def test_directional_regions_partition_depth(frame):
    forward = frame.region(Direction.FORWARD)
    backward = frame.region(Direction.BACKWARD)
    assert (forward | backward).all()
    assert not (forward & backward).any()


def test_boundary_mask_covers_the_far_band(frame):
    covered = mask_map(frame, [Mask(direction=Direction.FORWARD, placement=MaskPlacement.BOUNDARY_ADJACENT, area_fraction=0.25)])
    assert covered[:26].all()
    assert not covered[26:].any()


def test_vehicle_adjacent_mask(frame):
    mask = Mask(direction=Direction.BACKWARD, placement=MaskPlacement.VEHICLE_ADJACENT, area_fraction=0.5)
    covered = mask_map(frame, [mask])
    u, _ = frame.uv_grid()
    assert np.array_equal(covered, (u <= 0.0) & (u >= -10.0))


def test_apply_masks_paints_white(frame):
    obs = np.zeros(frame.shape + (3,), dtype=np.uint8)
    masks = [Mask(direction=Direction.LEFT, placement=MaskPlacement.CENTERED, area_fraction=0.4)]
    out = apply_masks(obs, masks, frame)
    covered = mask_map(frame, masks)
    assert (out[covered] == 255).all()
    assert (out[~covered] == 0).all()
    assert (obs == 0).all()


@pytest.mark.parametrize("delta, gamma", [(60.0, 0.6), (5.0, 0.01), (8.0, 0.5), (120.0, 0.95)])
def test_fog_alpha_hits_the_severity_point(delta, gamma):
    assert decay(delta, fog_alpha(delta, gamma)) == pytest.approx(gamma)


@pytest.mark.parametrize("delta, gamma", [(0.0, 0.5), (-1.0, 0.5), (10.0, 0.0), (10.0, 1.0), (10.0, 1.5)])
def test_fog_alpha_rejects_bad_severity(delta, gamma):
    with pytest.raises(InvalidSeverityError):
        fog_alpha(delta, gamma)


def test_apply_fog_matches_per_pixel_blend(rng):
    obs = rng.integers(0, 256, size=(7, 9, 3), dtype=np.uint8)
    params = FogParams(severity_distance=3.0, severity_value=0.4, fog_color=(200, 210, 220))
    out = apply_fog(obs, params, center=(3.0, 4.0), pixel_size=0.5)
    alpha = -3.0 / math.log(0.4)
    for r in range(7):
        for c in range(9):
            w = math.exp(-math.hypot(r - 3.0, c - 4.0) * 0.5 / alpha)
            for k in range(3):
                expected = w * obs[r, c, k] + (1.0 - w) * params.fog_color[k]
                assert abs(int(out[r, c, k]) - expected) <= 0.5 + 1e-9
    assert np.array_equal(out[3, 4], obs[3, 4])


def test_dense_fog_washes_out_distant_pixels():
    obs = np.zeros((50, 50, 3), dtype=np.uint8)
    out = apply_fog(obs, FogParams(severity_distance=2.0, severity_value=0.01), center=(0.0, 0.0))
    assert tuple(out[49, 49]) == (191, 191, 191)


def test_apply_night_keeps_headlights_and_darkens_elsewhere(small_frame):
    obs = np.full(small_frame.shape + (3,), 200, dtype=np.uint8)
    params = NightParams(severity_distance=4.0, severity_value=0.3, headlight_depth=5.0, expansion_angle=0.2)
    out = apply_night(obs, params, small_frame)
    lit = headlight_mask(small_frame, 5.0, params.headlight_base_width, 0.2)
    assert lit.any()
    assert (out[lit] == 200).all()
    weights = decay(distance_map(small_frame.shape, small_frame.vehicle_pixel, small_frame.meters_per_pixel), fog_alpha(4.0, 0.3))
    expected = np.rint(weights * 200.0)
    assert np.abs(out[~lit][:, 0] - expected[~lit]).max() <= 1
    # rear pixels are never lit
    u, _ = small_frame.uv_grid()
    assert not lit[u < 0].any()


def test_headlight_trapezoid_widens(small_frame):
    lit = headlight_mask(small_frame, 7.0, 2.0, 0.35)
    u, v = small_frame.uv_grid()
    near = np.abs(v[lit & (u < 3.5)]).max()
    far = np.abs(v[lit & (u > 7.5)]).max()
    assert far > near


def test_color_distance_extremes():
    assert MAX_COLOR_DISTANCE == pytest.approx(764.834, abs=1e-3)
    assert color_distance((10, 20, 30), (10, 20, 30)) == 0.0
    assert color_distance((0, 0, 0), (255, 0, 0)) == pytest.approx(color_distance((255, 0, 0), (0, 0, 0)))
    grid = color_distance(np.zeros((4, 5, 3)), (255, 255, 255))
    assert grid.shape == (4, 5)
    assert np.allclose(grid, MAX_COLOR_DISTANCE)


def test_color_factor():
    assert color_factor(RED, [RED]) == 0.0
    assert color_factor((0, 0, 0), [(255, 255, 255)]) == pytest.approx(1.0)
    near_red = (210, 40, 40)
    assert color_factor(near_red, [RED], tolerance=40.0) == 0.0
    assert 0.0 < color_factor(near_red, [RED]) < 0.1
    # nearest error color wins
    assert color_factor(near_red, [(0, 0, 0), RED]) == pytest.approx(color_factor(near_red, [RED]))


def test_representative_color():
    image = np.zeros((4, 4, 3), dtype=np.uint8)
    image[0, 0] = (100, 0, 0)
    image[0, 1] = (200, 0, 0)
    footprint = np.zeros((4, 4), dtype=bool)
    footprint[0, :2] = True
    assert representative_color(image, footprint) == pytest.approx([150.0, 0.0, 0.0])
    with pytest.raises(NoPixelsError):
        representative_color(image, np.zeros((4, 4), dtype=bool))


def test_color_sensitivity_fades_error_colors():
    image = np.zeros((2, 2, 3), dtype=np.uint8)
    image[0, 0] = RED
    image[1, 1] = (0, 200, 0)
    out = apply_color_sensitivity(image, [RED], tolerance=10.0)
    assert tuple(out[0, 0]) == ROAD_COLOR
    assert tuple(out[1, 1]) == (0, 200, 0)
    assert np.array_equal(apply_color_sensitivity(image, []), image)


def test_crop_follows_position_and_heading(frame):
    viewport = Viewport(-50.0, -50.0, 50.0, 50.0)
    building = make_block(100, 20.0, 0.0, (3.0, 3.0), color=(10, 200, 10))
    base = render_topdown(make_state([building]), viewport, 0.5)
    row = int(round(60.0 / frame.meters_per_pixel - 0.5))
    col = int(round(45.0 / frame.meters_per_pixel - 0.5))
    east = crop_sensing_region(base, viewport, 0.5, Vec2(0.0, 0.0), 0.0, frame)
    assert east.shape == frame.shape + (3,)
    assert tuple(east[row, col]) == (10, 200, 10)
    # facing north from below the building sees it at the same crop pixel
    north = crop_sensing_region(base, viewport, 0.5, Vec2(20.0, -20.0), math.pi / 2, frame)
    assert tuple(north[row, col]) == (10, 200, 10)
    # beyond the base image the crop is filled with road
    edge = crop_sensing_region(base, viewport, 0.5, Vec2(45.0, 0.0), 0.0, frame)
    assert tuple(edge[0, col]) == ROAD_COLOR


def test_entity_footprint(frame):
    target = make_car(2, 20.0, 0.0, heading=math.pi / 2)
    rows, cols = entity_footprint(target, frame, Vec2(0.0, 0.0), 0.0)
    area = 4.5 * 2.0 / frame.meters_per_pixel**2
    assert 0.5 * area <= rows.size <= 1.5 * area
    u, v = frame.index_to_uv(rows, cols)
    assert np.all(np.abs(u - 20.0) <= 1.0)
    assert np.all(np.abs(v) <= 2.25)


def test_detection_factors_visibility(frame):
    target = make_car(2, 20.0, 0.0, heading=math.pi / 2)
    image = np.zeros(frame.shape + (3,), dtype=np.uint8)
    clear = np.zeros(frame.shape, dtype=bool)
    factors = detection_factors(target, frame, Vec2(0.0, 0.0), 0.0, clear, image)
    assert factors.visible == 1.0
    assert factors.likelihood == 1.0
    hidden = detection_factors(target, frame, Vec2(0.0, 0.0), 0.0, np.ones(frame.shape, dtype=bool), image)
    assert hidden.in_range
    assert hidden.likelihood == 0.0
    far = detection_factors(make_car(3, 200.0, 0.0), frame, Vec2(0.0, 0.0), 0.0, clear, image)
    assert not far.in_range
    assert far.likelihood == 0.0


def test_resolve_detection_modes():
    assert resolve_detection(0.5, DetectionMode.THRESHOLD, threshold=0.5)
    assert not resolve_detection(0.49, DetectionMode.THRESHOLD, threshold=0.5)
    with pytest.raises(InvalidArgumentError):
        resolve_detection(1.2, DetectionMode.THRESHOLD)
    with pytest.raises(InvalidArgumentError):
        resolve_detection(0.5, DetectionMode.STOCHASTIC, rng=None)


def test_stochastic_detection_frequency(rng):
    for p in (0.0, 0.3, 1.0):
        hits = sum(resolve_detection(p, rng=rng) for _ in range(100_000))
        assert hits / 100_000 == pytest.approx(p, abs=0.01)


def test_tracker_latches_until_out_of_range():
    tracker = DetectionTracker(DetectionMode.STOCHASTIC)
    rng = np.random.default_rng(0)
    assert tracker.update({2: 1.0, 3: 0.0}, rng, in_range={2, 3}) == {2}
    # latched entities consume no draws
    assert tracker.update({2: 0.0}, None, in_range={2}) == {2}
    assert tracker.update({2: 0.0}, None, in_range=set()) == set()
    assert tracker.update({2: 1.0}, rng) == {2}
    assert tracker.update({2: 0.0}, rng) == set()
    tracker.update({4: 1.0}, rng)
    tracker.reset()
    assert tracker.latched == set()


def test_sample_noisy_params_stays_in_bounds(rng):
    noise = NoiseParams(bounds={"fog.severity_value": NoiseBound(sigma=0.1, lo=0.3, hi=0.7)})
    draws = [sample_noisy_params({"fog.severity_value": 0.5, "fog.severity_distance": 60.0}, noise, rng) for _ in range(2000)]
    values = np.array([d["fog.severity_value"] for d in draws])
    assert values.min() >= 0.3
    assert values.max() <= 0.7
    assert values.mean() == pytest.approx(0.5, abs=0.01)
    assert values.std() > 0.05
    assert all(d["fog.severity_distance"] == 60.0 for d in draws)


def test_sample_noisy_params_edge_cases(rng):
    fixed = NoiseParams(bounds={"night.severity_value": NoiseBound(sigma=0.0, lo=0.1, hi=0.9)})
    assert sample_noisy_params({"night.severity_value": 0.4}, fixed, rng) == {"night.severity_value": 0.4}
    assert sample_noisy_params({"x": 1.0}, None, rng) == {"x": 1.0}
    with pytest.raises(InvalidArgumentError):
        sample_noisy_params({"night.severity_value": 0.95}, fixed, rng)
    with pytest.raises(ValueError):
        NoiseBound(sigma=0.1, lo=1.0, hi=0.0)


def test_manager_view_replaces_severity():
    profile = SensingProfile(fog=FogParams(severity_distance=60.0, severity_value=0.6))
    assert profile.severity_values() == {"fog.severity_distance": 60.0, "fog.severity_value": 0.6}
    view = profile.manager_view({"fog.severity_value": 0.3, "night.severity_value": 0.2})
    assert view.fog.severity_value == 0.3
    assert view.fog.severity_distance == 60.0
    assert view.night is None
    assert profile.fog.severity_value == 0.6


def test_clear_view_detects_the_car(scene):
    result = _perceive(SensingProfile(), scene)
    assert result.detected == {2}
    assert result.likelihoods[2] == pytest.approx(1.0)
    assert result.image.shape == (128, 115, 3)


def test_full_mask_hides_the_car(scene):
    mask = Mask(direction=Direction.FORWARD, placement=MaskPlacement.CENTERED, area_fraction=1.0)
    result = _perceive(SensingProfile(masks=[mask]), scene)
    assert result.detected == set()
    assert result.factors[2].in_range


@pytest.mark.parametrize("delta, gamma, seen", [(60.0, 0.6, True), (5.0, 0.01, False)])
def test_fog_severity_decides_detection(scene, delta, gamma, seen):
    result = _perceive(SensingProfile(fog=FogParams(severity_distance=delta, severity_value=gamma)), scene)
    assert (2 in result.detected) == seen


@pytest.mark.parametrize("depth, seen", [(30.0, True), (4.0, False)])
def test_headlights_decide_detection_at_night(scene, depth, seen):
    night = NightParams(severity_distance=8.0, severity_value=0.01, headlight_depth=depth)
    result = _perceive(SensingProfile(night=night), scene)
    assert (2 in result.detected) == seen


def test_color_blind_driver_misses_matching_car(scene):
    blind = SensingProfile(color_sensitivity=[RED], color_tolerance=80.0)
    result = _perceive(blind, scene)
    assert result.likelihoods[2] == 0.0
    assert result.detected == set()
    sighted = _perceive(SensingProfile(color_sensitivity=[(0, 160, 0)]), scene)
    assert sighted.likelihoods[2] > 0.5
    assert 2 in sighted.detected


def test_manager_image_uses_perturbed_profile(scene):
    observer, target, viewport, base = scene
    profile = SensingProfile(fog=FogParams(severity_distance=60.0, severity_value=0.6))
    perception = DriverPerception(profile, detection=THRESHOLD)
    result = perception.perceive(
        base, viewport, 0.25, observer, [target], None, manager_profile=profile.manager_view({"fog.severity_value": 0.05})
    )
    assert 2 in result.detected
    assert not np.array_equal(result.manager_image, result.image)


def _random_target(rng):
    return make_car(
        2,
        float(rng.uniform(-15.0, 75.0)),
        float(rng.uniform(-40.0, 40.0)),
        heading=float(rng.uniform(-math.pi, math.pi)),
    )


def _non_increasing(values):
    return all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_larger_masks_never_raise_the_likelihood(frame, rng):
    image = np.zeros(frame.shape + (3,), dtype=np.uint8)
    for _ in range(30):
        target = _random_target(rng)
        direction = Direction(rng.choice([d.value for d in Direction]))
        placement = MaskPlacement(rng.choice([p.value for p in MaskPlacement]))
        likelihoods = []
        for fraction in np.sort(rng.uniform(0.01, 1.0, size=6)):
            mask = Mask(direction=direction, placement=placement, area_fraction=float(fraction))
            masked = mask_map(frame, [mask])
            likelihoods.append(detection_factors(target, frame, Vec2(0.0, 0.0), 0.0, masked, image).likelihood)
        assert _non_increasing(likelihoods), (direction, placement, likelihoods)


def test_lower_severity_values_never_raise_the_likelihood(frame, rng):
    image = np.zeros(frame.shape + (3,), dtype=np.uint8)
    clear = np.zeros(frame.shape, dtype=bool)
    for _ in range(20):
        target = _random_target(rng)
        delta = float(rng.uniform(2.0, 80.0))
        gammas = np.sort(rng.uniform(0.001, 0.99, size=6))[::-1]
        fogged, dark = [], []
        for gamma in gammas:
            fog = fog_weight_map(frame, delta, float(gamma))
            fogged.append(detection_factors(target, frame, Vec2(0.0, 0.0), 0.0, clear, image, fog_weights=fog).likelihood)
            night = night_weight_map(frame, NightParams(severity_distance=delta, severity_value=float(gamma)))
            dark.append(detection_factors(target, frame, Vec2(0.0, 0.0), 0.0, clear, image, light_weights=night).likelihood)
        assert _non_increasing(fogged)
        assert _non_increasing(dark)


def test_closer_colors_never_raise_the_likelihood(frame, rng):
    target = make_car(2, 20.0, 0.0, heading=math.pi / 2)
    clear = np.zeros(frame.shape, dtype=bool)
    for _ in range(25):
        error = tuple(int(c) for c in rng.integers(0, 256, size=3))
        tolerance = float(rng.uniform(0.0, 100.0))
        colors = rng.integers(0, 256, size=(6, 3))
        # farthest from the error color first
        order = np.argsort(color_distance(colors, error))[::-1]
        likelihoods = []
        for color in colors[order]:
            image = np.empty(frame.shape + (3,), dtype=np.uint8)
            image[...] = color
            factors = detection_factors(
                target, frame, Vec2(0.0, 0.0), 0.0, clear, image, error_colors=[error], color_tolerance=tolerance
            )
            likelihoods.append(factors.likelihood)
        assert _non_increasing(likelihoods)


def test_fog_and_night_pixels_stay_between_original_and_tint(small_frame, rng):
    for _ in range(20):
        obs = rng.integers(0, 256, size=small_frame.shape + (3,), dtype=np.uint8)
        fog_color = tuple(int(c) for c in rng.integers(0, 256, size=3))
        fog = FogParams(
            severity_distance=float(rng.uniform(0.5, 30.0)),
            severity_value=float(rng.uniform(0.01, 0.99)),
            fog_color=fog_color,
        )
        center = (float(rng.uniform(0.0, 20.0)), float(rng.uniform(0.0, 20.0)))
        fogged = apply_fog(obs, fog, center=center, pixel_size=float(rng.uniform(0.2, 2.0))).astype(int)
        tint = np.array(fog_color)
        assert (fogged >= np.minimum(obs, tint)).all()
        assert (fogged <= np.maximum(obs, tint)).all()

        night = NightParams(
            severity_distance=float(rng.uniform(0.5, 30.0)),
            severity_value=float(rng.uniform(0.01, 0.99)),
            headlight_depth=float(rng.uniform(0.0, 10.0)),
            expansion_angle=float(rng.uniform(0.0, 0.5)),
        )
        dark = apply_night(obs, night, small_frame)
        assert (dark <= obs).all()


def test_max_color_distance_bounds_every_corner_pair():
    corners = list(product((0, 255), repeat=3))
    distances = [color_distance(a, b) for a in corners for b in corners]
    assert len(distances) == 64
    assert max(distances) <= MAX_COLOR_DISTANCE + 1e-9
    assert max(distances) == pytest.approx(MAX_COLOR_DISTANCE)
