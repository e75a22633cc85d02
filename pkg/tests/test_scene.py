import math

import pytest

from voidforge.config import TEMPLATES, SamplerParams
from voidforge.errors import RangeError, TooFewBodies, UnknownId
from voidforge.objects import Box, Sphere
from voidforge.scene import (
    BodySpec, SceneSpec, mix_seed, sample_scene, select_removal_targets, splitmix64,
    template_for_index, validate_spec,
)
from voidforge.scene.seeding import STREAM_NOISE, stream_rng


def test_splitmix64_known_values():
    # First outputs of a splitmix64 generator seeded with 0
    assert splitmix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF
    assert mix_seed(0, 0) == 0xE220A8397B1DCDAF
    assert mix_seed(0, 1) == splitmix64(2 * 0x9E3779B97F4A7C15 & 0xFFFFFFFFFFFFFFFF)


def test_stream_rng_is_keyed():
    a = stream_rng(7, STREAM_NOISE, 3).standard_normal(16)
    b = stream_rng(7, STREAM_NOISE, 3).standard_normal(16)
    c = stream_rng(7, STREAM_NOISE, 4).standard_normal(16)
    assert (a == b).all()
    assert not (a == c).all()


def test_sample_scene_is_deterministic():
    assert sample_scene(7, 0).to_json() == sample_scene(7, 0).to_json()


def test_sample_scene_differs_between_indices():
    a, b = sample_scene(7, 0), sample_scene(7, 1)
    assert a.scene_seed != b.scene_seed
    assert a.bodies != b.bodies


@pytest.mark.parametrize("index", range(12))
def test_sampled_scenes_are_valid(index):
    spec = sample_scene(11, index)
    assert validate_spec(spec) == []
    assert spec.template == template_for_index(index)
    assert 3 <= len(spec.bodies) <= 8
    dynamic = spec.dynamic_ids
    assert 1 <= len(spec.removal_targets) <= math.ceil(len(dynamic) / 2)
    assert spec.removal_targets <= set(dynamic)


def test_scene_json_round_trip():
    spec = sample_scene(3, 4)
    assert SceneSpec.from_json(spec.to_json()) == spec


@pytest.mark.parametrize("index", [1, 4, 7, 10])
def test_support_removal_has_body_resting_on_target(index):
    spec = sample_scene(5, index)
    assert spec.template == "support_removal"
    resting = []
    for target_id in spec.removal_targets:
        target = spec.body(target_id)
        top = target.position0[1] + target.shape.extents[1]
        resting.extend(
            b.id for b in spec.bodies
            if b.id != target_id and not b.static and abs(b.position0[1] - b.shape.extents[1] - top) < 1e-3
        )
    assert resting


def test_template_mix_round_robin():
    assert [template_for_index(i) for i in range(4)] == list(TEMPLATES) + [TEMPLATES[0]]
    assert {template_for_index(i, (0, 1, 0)) for i in range(5)} == {"support_removal"}
    assert [template_for_index(i, (2, 1, 0)) for i in range(3)] == [TEMPLATES[0], TEMPLATES[0], TEMPLATES[1]]


def test_sampler_params_check():
    with pytest.raises(RangeError):
        SamplerParams(min_bodies=2).check()
    with pytest.raises(RangeError):
        SamplerParams(resolution=(16, 16)).check()
    with pytest.raises(RangeError):
        sample_scene(0, 0, SamplerParams(template_mix=(0, 0, 0)))
    with pytest.raises(RangeError):
        SamplerParams(template_mix=(1.5, 1, 1)).check()
    with pytest.raises(RangeError):
        SamplerParams(template_mix=(0.5, 0.5, 0.5)).check()
    with pytest.raises(RangeError):
        SamplerParams(template_mix=(1, -1, 1)).check()
    with pytest.raises(RangeError):
        template_for_index(3, (0, 0, 0))
    SamplerParams(template_mix=(0, 2, 0)).check()


def test_templates_cover_default_mix():
    counts = {name: 0 for name in TEMPLATES}
    for index in range(300):
        counts[template_for_index(index)] += 1
    assert sum(counts.values()) == 300
    assert min(counts.values()) >= 50


@pytest.mark.slow
def test_sampled_templates_cover_default_mix():
    counts = {name: 0 for name in TEMPLATES}
    for index in range(300):
        counts[sample_scene(21, index).template] += 1
    assert min(counts.values()) >= 50


def _dynamic_spec(count):
    bodies = [BodySpec(i + 1, Sphere(0.1), 1.0, (0.5 * i, 0.1, 0.0)) for i in range(count)]
    return SceneSpec(bodies=tuple(bodies))


def test_two_dynamic_bodies_give_one_target():
    for seed in range(20):
        assert len(select_removal_targets(_dynamic_spec(2), seed)) == 1


def test_targets_are_repeatable():
    spec = _dynamic_spec(5)
    assert select_removal_targets(spec, 99) == select_removal_targets(spec, 99)


def test_target_count_bound():
    spec = _dynamic_spec(6)
    for seed in range(1000):
        targets = select_removal_targets(spec, seed)
        assert 1 <= len(targets) <= 3
        assert targets <= set(spec.dynamic_ids)


def test_targets_errors():
    with pytest.raises(TooFewBodies):
        select_removal_targets(_dynamic_spec(1), 0)
    with pytest.raises(UnknownId):
        select_removal_targets(_dynamic_spec(3), 0, required=[42])
    with pytest.raises(RangeError):
        select_removal_targets(_dynamic_spec(3), 0, required=[1, 2, 3])
    assert 2 in select_removal_targets(_dynamic_spec(4), 0, required=[2])


def test_validate_default_sampled_spec():
    assert validate_spec(sample_scene(7, 0)) == []


def test_validate_names_restitution_path():
    spec = _dynamic_spec(2).with_targets([1])
    bad = SceneSpec(
        bodies=(spec.bodies[0], BodySpec(2, Sphere(0.1), 1.0, (0.5, 0.1, 0.0), restitution=1.5)),
        removal_targets=frozenset([1]),
    )
    report = validate_spec(bad)
    assert [v.where for v in report] == ["bodies[1].restitution"]


def test_validate_reports_overlap():
    spec = SceneSpec(
        bodies=(
            BodySpec(1, Box((0.1, 0.1, 0.1)), 1.0, (0.0, 0.1, 0.0)),
            BodySpec(2, Sphere(0.1), 1.0, (0.0, 0.1, 0.0)),
        ),
        removal_targets=frozenset([1]),
    )
    assert "PlacementOverlap" in {v.check for v in validate_spec(spec)}


def test_validate_reports_targets_and_ground():
    spec = SceneSpec(
        bodies=(
            BodySpec(1, Sphere(0.1), None, (0.0, 0.1, 0.0)),
            BodySpec(2, Sphere(0.1), 1.0, (1.0, 0.05, 0.0)),
        ),
        removal_targets=frozenset([1]),
    )
    checks = {v.check for v in validate_spec(spec)}
    assert checks == {"TargetViolation", "GroundPenetration"}


def test_body_lookup():
    spec = _dynamic_spec(2)
    assert spec.body(2).id == 2
    with pytest.raises(UnknownId):
        spec.body(9)
