import numpy as np
import pytest

from voidforge.config import MaskConfig
from voidforge.errors import RangeError, ShapeMismatch, UnknownId
from voidforge.masks import (
    LABEL_VALUES, BinaryMaskSeq, Label, MaskRole, affected_pixel_region, compose_quadmask,
    compose_trimask, derive_masks, gridify, object_mask, shadow_difference,
)
from voidforge.masks.grid import cell_lists, cells_to_flags, rasterize_cells
from voidforge.physics import simulate_counterfactual
from voidforge.render import render_pair


def _mask(frames):
    return BinaryMaskSeq(frames, MaskRole.AFFECTED_ORIG)


def _random_masks(seed, shape=(3, 20, 24), p=0.1):
    rng = np.random.default_rng(seed)
    return rng.random(shape) < p


# Grid

def test_gridify_single_pixel():
    frames = np.zeros((1, 64, 64), dtype=bool)
    frames[0, 10, 10] = True
    out = gridify(_mask(frames), 8).frames[0]
    expected = np.zeros((64, 64), dtype=bool)
    expected[8:16, 8:16] = True
    assert np.array_equal(out, expected)


def test_gridify_empty_and_full():
    empty = np.zeros((2, 30, 30), dtype=bool)
    assert not gridify(_mask(empty), 8).frames.any()
    assert gridify(_mask(~empty), 8).frames.all()


@pytest.mark.parametrize("seed", range(5))
def test_gridify_is_idempotent_and_covering(seed):
    mask = _mask(_random_masks(seed, p=0.02))
    once = gridify(mask, 8)
    assert gridify(once, 8) == once
    assert not (mask.frames & ~once.frames).any()
    assert once.role == mask.role


def test_gridify_clips_edge_cells():
    frames = np.zeros((1, 30, 30), dtype=bool)
    frames[0, 29, 29] = True
    out = gridify(_mask(frames), 8).frames[0]
    assert out.shape == (30, 30)
    assert np.count_nonzero(out) == 2 * 2
    assert out[28:, 28:].all()


def _gridify_by_cell(frames, grid):
    """ Cell by cell reference: a cell is set iff any of its pixels is """
    count, height, width = frames.shape
    cell_h, cell_w = -(-height // grid), -(-width // grid)
    expected = np.zeros_like(frames)
    for t in range(count):
        for row in range(0, height, cell_h):
            for col in range(0, width, cell_w):
                block = frames[t, row:row + cell_h, col:col + cell_w]
                expected[t, row:row + cell_h, col:col + cell_w] = block.any()
    return expected


@pytest.mark.parametrize("seed", range(40))
def test_gridify_matches_cell_reference(seed):
    rng = np.random.default_rng(1000 + seed)
    grid = int(rng.integers(1, 12))
    shape = (int(rng.integers(1, 4)), int(rng.integers(1, 70)), int(rng.integers(1, 70)))
    frames = rng.random(shape) < rng.choice([0.001, 0.01, 0.05, 0.3])
    out = gridify(_mask(frames), grid).frames
    assert out.shape == frames.shape
    assert np.array_equal(out, _gridify_by_cell(frames, grid))


def test_gridify_rejects_bad_grid():
    with pytest.raises(RangeError):
        gridify(_mask(np.zeros((1, 8, 8), dtype=bool)), 0)


def test_cell_lists_round_trip():
    frames = _random_masks(3, shape=(2, 16, 16), p=0.05)
    cells = cell_lists(frames, 4)
    assert all(0 <= r < 4 and 0 <= c < 4 for frame in cells for r, c in frame)
    pixels = rasterize_cells(cells_to_flags(cells, 4), 16, 16)
    assert np.array_equal(pixels, gridify(_mask(frames), 4).frames)


# Composition

def test_quadmask_truth_table():
    o = np.array([[[True, True, False, False]]])
    a = np.array([[[True, False, True, False]]])
    labels = compose_quadmask(_mask(o), _mask(a)).frames[0, 0]
    assert list(labels) == [Label.DARK_GREY, Label.BLACK, Label.LIGHT_GREY, Label.WHITE]


def test_quadmask_without_affected_region():
    o = _random_masks(1)
    labels = compose_quadmask(_mask(o), _mask(np.zeros_like(o))).frames
    assert set(np.unique(labels)) <= {Label.BLACK, Label.WHITE}


@pytest.mark.parametrize("seed", range(3))
def test_quadmask_matches_pixel_classifier(seed):
    o, a = _random_masks(seed, p=0.3), _random_masks(seed + 100, p=0.3)
    quadmask = compose_quadmask(_mask(o), _mask(a))
    histogram = quadmask.histogram()
    expected = {"BLACK": 0, "DARK_GREY": 0, "LIGHT_GREY": 0, "WHITE": 0}
    for in_o, in_a in zip(o.ravel(), a.ravel()):
        if in_o and in_a:
            expected["DARK_GREY"] += 1
        elif in_o:
            expected["BLACK"] += 1
        elif in_a:
            expected["LIGHT_GREY"] += 1
        else:
            expected["WHITE"] += 1
    assert histogram == expected
    assert sum(histogram.values()) == o.size


def test_quadmask_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        compose_quadmask(_mask(np.zeros((1, 4, 4))), _mask(np.zeros((1, 4, 5))))
    with pytest.raises(ShapeMismatch):
        _mask(np.zeros((1, 4, 4))) | _mask(np.zeros((2, 4, 4)))


def test_trimask():
    o = np.zeros((2, 8, 8), dtype=bool)
    o[1, 2:5, 2:5] = True
    labels = compose_trimask(_mask(o)).frames
    assert (labels[0] == Label.LIGHT_GREY).all()
    assert (labels[1][o[1]] == Label.BLACK).all()
    assert set(np.unique(labels)) == {Label.BLACK, Label.LIGHT_GREY}
    assert sum(1 for v in compose_trimask(_mask(_random_masks(4))).histogram().values() if v) <= 2


def test_mask_inputs_are_not_frozen():
    frames = np.zeros((1, 4, 4), dtype=bool)
    _mask(frames)
    frames[0, 0, 0] = True


# Masks of rendered pairs

@pytest.fixture
def resting_renders(resting_pair_spec):
    pair = simulate_counterfactual(resting_pair_spec)
    return pair, render_pair(pair, resting_pair_spec)


def test_object_mask_is_instance_silhouette(resting_pair_spec, resting_renders):
    pair, renders = resting_renders
    mask = object_mask(renders.factual, {1}, resting_pair_spec.body_ids)
    assert mask.role == MaskRole.OBJECT
    for t, packet in enumerate(renders.factual):
        assert np.array_equal(mask.frames[t], packet.instance == 1)
    both = object_mask(renders.factual, {1, 2}, resting_pair_spec.body_ids)
    for t, packet in enumerate(renders.factual):
        assert np.array_equal(both.frames[t], (packet.instance == 1) | (packet.instance == 2))
    with pytest.raises(UnknownId):
        object_mask(renders.factual, {9}, resting_pair_spec.body_ids)


def test_unaffected_removal_region_is_shadow_flip(make_spec, resting_pair_spec):
    spec = make_spec(list(resting_pair_spec.bodies), targets=[1], light_dir=(0.8, 0.6, 0.0))
    pair = simulate_counterfactual(spec)
    renders = render_pair(pair, spec)
    region = affected_pixel_region(renders.factual, renders.counterfactual, pair.affected_ids)
    flips = shadow_difference(renders.factual, renders.counterfactual)
    assert pair.affected_ids == frozenset()
    assert flips.any()
    assert np.array_equal(region.frames, flips)


def test_region_is_empty_without_effects(resting_renders):
    pair, renders = resting_renders
    region = affected_pixel_region(renders.factual, renders.counterfactual, pair.affected_ids)
    assert not region.frames.any()


def test_derived_masks_of_a_falling_stack(stack_spec):
    pair = simulate_counterfactual(stack_spec)
    renders = render_pair(pair, stack_spec)
    masks = derive_masks(pair, renders, stack_spec)

    labels = masks.quadmask.frames
    assert set(np.unique(labels)) <= set(LABEL_VALUES)
    on_target = (labels == Label.BLACK) | (labels == Label.DARK_GREY)
    assert np.array_equal(on_target, masks.object_mask.frames)
    assert ((labels == Label.LIGHT_GREY) | (labels == Label.DARK_GREY)).any()

    # Every pixel that changes between variants is labeled for inpainting
    for t in range(stack_spec.frames):
        changed = (renders.factual[t].rgb != renders.counterfactual[t].rgb).any(axis=2)
        assert not (changed & (labels[t] == Label.WHITE)).any()

    assert masks.affected == gridify(masks.affected, MaskConfig().grid)
    pixel_level = derive_masks(pair, renders, stack_spec, MaskConfig(grid_orig=False))
    assert not (pixel_level.affected.frames & ~masks.affected.frames).any()
