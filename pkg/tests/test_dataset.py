import json
import shutil

import numpy as np
import pytest

from voidforge.config import ForgeConfig, SamplerParams
from voidforge.dataset.export import MANIFEST_NAME, ManifestRecord, expand_paths, export_pair, read_manifest
from voidforge.dataset.formats import read_png, to_bytes, write_png
from voidforge.dataset.inspect import contact_sheet, find_record
from voidforge.dataset.metrics import flow_warp_psnr
from voidforge.dataset.pipeline import assign_split, forge_scene, generate
from voidforge.dataset.stats import compute_stats
from voidforge.dataset.validate import validate_dataset
from voidforge.errors import ConsistencyError, UnknownId
from voidforge.masks import Label
from voidforge.noisewarp import NoiseVolume

COUNT = 3
FRAMES = 6


@pytest.fixture(scope="module")
def forge_config():
    return ForgeConfig(sampler=SamplerParams(frames=FRAMES, resolution=(32, 32)))


@pytest.fixture(scope="module")
def dataset(tmp_path_factory, forge_config):
    """ A small generated dataset, shared and never modified """
    root = tmp_path_factory.mktemp("dataset")
    records = generate(root, 0, COUNT, forge_config, progress=False)
    return root, records


@pytest.fixture
def scratch(tmp_path, dataset):
    """ Writable copy of the shared dataset """
    root = tmp_path / "copy"
    shutil.copytree(dataset[0], root)
    return root


def _records(root):
    return [ManifestRecord.from_dict(json.loads(line)) for line in read_manifest(root)]


def _checks(report):
    return {v.check for v in report}


# Generation

def test_generated_layout(dataset):
    root, records = dataset
    assert [r.scene_index for r in records] == list(range(COUNT))
    assert [r.template for r in records] == ["collision_chain", "support_removal", "obstruction_removal"]
    assert _records(root) == records
    assert not list(root.glob(".*.tmp-*"))
    for record in records:
        assert record.frames == FRAMES
        assert record.split == "train"
        for key, paths in expand_paths(record).items():
            expected = FRAMES - 1 if key.endswith("_flow") else (FRAMES if "%" in record.paths[key] else 1)
            assert len(paths) == expected
            assert all((root / p).is_file() for p in paths)


def test_generated_dataset_validates(dataset):
    assert validate_dataset(dataset[0]) == []


@pytest.mark.slow
def test_regeneration_is_byte_identical(tmp_path, dataset, forge_config):
    generate(tmp_path, 0, COUNT, forge_config, progress=False)
    root = dataset[0]
    ours = sorted(p.relative_to(tmp_path) for p in tmp_path.rglob("*") if p.is_file())
    theirs = sorted(p.relative_to(root) for p in root.rglob("*") if p.is_file())
    assert ours == theirs
    for relative in ours:
        assert (tmp_path / relative).read_bytes() == (root / relative).read_bytes(), relative


def test_forge_scene_is_deterministic(forge_config):
    a = forge_scene(0, 1, forge_config)
    b = forge_scene(0, 1, forge_config)
    assert a.spec == b.spec
    assert a.masks.quadmask == b.masks.quadmask
    assert a.noise == b.noise
    assert a.noise.shape == (FRAMES, 8, 8, 4)


def test_assign_split():
    assert assign_split(12345, 0.0) == "train"
    assert assign_split(12345, 1.0) == "test"


def test_export_rejects_inconsistent_inputs(tmp_path, forge_config):
    scene = forge_scene(0, 0, forge_config)
    short = NoiseVolume(scene.noise.frames[:-1], scene.noise.seed)
    with pytest.raises(ConsistencyError):
        export_pair(scene.pair, scene.renders, scene.masks, short, tmp_path, scene.spec, 0)
    assert not (tmp_path / MANIFEST_NAME).exists()


# Manifest

def test_manifest_records(dataset):
    root, records = dataset
    line = read_manifest(root)[0]
    data = json.loads(line)
    assert data["schema"] == "void-forge/manifest/1"
    assert set(data["psnr"]) == {"float", "quantized"}
    assert ManifestRecord.from_dict(data).to_json() == line

    with pytest.raises(ValueError):
        ManifestRecord.from_dict(dict(data, schema="other/1"))
    with pytest.raises(TypeError):
        ManifestRecord.from_dict(dict(data, extra=1))

    scene = json.loads((root / records[0].scene_id / "scene.json").read_text())
    assert scene["scene_seed"] == records[0].scene_seed
    assert sorted(scene["removal_targets"]) == records[0].removed_ids


# Validation

def test_missing_manifest(tmp_path):
    assert _checks(validate_dataset(tmp_path)) == {"MissingManifest"}


def test_out_of_range_label(scratch):
    record = _records(scratch)[0]
    path = scratch / expand_paths(record)["quadmask"][0]
    quadmask = read_png(path)
    rows, cols = np.nonzero(quadmask == Label.WHITE)
    quadmask[rows[0], cols[0]] = 17
    write_png(path, quadmask)

    report = validate_dataset(scratch)
    assert _checks(report) == {"EncodingViolation"}
    assert report[0].where == record.scene_id
    assert "value 17" in report[0].message


def test_whitened_targets_are_unsound(scratch):
    record = _records(scratch)[0]
    paths = expand_paths(record)
    for relative in paths["quadmask"]:
        quadmask = read_png(scratch / relative)
        if (quadmask != Label.WHITE).any() and ((quadmask == Label.BLACK) | (quadmask == Label.DARK_GREY)).any():
            quadmask[quadmask != Label.LIGHT_GREY] = Label.WHITE
            write_png(scratch / relative, quadmask)
            break
    else:
        pytest.fail("no frame shows the removal target")

    checks = _checks(validate_dataset(scratch))
    assert "SoundnessViolation" in checks
    assert "PartitionViolation" in checks


def test_missing_and_corrupt_files(scratch):
    record = _records(scratch)[1]
    paths = expand_paths(record)
    (scratch / paths["factual_flow"][0]).unlink()
    (scratch / paths["noise"][0]).write_bytes(b"VNSE\x01\x00")

    report = validate_dataset(scratch)
    assert _checks(report) == {"MissingFile", "CorruptFile"}
    assert {v.where for v in report} == {record.scene_id}


def test_bad_manifest_lines(scratch):
    manifest = scratch / MANIFEST_NAME
    lines = manifest.read_text().splitlines()
    manifest.write_text("\n".join(lines + [lines[0], "{not json"]) + "\n")
    assert _checks(validate_dataset(scratch)) == {"DuplicateRecord", "SchemaViolation"}


def test_manifest_disagreeing_with_trajectories(scratch):
    manifest = scratch / MANIFEST_NAME
    lines = manifest.read_text().splitlines()
    data = json.loads(lines[0])
    data["affected_ids"] = data["affected_ids"] + [250]
    lines[0] = json.dumps(data)
    manifest.write_text("\n".join(lines) + "\n")
    assert _checks(validate_dataset(scratch)) == {"ConsistencyViolation"}


def test_misaligned_trajectories_are_reported(scratch):
    record = _records(scratch)[0]
    path = scratch / expand_paths(record)["trajectory"][0]
    data = json.loads(path.read_text())
    data["counterfactual"]["ids"] = [i + 1000 for i in data["counterfactual"]["ids"]]
    path.write_text(json.dumps(data))
    report = validate_dataset(scratch)
    assert "SchemaViolation" in _checks(report)
    assert any(v.where == record.scene_id and "not aligned" in v.message for v in report)


def test_garbled_frame_fails_flow_fidelity(scratch):
    record = _records(scratch)[0]
    path = scratch / expand_paths(record)["factual_rgb"][1]
    write_png(path, np.random.default_rng(0).integers(0, 256, (32, 32, 3), dtype=np.uint8))
    report = validate_dataset(scratch)
    assert "FlowFidelityViolation" in _checks(report)


# Statistics and inspection

def test_stats(dataset):
    root, records = dataset
    stats = compute_stats(root)
    assert stats.pair_count == COUNT
    assert stats.template_counts == {"collision_chain": 1, "obstruction_removal": 1, "support_removal": 1}
    assert stats.split_counts == {"train": COUNT}
    assert sum(stats.label_histogram.values()) == COUNT * FRAMES * 32 * 32
    assert stats.label_histogram["WHITE"] > 0
    assert 0.0 <= stats.mean_affected_cell_fraction <= 1.0
    assert stats.divergent_fraction == pytest.approx(
        sum(r.first_divergence_frame is not None for r in records) / COUNT)
    assert set(stats.mean_psnr) == {"float", "quantized"}
    assert json.dumps(stats.to_dict())


def test_contact_sheet(tmp_path, dataset):
    root, records = dataset
    assert find_record(root, 1) == records[1]
    assert find_record(root, records[2].scene_id) == records[2]
    with pytest.raises(UnknownId):
        find_record(root, 99)

    out = contact_sheet(root, 0, tmp_path / "sheet.png", columns=3)
    assert out.is_file()
    assert read_png(out).ndim == 3


def test_exported_maps_match_rendered_packets(tmp_path, forge_config):
    scene = forge_scene(0, 2, forge_config)
    record = export_pair(scene.pair, scene.renders, scene.masks, scene.noise, tmp_path, scene.spec, 2)
    paths = expand_paths(record)
    for variant, packets in (("factual", scene.renders.factual), ("counterfactual", scene.renders.counterfactual)):
        assert len(paths[f"{variant}_instance"]) == len(packets)
        for t, packet in enumerate(packets):
            instance = read_png(tmp_path / paths[f"{variant}_instance"][t])
            surface = read_png(tmp_path / paths[f"{variant}_surface"][t])
            assert np.array_equal(instance, packet.instance)
            assert np.array_equal(surface, packet.face * 2 + packet.shadow)
            assert np.array_equal(surface // 2, packet.face)
            assert np.array_equal(read_png(tmp_path / paths[f"{variant}_rgb"][t]), to_bytes(packet.rgb))


@pytest.mark.slow
@pytest.mark.parametrize("index", range(3))
def test_flow_fidelity_at_default_size(index):
    scene = forge_scene(9, index, ForgeConfig())
    assert scene.spec.resolution == (128, 128) and scene.spec.frames == 49
    renders = scene.renders
    measured = 0
    for packets, flows in ((renders.factual, renders.factual_flows), (renders.counterfactual, renders.counterfactual_flows)):
        for t, flow in enumerate(flows):
            a, b = packets[t], packets[t + 1]
            value, pixels = flow_warp_psnr(a.rgb, b.rgb, flow, a.instance, b.instance, a.surface, b.surface)
            if value is None:
                continue
            measured += 1
            assert value >= 35.0, f"flow {t}: {value:.2f} dB over {pixels} pixels"
    assert measured > 0
