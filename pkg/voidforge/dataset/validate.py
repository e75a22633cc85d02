# Dataset validation
# Problems are reported as Violation entries, only unreadable roots raise.

import json
import logging
from pathlib import Path

import numpy as np

from voidforge.dataset.export import MANIFEST_NAME, ManifestRecord, expand_paths
from voidforge.dataset.formats import read_flow, read_json, read_noise, read_png
from voidforge.dataset.metrics import flow_warp_psnr
from voidforge.errors import BadMagic, ForgeIOError, ShapeMismatch, Truncated, Violation
from voidforge.masks.sequences import LABEL_VALUES, Label
from voidforge.physics import Trajectory, affected_bodies
from voidforge.scene import SceneSpec

logger = logging.getLogger(__name__)

_READERS = {".png": read_png, ".vflo": read_flow, ".vnse": read_noise, ".json": read_json}


def _load_files(root, record, report):
    """ Read every referenced file, None when any of them is missing or corrupt """

    loaded = {}
    ok = True
    for key, paths in expand_paths(record).items():
        values = []
        for relative in paths:
            path = root / relative
            if not path.is_file():
                report.append(Violation(record.scene_id, "MissingFile", relative))
                ok = False
                continue
            try:
                values.append(_READERS[path.suffix](path))
            except (ForgeIOError, BadMagic, Truncated, ValueError) as error:
                report.append(Violation(record.scene_id, "CorruptFile", f"{relative}: {error}"))
                ok = False
        loaded[key] = values
    return loaded if ok else None


def _check_quadmask(record, files, report):
    quadmasks = np.stack(files["quadmask"])
    object_mask = np.stack(files["object_mask"]) > 0

    # 4-value encoding
    bad = ~np.isin(quadmasks, LABEL_VALUES)
    for t in np.flatnonzero(bad.any(axis=(1, 2))):
        value = int(quadmasks[t][bad[t]][0])
        report.append(Violation(record.scene_id, "EncodingViolation", f"frame {t}: value {value}"))

    # Black and DarkGrey exactly on the targets
    on_target = (quadmasks == Label.BLACK) | (quadmasks == Label.DARK_GREY)
    for t in np.flatnonzero((on_target != object_mask).any(axis=(1, 2)) & ~bad.any(axis=(1, 2))):
        report.append(Violation(record.scene_id, "PartitionViolation",
                                f"frame {t}: target labels disagree with the object mask"))

    # Pixels that change between variants are never White
    factual = np.stack(files["factual_rgb"])
    counterfactual = np.stack(files["counterfactual_rgb"])
    changed = (factual != counterfactual).any(axis=3)
    unsound = changed & (quadmasks == Label.WHITE)
    for t in np.flatnonzero(unsound.any(axis=(1, 2))):
        report.append(Violation(record.scene_id, "SoundnessViolation",
                                f"frame {t}: {int(unsound[t].sum())} changed pixels labeled White"))


def _check_flows(record, files, threshold, report):
    for variant in ("factual", "counterfactual"):
        rgb = files[f"{variant}_rgb"]
        instance = files[f"{variant}_instance"]
        surface = files[f"{variant}_surface"]
        for t, flow in enumerate(files[f"{variant}_flow"]):
            value, pixels = flow_warp_psnr(
                rgb[t] / 255.0, rgb[t + 1] / 255.0, flow,
                instance[t], instance[t + 1], surface[t], surface[t + 1])
            if value is None:
                logger.warning("%s %s flow %d has no comparable pixels", record.scene_id, variant, t)
                continue
            if value < threshold:
                report.append(Violation(record.scene_id, "FlowFidelityViolation",
                                        f"{variant} flow {t}: {value:.2f} dB over {pixels} pixels"))


def _check_trajectories(record, files, report):
    data = files["trajectory"][0]
    try:
        factual = Trajectory.from_dict(data["factual"])
        counterfactual = Trajectory.from_dict(data["counterfactual"])
    except (KeyError, TypeError, ValueError) as error:
        report.append(Violation(record.scene_id, "SchemaViolation", f"trajectory.json: {error}"))
        return
    try:
        affected, first = affected_bodies(factual, counterfactual)
    except ShapeMismatch as error:
        report.append(Violation(record.scene_id, "SchemaViolation", f"trajectory.json: {error}"))
        return
    if sorted(affected) != record.affected_ids or first != record.first_divergence_frame:
        report.append(Violation(record.scene_id, "ConsistencyViolation",
                                f"trajectories give affected {sorted(affected)} from frame {first}, "
                                f"manifest says {record.affected_ids} from {record.first_divergence_frame}"))

    # Surviving bodies match bit for bit before the first divergence
    end = record.first_divergence_frame if record.first_divergence_frame is not None else factual.frames
    surviving = factual.alive & counterfactual.alive
    same = (
        np.array_equal(factual.positions[:end, surviving], counterfactual.positions[:end, surviving])
        and np.array_equal(factual.velocities[:end, surviving], counterfactual.velocities[:end, surviving])
    )
    if not same:
        report.append(Violation(record.scene_id, "PrefixViolation",
                                f"surviving bodies differ before frame {end}"))


def _check_record(root, record, threshold, report):
    files = _load_files(root, record, report)
    if files is None:
        return

    # Frame counts and sizes
    width, height = record.resolution
    noise = files["noise"][0]
    if noise.shape[0] != record.frames:
        report.append(Violation(record.scene_id, "ConsistencyViolation",
                                f"noise has {noise.shape[0]} frames, manifest says {record.frames}"))
    for key in ("factual_rgb", "counterfactual_rgb", "quadmask"):
        sizes = {image.shape[:2] for image in files[key]}
        if sizes != {(height, width)}:
            report.append(Violation(record.scene_id, "ConsistencyViolation",
                                    f"{key} sizes {sorted(sizes)} != {(height, width)}"))
            return
    try:
        spec = SceneSpec.from_dict(files["scene"][0])
    except (KeyError, TypeError, ValueError) as error:
        report.append(Violation(record.scene_id, "SchemaViolation", f"scene.json: {error}"))
        return
    if spec.scene_seed != record.scene_seed or spec.frames != record.frames:
        report.append(Violation(record.scene_id, "ConsistencyViolation", "scene.json disagrees with the manifest"))

    _check_quadmask(record, files, report)
    _check_flows(record, files, threshold, report)
    _check_trajectories(record, files, report)


def validate_dataset(root, flow_psnr_threshold=35.0):
    """
    Check a generated dataset on disk.

    Parameters
    ----------
    root : str or Path
        Dataset directory holding manifest.jsonl.
    flow_psnr_threshold : float
        Minimum flow warp PSNR in dB.

    Returns
    -------
    list of Violation
        Empty for a valid dataset.
    """

    root = Path(root)
    manifest = root / MANIFEST_NAME
    if not manifest.is_file():
        return [Violation(str(root), "MissingManifest", f"no {MANIFEST_NAME} in {root}")]
    try:
        lines = manifest.read_text(encoding="utf-8").splitlines()
    except OSError as error:
        raise ForgeIOError(f"cannot read manifest ({error.strerror})", manifest) from error

    report = []
    seen = set()
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = ManifestRecord.from_dict(json.loads(line))
        except (json.JSONDecodeError, TypeError, ValueError) as error:
            report.append(Violation(f"line {number}", "SchemaViolation", str(error)))
            continue
        if record.scene_id in seen:
            report.append(Violation(record.scene_id, "DuplicateRecord", f"line {number}"))
            continue
        seen.add(record.scene_id)
        _check_record(root, record, flow_psnr_threshold, report)

    logger.info("Validated %d records in %s: %d violations", len(seen), root, len(report))
    return report
