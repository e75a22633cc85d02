# Scene export and manifest records

import json
import logging
import os
import shutil
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from voidforge.dataset.formats import to_bytes, write_flow, write_json, write_noise, write_png
from voidforge.dataset.metrics import psnr, serialize_psnr
from voidforge.errors import ConsistencyError, ForgeIOError

logger = logging.getLogger(__name__)

MANIFEST_SCHEMA = "void-forge/manifest/1"
MANIFEST_NAME = "manifest.jsonl"

# Files of a scene directory, frame patterns are %-formatted with the frame index
SCENE_FILES = {
    "factual_rgb": "factual/rgb_%04d.png",
    "factual_instance": "factual/instance_%04d.png",
    "factual_surface": "factual/surface_%04d.png",
    "factual_flow": "factual/flow_%04d.vflo",
    "counterfactual_rgb": "counterfactual/rgb_%04d.png",
    "counterfactual_instance": "counterfactual/instance_%04d.png",
    "counterfactual_surface": "counterfactual/surface_%04d.png",
    "counterfactual_flow": "counterfactual/flow_%04d.vflo",
    "object_mask": "object_mask_%04d.png",
    "quadmask": "quadmask_%04d.png",
    "trimask": "trimask_%04d.png",
    "noise": "noise.vnse",
    "scene": "scene.json",
    "trajectory": "trajectory.json",
}

# Patterns holding one file per flow (T-1) instead of one per frame
FLOW_KEYS = ("factual_flow", "counterfactual_flow")


def scene_name(scene_index):
    return f"scene_{scene_index:06d}"


def expand_paths(record):
    """
    Every file a record references, relative to the dataset root.

    Returns
    -------
    dict
        Key to list of relative paths.
    """

    expanded = {}
    for key, pattern in record.paths.items():
        if "%" not in pattern:
            expanded[key] = [f"{record.scene_id}/{pattern}"]
            continue
        count = record.frames - 1 if key in FLOW_KEYS else record.frames
        expanded[key] = [f"{record.scene_id}/{pattern % t}" for t in range(count)]
    return expanded


@dataclass(frozen=True)
class ManifestRecord:
    """
    One line of manifest.jsonl, describing one exported pair.
    """
    scene_id: str
    scene_index: int
    scene_seed: int
    template: str
    split: str
    removed_ids: list
    affected_ids: list
    first_divergence_frame: object
    needs_second_pass: bool
    frames: int
    resolution: list
    grid: int
    noise: dict
    psnr: dict
    paths: dict = field(default_factory=lambda: dict(SCENE_FILES))
    schema: str = MANIFEST_SCHEMA

    def to_dict(self):
        data = {"schema": self.schema}
        data.update((k, v) for k, v in asdict(self).items() if k != "schema")
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @staticmethod
    def from_dict(data):
        if data.get("schema") != MANIFEST_SCHEMA:
            raise ValueError(f"unsupported manifest schema {data.get('schema')!r}")
        return ManifestRecord(**data)


def append_manifest(out_dir, record):
    """ Append one record to the manifest of a dataset """
    path = Path(out_dir) / MANIFEST_NAME
    try:
        with open(path, "a", encoding="utf-8") as f:
            f.write(record.to_json() + "\n")
    except OSError as error:
        raise ForgeIOError(f"cannot append to manifest ({error.strerror})", path) from error


def read_manifest(out_dir):
    """ Parsed lines of a manifest, raises ForgeIOError when missing """
    path = Path(out_dir) / MANIFEST_NAME
    try:
        with open(path, encoding="utf-8") as f:
            return [line for line in f.read().splitlines() if line.strip()]
    except OSError as error:
        raise ForgeIOError(f"cannot read manifest ({error.strerror})", path) from error


def _check_consistency(spec, renders, masks, noise):
    frames = spec.frames
    lengths = {
        "factual frames": len(renders.factual),
        "counterfactual frames": len(renders.counterfactual),
        "factual flows": len(renders.factual_flows) + 1,
        "counterfactual flows": len(renders.counterfactual_flows) + 1,
        "object mask": len(masks.object_mask),
        "quadmask": len(masks.quadmask),
        "trimask": len(masks.trimask),
        "noise": len(noise),
    }
    for name, length in lengths.items():
        if length != frames:
            raise ConsistencyError(f"{name} cover {length} frames, scene has {frames}")


def _write_variant(directory, packets, flows):
    directory.mkdir()
    for t, packet in enumerate(packets):
        write_png(directory / f"rgb_{t:04d}.png", packet.rgb)
        write_png(directory / f"instance_{t:04d}.png", packet.instance)
        write_png(directory / f"surface_{t:04d}.png", packet.surface)
    for t, flow in enumerate(flows):
        write_flow(directory / f"flow_{t:04d}.vflo", flow)


def pair_psnr(renders):
    """ Factual vs counterfactual PSNR on float frames and on 8-bit frames """
    factual = np.stack([p.rgb for p in renders.factual])
    counterfactual = np.stack([p.rgb for p in renders.counterfactual])
    quantized = psnr(to_bytes(factual) / 255.0, to_bytes(counterfactual) / 255.0)
    return {"float": serialize_psnr(psnr(factual, counterfactual)), "quantized": serialize_psnr(quantized)}


def export_pair(pair, renders, masks, noise, out_dir, spec, scene_index,
                split="train", needs_second_pass=False, grid=8, append=True):
    """
    Write a pair to its scene directory.

    Parameters
    ----------
    pair : CounterfactualPair
        Simulated pair.
    renders : PairRenders
        Rendered frames and flows.
    masks : PairMasks
        Object mask, quadmask and trimask.
    noise : NoiseVolume
        Warped noise.
    out_dir : str or Path
        Dataset root.
    spec : SceneSpec
        The scene.
    scene_index : int
        Index of the scene in the dataset.
    split : str
        "train" or "test".
    needs_second_pass : bool
        Second pass flag of the pair.
    grid : int
        Grid size of the quadmask.
    append : bool
        Append the record to manifest.jsonl.

    Returns
    -------
    ManifestRecord
    """

    _check_consistency(spec, renders, masks, noise)
    out_dir = Path(out_dir)
    name = scene_name(scene_index)
    final = out_dir / name
    staging = out_dir / f".{name}.tmp-{os.getpid()}"

    try:
        if staging.exists():
            shutil.rmtree(staging)
        staging.mkdir(parents=True)

        # Frames, maps and flows
        _write_variant(staging / "factual", renders.factual, renders.factual_flows)
        _write_variant(staging / "counterfactual", renders.counterfactual, renders.counterfactual_flows)

        # Masks
        for t in range(spec.frames):
            write_png(staging / f"object_mask_{t:04d}.png", masks.object_mask.frames[t])
            write_png(staging / f"quadmask_{t:04d}.png", masks.quadmask.frames[t])
            write_png(staging / f"trimask_{t:04d}.png", masks.trimask.frames[t])

        # Noise, scene and trajectories
        write_noise(staging / "noise.vnse", noise.frames)
        (staging / "scene.json").write_text(spec.to_json(), encoding="utf-8")
        write_json(staging / "trajectory.json", {
            "removed_ids": sorted(pair.removed_ids),
            "affected_ids": sorted(pair.affected_ids),
            "first_divergence_frame": pair.first_divergence_frame,
            "factual": pair.factual.to_dict(),
            "counterfactual": pair.counterfactual.to_dict(),
        })

        if final.exists():
            shutil.rmtree(final)
        os.rename(staging, final)
    except OSError as error:
        if isinstance(error, ForgeIOError):
            raise
        raise ForgeIOError(f"cannot export scene ({error.strerror or error})", error.filename or final) from error

    record = ManifestRecord(
        scene_id=name,
        scene_index=int(scene_index),
        scene_seed=int(spec.scene_seed),
        template=spec.template,
        split=split,
        removed_ids=sorted(int(i) for i in pair.removed_ids),
        affected_ids=sorted(int(i) for i in pair.affected_ids),
        first_divergence_frame=pair.first_divergence_frame,
        needs_second_pass=bool(needs_second_pass),
        frames=int(spec.frames),
        resolution=[int(spec.resolution[0]), int(spec.resolution[1])],
        grid=int(grid),
        noise={"seed": noise.seed, "k": noise.flow_downsample, "channels": int(noise.shape[3])},
        psnr=pair_psnr(renders),
    )
    if append:
        append_manifest(out_dir, record)
    logger.debug("Exported %s to %s", name, final)
    return record
