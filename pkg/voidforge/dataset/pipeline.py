# Dataset generation

import logging
import multiprocessing as mp
from dataclasses import dataclass
from pathlib import Path

from tqdm import tqdm

from voidforge.config import ForgeConfig
from voidforge.dataset.export import MANIFEST_NAME, append_manifest, export_pair
from voidforge.errors import ForgeIOError
from voidforge.masks import derive_masks, second_pass_trigger
from voidforge.noisewarp import warp_volume
from voidforge.physics import simulate_counterfactual
from voidforge.render import render_pair
from voidforge.scene import sample_scene
from voidforge.scene.seeding import STREAM_SPLIT, unit_interval

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForgedScene:
    """ Everything produced for one scene index """
    spec: object
    pair: object
    renders: object
    masks: object
    noise: object
    needs_second_pass: bool
    split: str


def assign_split(scene_seed, holdout):
    """ "test" for a deterministic fraction holdout of scenes, else "train" """
    return "test" if unit_interval(scene_seed, STREAM_SPLIT) < holdout else "train"


def forge_scene(master_seed, scene_index, config=None):
    """
    Sample, simulate, render and annotate one scene.

    Parameters
    ----------
    master_seed : int
        Seed of the dataset.
    scene_index : int
        Index of the scene.
    config : ForgeConfig, optional
        Run configuration.

    Returns
    -------
    ForgedScene
    """

    config = config or ForgeConfig()
    spec = sample_scene(master_seed, scene_index, config.sampler)
    pair = simulate_counterfactual(spec, config.physics)
    renders = render_pair(pair, spec)
    masks = derive_masks(pair, renders, spec, config.masks)

    # Noise follows the counterfactual (training target) motion
    width, height = spec.resolution
    k = config.noise.k
    shape = (spec.frames, height // k, width // k, config.noise.channels)
    noise = warp_volume(renders.counterfactual_flows, spec.scene_seed, shape, k)

    return ForgedScene(
        spec=spec,
        pair=pair,
        renders=renders,
        masks=masks,
        noise=noise,
        needs_second_pass=second_pass_trigger(pair, spec, config.masks),
        split=assign_split(spec.scene_seed, config.holdout),
    )


def _export_scene(job):
    out_dir, master_seed, scene_index, config = job
    scene = forge_scene(master_seed, scene_index, config)
    record = export_pair(
        scene.pair, scene.renders, scene.masks, scene.noise, out_dir, scene.spec, scene_index,
        split=scene.split, needs_second_pass=scene.needs_second_pass, grid=config.masks.grid, append=False,
    )
    logger.info("Scene %d (%s): removed %s, affected %s, divergence at frame %s",
                scene_index, scene.spec.template, record.removed_ids, record.affected_ids,
                record.first_divergence_frame)
    return record


def generate(out_dir, master_seed, count, config=None, progress=True):
    """
    Generate a dataset of count pairs.

    Parameters
    ----------
    out_dir : str or Path
        Dataset root, created when missing.
    master_seed : int
        Seed of the dataset.
    count : int
        Number of scenes, indices 0..count-1.
    config : ForgeConfig, optional
        Run configuration, config.jobs worker processes.
    progress : bool
        Show a progress bar.

    Returns
    -------
    list of ManifestRecord
    """

    config = config or ForgeConfig()
    config.sampler.check()
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / MANIFEST_NAME).write_text("", encoding="utf-8")
    except OSError as error:
        raise ForgeIOError(f"cannot create dataset ({error.strerror})", out_dir) from error

    jobs = [(str(out_dir), master_seed, index, config) for index in range(count)]
    records = []
    bar = tqdm(total=count, desc="generate", unit="scene", disable=not progress)

    # Workers own scenes end to end, the manifest is written here in index order
    if config.jobs > 1 and count > 1:
        with mp.Pool(min(config.jobs, count)) as pool:
            for record in pool.imap(_export_scene, jobs):
                append_manifest(out_dir, record)
                records.append(record)
                bar.update()
    else:
        for job in jobs:
            record = _export_scene(job)
            append_manifest(out_dir, record)
            records.append(record)
            bar.update()
    bar.close()

    divergent = sum(r.first_divergence_frame is not None for r in records)
    logger.info("Generated %d scenes in %s, %d divergent", len(records), out_dir, divergent)
    return records
