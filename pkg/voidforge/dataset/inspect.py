# Contact sheets of exported pairs

import json
import logging
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from voidforge.coloring import Colormap, flow_to_rgb, instance_colors
from voidforge.dataset.export import ManifestRecord, expand_paths, read_manifest
from voidforge.dataset.formats import read_flow, read_png
from voidforge.errors import ForgeIOError, UnknownId

logger = logging.getLogger(__name__)

ROWS = ("factual", "counterfactual", "instance", "quadmask", "flow")

QUADMASK_COLORS = Colormap("gray", vmin=0.0, vmax=255.0)


def find_record(root, scene):
    """ Manifest record of a scene, by id or by index """

    for line in read_manifest(root):
        record = ManifestRecord.from_dict(json.loads(line))
        if str(scene) in (record.scene_id, str(record.scene_index)):
            return record
    raise UnknownId(f"no scene {scene!r} in {root}")


def contact_sheet(root, scene, out_path, columns=8):
    """
    Save a grid of frames for one exported pair.

    Rows hold the factual and counterfactual frames, the factual instance map,
    the quadmask and the counterfactual flow. Columns sample the clip evenly.

    Parameters
    ----------
    root : str or Path
        Dataset directory.
    scene : str or int
        Scene id or index.
    out_path : str or Path
        Output image, any format matplotlib writes.
    columns : int
        Number of sampled frames.

    Returns
    -------
    Path
        The written file.
    """

    root = Path(root)
    record = find_record(root, scene)
    paths = expand_paths(record)
    frames = np.unique(np.linspace(0, record.frames - 2, min(columns, record.frames - 1)).round().astype(int))

    fig = Figure(figsize=(1.6 * len(frames), 1.6 * len(ROWS)))
    axes = fig.subplots(len(ROWS), len(frames), squeeze=False)
    for col, t in enumerate(frames):
        images = (
            read_png(root / paths["factual_rgb"][t]) / 255.0,
            read_png(root / paths["counterfactual_rgb"][t]) / 255.0,
            instance_colors(read_png(root / paths["factual_instance"][t])),
            QUADMASK_COLORS(read_png(root / paths["quadmask"][t])),
            flow_to_rgb(read_flow(root / paths["counterfactual_flow"][t])),
        )
        for row, image in enumerate(images):
            ax = axes[row, col]
            ax.imshow(image, cmap="gray", vmin=0.0, vmax=1.0)
            ax.set_xticks([])
            ax.set_yticks([])
            if row == 0:
                ax.set_title(f"t={t}", fontsize=7)
            if col == 0:
                ax.set_ylabel(ROWS[row], fontsize=7)
    fig.suptitle(f"{record.scene_id} ({record.template}) removed {record.removed_ids}", fontsize=8)
    fig.tight_layout()

    out_path = Path(out_path)
    try:
        fig.savefig(out_path, dpi=100)
    except OSError as error:
        raise ForgeIOError(f"cannot write contact sheet ({error.strerror})", out_path) from error
    logger.info("Wrote contact sheet of %s to %s", record.scene_id, out_path)
    return out_path
