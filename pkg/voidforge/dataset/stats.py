# Dataset statistics

import json
import logging
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from voidforge.dataset.export import ManifestRecord, expand_paths, read_manifest
from voidforge.dataset.formats import read_png
from voidforge.dataset.metrics import PSNR_SENTINEL
from voidforge.masks.grid import occupied_cells
from voidforge.masks.sequences import LABEL_VALUES, Label

logger = logging.getLogger(__name__)


@dataclass
class DatasetStats:
    """
    Summary of a generated dataset.

    Parameters
    ----------
    pair_count : int
        Number of exported pairs.
    divergent_fraction : float
        Share of pairs where at least one surviving body changed its motion.
    template_counts : dict
        Pairs per scenario template.
    split_counts : dict
        Pairs per split.
    label_histogram : dict
        Pixel counts per quadmask label name, over every frame.
    mean_affected_cell_fraction : float
        Mean share of grid cells holding affected pixels.
    second_pass_fraction : float
        Share of pairs flagged for a second reasoning pass.
    mean_psnr : dict
        Mean factual vs counterfactual PSNR on float and 8-bit frames,
        identical pairs left out.
    """
    pair_count: int = 0
    divergent_fraction: float = 0.0
    template_counts: dict = field(default_factory=dict)
    split_counts: dict = field(default_factory=dict)
    label_histogram: dict = field(default_factory=dict)
    mean_affected_cell_fraction: float = 0.0
    second_pass_fraction: float = 0.0
    mean_psnr: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _mean(values):
    return float(np.mean(values)) if values else 0.0


def compute_stats(root, psnr_sentinel=PSNR_SENTINEL):
    """
    Aggregate statistics over every record of a dataset.

    Parameters
    ----------
    root : str or Path
        Dataset directory.
    psnr_sentinel : float
        Serialized value of an infinite PSNR, left out of the means.

    Returns
    -------
    DatasetStats
    """

    root = Path(root)
    records = [ManifestRecord.from_dict(json.loads(line)) for line in read_manifest(root)]

    histogram = Counter()
    cell_fractions = []
    psnr = {"float": [], "quantized": []}
    for record in records:
        for relative in expand_paths(record)["quadmask"]:
            quadmask = read_png(root / relative)
            values, counts = np.unique(quadmask, return_counts=True)
            histogram.update({int(v): int(c) for v, c in zip(values, counts)})

            # Affected cells, as labeled in the stored quadmask
            affected = (quadmask == Label.LIGHT_GREY) | (quadmask == Label.DARK_GREY)
            cells = occupied_cells(affected[None], record.grid)
            cell_fractions.append(np.count_nonzero(cells) / cells.size)
        for kind, values in psnr.items():
            if record.psnr.get(kind, psnr_sentinel) != psnr_sentinel:
                values.append(record.psnr[kind])

    count = len(records)
    stats = DatasetStats(
        pair_count=count,
        divergent_fraction=sum(1 for r in records if r.first_divergence_frame is not None) / count if count else 0.0,
        template_counts=dict(sorted(Counter(r.template for r in records).items())),
        split_counts=dict(sorted(Counter(r.split for r in records).items())),
        label_histogram={Label(v).name: histogram.get(v, 0) for v in LABEL_VALUES},
        mean_affected_cell_fraction=_mean(cell_fractions),
        second_pass_fraction=sum(1 for r in records if r.needs_second_pass) / count if count else 0.0,
        mean_psnr={kind: _mean(values) for kind, values in psnr.items()},
    )
    logger.info("Computed statistics over %d pairs in %s", count, root)
    return stats
