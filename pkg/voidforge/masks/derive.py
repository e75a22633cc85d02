# Masks derived from paired renders

from dataclasses import dataclass

import numpy as np

from voidforge.config import MaskConfig
from voidforge.errors import ShapeMismatch, UnknownId
from voidforge.masks.compose import affected_union, compose_quadmask, compose_trimask
from voidforge.masks.grid import gridify
from voidforge.masks.sequences import BinaryMaskSeq, MaskRole, QuadMask


def _stack(packets, name):
    return np.stack([getattr(p, name) for p in packets])


def silhouettes(packets, ids):
    """ (T, h, w) pixels whose instance is one of ids """
    return np.isin(_stack(packets, "instance"), sorted(int(i) for i in ids))


def _check_aligned(factual, counterfactual):
    if len(factual) != len(counterfactual):
        raise ShapeMismatch(f"packet sequences differ in length: {len(factual)} vs {len(counterfactual)}")
    for t, (a, b) in enumerate(zip(factual, counterfactual)):
        if a.instance.shape != b.instance.shape:
            raise ShapeMismatch(f"frame {t} sizes differ: {a.instance.shape} vs {b.instance.shape}")


def object_mask(packets, removed_ids, body_ids):
    """
    Mask of the removal targets in the factual frames.

    Parameters
    ----------
    packets : sequence of FramePacket
        Factual frames.
    removed_ids : iterable of int
        Removal targets O.
    body_ids : iterable of int
        Ids of every body of the scene.

    Returns
    -------
    BinaryMaskSeq
        ObjectMask role, True where the instance is in removed_ids.
    """

    removed = {int(i) for i in removed_ids}
    unknown = removed - {int(i) for i in body_ids}
    if unknown:
        raise UnknownId(f"removed ids {sorted(unknown)} are not part of the scene")
    return BinaryMaskSeq(silhouettes(packets, removed), MaskRole.OBJECT)


def shadow_difference(factual, counterfactual):
    """ Pixels whose shadow bit flips between variants """
    _check_aligned(factual, counterfactual)
    return _stack(factual, "shadow") != _stack(counterfactual, "shadow")


def affected_pixel_region(factual, counterfactual, affected_ids):
    """
    Pixel level region where the removal changes the video, apart from the
    targets themselves.

    Parameters
    ----------
    factual, counterfactual : sequence of FramePacket
        Aligned renders of both variants.
    affected_ids : iterable of int
        Affected surviving bodies.

    Returns
    -------
    BinaryMaskSeq
        Affected silhouettes in both variants plus shadow differences.
    """

    _check_aligned(factual, counterfactual)
    region = silhouettes(factual, affected_ids) | silhouettes(counterfactual, affected_ids)
    region |= shadow_difference(factual, counterfactual)
    return BinaryMaskSeq(region, MaskRole.AFFECTED_UNION)


@dataclass(frozen=True)
class PairMasks:
    """ Every mask of a pair, as exported to the dataset """
    object_mask: BinaryMaskSeq
    affected_orig: BinaryMaskSeq
    affected_count: BinaryMaskSeq
    affected: BinaryMaskSeq
    quadmask: QuadMask
    trimask: QuadMask


def derive_masks(pair, renders, spec, config=None):
    """
    Build the object mask, affected region, quadmask and trimask of a pair.

    Parameters
    ----------
    pair : CounterfactualPair
        Simulated pair.
    renders : PairRenders
        Rendered frames of both variants.
    spec : SceneSpec
        The scene.
    config : MaskConfig, optional
        Grid settings.

    Returns
    -------
    PairMasks
    """

    config = config or MaskConfig()
    factual, counterfactual = renders.factual, renders.counterfactual
    m_o = object_mask(factual, pair.removed_ids, spec.body_ids)

    orig = BinaryMaskSeq(
        silhouettes(factual, pair.affected_ids) | shadow_difference(factual, counterfactual),
        MaskRole.AFFECTED_ORIG,
    )
    count = gridify(BinaryMaskSeq(silhouettes(counterfactual, pair.affected_ids), MaskRole.AFFECTED_COUNT),
                    config.grid)
    if config.grid_orig:
        # gridify distributes over union
        m_a = gridify(affected_pixel_region(factual, counterfactual, pair.affected_ids), config.grid)
    else:
        m_a = affected_union(orig, count, config.grid, grid_orig=False)

    return PairMasks(
        object_mask=m_o,
        affected_orig=orig,
        affected_count=count,
        affected=m_a,
        quadmask=compose_quadmask(m_o, m_a),
        trimask=compose_trimask(m_o),
    )
